#include "ezbft/scenarios.hpp"

#include <algorithm>

namespace ezbft {

Config paper_config(std::vector<std::string> byzantine, std::vector<std::string> faulty) {
    Config cfg;
    cfg.n = 4;
    cfg.f = 1;
    cfg.replica_ids = {"R", "L", "Q", "T"};
    cfg.client_ids = {"c1", "c2"};
    for (const auto& b : byzantine) cfg.byzantine_ids.push_back(cfg.replica(b));
    for (const auto& c : faulty) cfg.faulty_client_ids.push_back(cfg.client(c));
    cfg.validate();
    return cfg;
}

Config lab_config(std::uint32_t n, std::uint32_t f, const std::vector<std::string>& byzantine,
                  const std::vector<std::string>& faulty) {
    Config cfg;
    cfg.n = n;
    cfg.f = f;
    if (n == 4) {
        cfg.replica_ids = {"R", "L", "Q", "T"};
    } else {
        for (std::uint32_t i = 0; i < n; ++i) cfg.replica_ids.push_back("r" + std::to_string(i));
    }
    cfg.client_ids = {"c1", "c2"};
    for (const auto& b : byzantine) cfg.byzantine_ids.push_back(cfg.replica(b));
    for (const auto& c : faulty) cfg.faulty_client_ids.push_back(cfg.client(c));
    cfg.validate();
    return cfg;
}

namespace {

class Builder {
  public:
    explicit Builder(Config cfg) : codec_(cfg_) {
        cfg_ = std::move(cfg);
        sched_.config = cfg_;
    }

    Command command(const std::string& id, const std::string& client) const {
        return {id, cfg_.client(client), "x", ""};
    }
    void submit(const std::string& id, const std::string& client, const std::string& target) {
        sched_.workload.push_back({command(id, client), cfg_.replica(target)});
    }
    OrderingTuple tuple(const std::string& cmd, const std::string& client, std::vector<std::string> deps,
                        std::uint32_t seq) const {
        OrderingTuple t{command(cmd, client), {}, seq};
        for (const auto& d : deps) t.deps.insert(codec_.instance(d));
        return t;
    }

    void deliver(const std::string& id, const std::string& note = {},
                 std::optional<ByzantineChoice> choice = std::nullopt) {
        Event e;
        e.kind = Event::Kind::deliver;
        e.message = codec_.message_id(id);
        e.byzantine = std::move(choice);
        push(std::move(e), note);
    }
    void trigger(const std::string& replica, const std::string& instance, const std::string& note = {}) {
        Event e;
        e.kind = Event::Kind::trigger_owner_change;
        e.node = cfg_.node(replica);
        e.instance = codec_.instance(instance);
        push(std::move(e), note);
    }
    void byzantine(const std::string& replica, const std::string& instance, ByzantineChoice choice,
                   const std::string& note = {}) {
        Event e;
        e.kind = Event::Kind::adversary;
        e.node = cfg_.node(replica);
        e.instance = codec_.instance(instance);
        e.byzantine = std::move(choice);
        push(std::move(e), note);
    }
    void faulty(const std::string& client, FaultyClientChoice choice, const std::string& note = {}) {
        Event e;
        e.kind = Event::Kind::adversary;
        e.node = cfg_.node(client);
        e.faulty = std::move(choice);
        push(std::move(e), note);
    }
    CertificateSpec cert(CertPath path, std::vector<std::string> replies, std::vector<std::string> to) const {
        CertificateSpec s;
        s.path = path;
        for (const auto& r : replies) s.reply_ids.push_back(codec_.message_id(r));
        for (const auto& r : to) s.recipients.push_back(cfg_.replica(r));
        return s;
    }
    void tail(const std::string& note = {}) {
        Event e;
        e.kind = Event::Kind::synchronous_tail;
        push(std::move(e), note);
    }

    Schedule take() { return std::move(sched_); }

  private:
    void push(Event e, const std::string& note) {
        e.seq_no = static_cast<std::uint32_t>(sched_.events.size() + 1);
        e.note = note;
        sched_.events.push_back(std::move(e));
    }

    Config cfg_;
    Codec codec_;
    Schedule sched_;
};

ScenarioSpec safety() {
    Builder b(paper_config({"T"}, {"c1"}));
    b.submit("alpha", "c1", "R");
    b.submit("beta", "c2", "T");

    b.deliver("c2#0", "c2 sends beta to T; T proposes it at T.0 and its SPEC-ORDERs stay delayed");
    b.deliver("c1#0", "c1 sends alpha to R; R proposes <alpha,{},1> at R.0");
    b.deliver("R#0", "L replies <alpha,{},1>");
    b.deliver("R#1", "Q replies <alpha,{},1>");
    ByzantineChoice eq;
    eq.kind = ByzantineChoice::Kind::equivocate_spec_reply;
    eq.branches = {b.tuple("alpha", "c1", {}, 1), b.tuple("alpha", "c1", {"T.0"}, 2)};
    b.deliver("R#2", "T sends two SPEC-REPLYs: <alpha,{},1> and <alpha,{beta},2>", eq);
    for (const char* id : {"R#3", "L#0", "Q#0", "T#4", "T#5"}) b.deliver(id);

    FaultyClientChoice split;
    split.kind = FaultyClientChoice::Kind::split_certificates;
    split.certificates = {b.cert(CertPath::fast, {"R#3", "L#0", "Q#0", "T#4"}, {"R"}),
                          b.cert(CertPath::slow, {"R#3", "L#0", "T#5"}, {"Q"})};
    b.faulty("c1", split, "c1 sends CC-Fast to R and CC-Slow to Q");
    b.deliver("c1#1", "R commits <alpha,{},1> on CC-Fast");
    b.deliver("c1#2", "Q accepts <alpha,{beta},2> on CC-Slow");

    b.trigger("L", "R.0", "owner change for R.0; R's response is delayed");
    b.trigger("Q", "R.0");
    ByzantineChoice vote;
    vote.kind = ByzantineChoice::Kind::arbitrary_owner_change_tuple;
    vote.branches = {b.tuple("alpha", "c1", {"T.0"}, 2)};
    b.byzantine("T", "R.0", vote, "T votes <alpha,{beta},2>");
    b.deliver("Q#2");
    b.deliver("T#6", "L selects <alpha,{beta},2> by Condition 1 and sends NEW-OWNER");
    b.deliver("L#2", "Q commits <alpha,{beta},2>");
    b.deliver("L#1", "R already committed <alpha,{},1>");
    b.tail();

    ScenarioSpec spec{"safety", b.take(), {}};
    spec.expected = {{Property::agreement, "R@R.0=<alpha,{},1>; L@R.0=<alpha,{T.0},2>; Q@R.0=<alpha,{T.0},2>"}};
    return spec;
}

ScenarioSpec exec_consistency() {
    Builder b(paper_config());
    b.submit("alpha", "c1", "R");
    b.submit("beta", "c2", "Q");

    b.deliver("c1#0", "R proposes <alpha,{},1> at R.0");
    b.deliver("c2#0", "Q proposes <beta,{},1> at Q.0");
    b.deliver("R#0", "L replies <alpha,{},1>");
    b.deliver("R#1", "Q replies <alpha,{beta},2>");
    b.deliver("Q#2", "T replies <beta,{},1>");
    b.deliver("Q#0", "R replies <beta,{alpha},2>");

    b.trigger("L", "R.0", "all further messages delayed; owner change for R.0 to L");
    b.trigger("R", "R.0");
    b.trigger("Q", "R.0");
    b.deliver("R#5");
    b.deliver("Q#5", "L selects <alpha,{},1> by Condition 2");
    b.deliver("L#2", "Q commits <alpha,{},1>");
    b.deliver("L#3", "T commits <alpha,{},1>");

    b.trigger("T", "Q.0", "owner change for Q.0 to T");
    b.trigger("Q", "Q.0");
    b.trigger("R", "Q.0");
    b.deliver("Q#7");
    b.deliver("R#6", "T selects <beta,{},1> by Condition 2");
    b.deliver("T#2", "R commits <beta,{},1>");
    b.deliver("T#4", "Q commits <beta,{},1>");
    b.tail();

    ScenarioSpec spec{"exec-consistency", b.take(), {}};
    spec.expected = {{Property::dependency_inclusion, "R@R.0=<alpha,{},1>; R@Q.0=<beta,{},1>"},
                     {Property::execution_consistency, "R@R.0=<alpha,{},1>; R@Q.0=<beta,{},1>"}};
    return spec;
}

ScenarioSpec liveness() {
    Builder b(paper_config({}, {"c1"}));
    b.submit("alpha", "c1", "R");
    b.submit("beta", "c2", "T");

    b.deliver("c2#0", "T sees beta first; its SPEC-ORDERs stay delayed");
    b.deliver("c1#0", "R proposes <alpha,{},1> at R.0");
    b.deliver("R#0", "L replies <alpha,{},1>");
    b.deliver("R#1", "Q replies <alpha,{},1>");
    b.deliver("R#2", "T replies <alpha,{beta},2>");
    for (const char* id : {"R#3", "L#0", "Q#0", "T#4"}) b.deliver(id);

    FaultyClientChoice split;
    split.kind = FaultyClientChoice::Kind::split_certificates;
    split.certificates = {b.cert(CertPath::slow, {"R#3", "L#0", "Q#0"}, {"R"}),
                          b.cert(CertPath::slow, {"R#3", "L#0", "T#4"}, {"L"})};
    b.faulty("c1", split, "c1 sends CC1 to R and CC2 to L");
    b.deliver("c1#1", "R accepts <alpha,{},1> with CC1");
    b.deliver("c1#2", "L accepts <alpha,{beta},2> with CC2");

    b.trigger("L", "R.0", "all further messages delayed; owner change for R.0 to L");
    b.trigger("R", "R.0");
    b.trigger("Q", "R.0");
    b.deliver("R#5");
    b.deliver("Q#1", "L holds CC1 and CC2 at the same owner number: Conflict");
    b.tail("network becomes synchronous");

    ScenarioSpec spec{"liveness", b.take(), {}};
    spec.expected = {{Property::liveness, "L@R.0=<alpha,{},1>; L@R.0=<alpha,{T.0},2>"}};
    return spec;
}

ScenarioSpec happy() {
    Builder b(paper_config());
    b.submit("alpha", "c1", "R");
    b.deliver("c1#0", "R proposes <alpha,{},1>");
    for (const char* id : {"R#0", "R#1", "R#2"}) b.deliver(id);
    for (const char* id : {"R#3", "L#0", "Q#0", "T#0"}) b.deliver(id);
    for (const char* id : {"c1#1", "c1#2", "c1#3", "c1#4"}) b.deliver(id);
    b.tail();
    return {"happy", b.take(), {}};
}

}  // namespace

std::vector<std::string> scenario_names() { return {"safety", "exec-consistency", "liveness", "happy"}; }

ScenarioSpec build_scenario(const std::string& name) {
    if (name == "safety") return safety();
    if (name == "exec-consistency") return exec_consistency();
    if (name == "liveness") return liveness();
    if (name == "happy") return happy();
    throw UnknownScenario("unknown scenario '" + name + "'");
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
    ScenarioResult res;
    res.trace = run(spec.schedule);
    res.reports = check_all(observe(res.trace), all_properties());
    const Config& cfg = spec.schedule.config;
    res.matches = res.reports.size() == spec.expected.size();
    for (std::size_t i = 0; res.matches && i < res.reports.size(); ++i) {
        const auto& r = res.reports[i];
        res.matches = std::any_of(spec.expected.begin(), spec.expected.end(), [&](const ExpectedReport& e) {
            return e.property == r.property && e.summary == witness_summary(r, cfg);
        });
    }
    return res;
}

}  // namespace ezbft
