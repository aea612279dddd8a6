#include "properties.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace ezt;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void verdict(int n, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << n << " " << name << ": " << detail << std::endl;
    failures += ok ? 0 : 1;
}

std::map<std::string, Effect> correct_commits_at(const Trace& t, InstanceId at) {
    std::map<std::string, Effect> out;
    for (const auto& e : effects_of(t, Effect::Kind::commit)) {
        if (e.instance == at && e.node.is_replica() && t.config.is_correct(e.node.replica())) {
            out[t.config.name(e.node)] = e;
        }
    }
    return out;
}

std::string fmt(const std::vector<ViolationReport>& rs, const Config& cfg) {
    std::string s;
    for (const auto& r : rs) s += std::string(s.empty() ? "" : " | ") + to_string(r.property) + " " + witness_summary(r, cfg);
    return s.empty() ? "none" : s;
}

void safety() {
    const auto start = Clock::now();
    const auto spec = build_scenario("safety");
    const auto res = run_scenario(spec);
    const double secs = since(start);
    const auto& cfg = spec.schedule.config;
    const auto commits = correct_commits_at(res.trace, inst("R.0", cfg));
    auto is = [&](const std::string& r, const std::string& t, const std::string& path) {
        auto it = commits.find(r);
        return it != commits.end() && tuple_summary(it->second.tuple, cfg) == t && it->second.detail == path;
    };
    const auto reports = check_all(observe(res.trace), {Property::agreement});
    const bool ok = secs < 1.0 && is("R", "<alpha,{},1>", "commit_fast") && is("L", "<alpha,{T.0},2>", "new_owner") &&
                    is("Q", "<alpha,{T.0},2>", "new_owner") && reports.size() == 1 &&
                    witness_summary(reports[0], cfg) ==
                        "R@R.0=<alpha,{},1>; L@R.0=<alpha,{T.0},2>; Q@R.0=<alpha,{T.0},2>";
    std::ostringstream d;
    d << secs << "s; " << fmt(reports, cfg);
    verdict(1, "safety reproduction", ok, d.str());
}

void exec_consistency() {
    const auto spec = build_scenario("exec-consistency");
    const auto res = run_scenario(spec);
    const auto& cfg = spec.schedule.config;
    const auto obs = observe(res.trace);
    bool committed = false;
    for (const auto& [key, c] : obs.commits) {
        (void)c;
        committed = committed || key.first == cfg.replica("R");
    }
    const auto* a = obs.commit(cfg.replica("R"), inst("R.0", cfg));
    const auto* b = obs.commit(cfg.replica("R"), inst("Q.0", cfg));
    const auto dep = check_all(obs, {Property::dependency_inclusion});
    const auto exe = check_all(obs, {Property::execution_consistency});
    const bool ok = cfg.byzantine_ids.empty() && cfg.faulty_client_ids.empty() && committed && a && b &&
                    tuple_summary(a->tuple, cfg) == "<alpha,{},1>" && tuple_summary(b->tuple, cfg) == "<beta,{},1>" &&
                    dep.size() == 1 && exe.size() == 1;
    auto all = dep;
    all.insert(all.end(), exe.begin(), exe.end());
    verdict(2, "execution-consistency reproduction", ok, fmt(all, cfg));
}

void liveness() {
    const auto spec = build_scenario("liveness");
    const auto res = run_scenario(spec);
    const auto& cfg = spec.schedule.config;
    const auto sel = effects_of(res.trace, Effect::Kind::selection);
    bool conflict = false;
    if (!sel.empty()) {
        const auto& last = sel.back();
        std::set<std::string> pair{tuple_summary(last.tuple, cfg), last.rival ? tuple_summary(*last.rival, cfg) : ""};
        conflict = last.outcome == SelectionOutcome::conflict &&
                   pair == std::set<std::string>{"<alpha,{},1>", "<alpha,{T.0},2>"};
    }
    const auto reports = check_all(observe(res.trace), {Property::liveness}, true);
    verdict(3, "liveness reproduction", conflict && reports.size() == 1 && res.trace.has_tail, fmt(reports, cfg));
}

void step_count() {
    const auto t = run(build_scenario("happy").schedule);
    std::map<std::string, std::uint32_t> request_step;
    for (const auto& m : t.initial) request_step[std::get<ClientRequest>(m->body).command.id] = m->step;
    std::vector<std::uint32_t> rounds;
    for (const auto& s : t.steps) {
        for (const auto& m : s.emitted) {
            if (const auto* cf = std::get_if<CommitFast>(&m->body)) {
                rounds.push_back(m->step - request_step[cf->certificate->tuple.command.id] - 1);
            }
        }
    }
    const auto commits = correct_commits_at(t, inst("R.0"));
    bool ok = commits.size() == 4 && !rounds.empty();
    for (auto r : rounds) ok = ok && r == 2;
    for (const auto& [r, e] : commits) ok = ok && e.detail == "commit_fast";
    std::ostringstream d;
    d << commits.size() << " replicas committed via COMMIT-FAST; delivery rounds before COMMIT-FAST:";
    for (auto r : rounds) d << " " << r;
    verdict(4, "fast-path step count", ok, d.str());
}

void honest_soundness() {
    ExploreBounds b;
    b.workload = default_workload(honest(), 1);
    b.max_owner_changes_per_instance = 1;
    b.max_events = 18;
    const auto res = explore(honest(), b, {Property::agreement, Property::validity, Property::liveness});
    std::ostringstream d;
    d << "1 command, <=1 owner change, max_events " << b.max_events << ", states_visited " << res.states_visited
      << ", tails " << res.tails_run << ", exhausted " << (res.exhausted ? "true" : "false") << ", violations "
      << res.violations.size() << ", " << res.seconds << "s";
    verdict(5, "honest soundness", res.exhausted && res.violations.empty() && res.seconds < 600, d.str());
}

bool found_and_replays(const ExploreResult& r, Property p) {
    for (const auto& v : r.violations) {
        if (v.report.property != p) continue;
        auto again = replay_check(v.schedule, p);
        if (v.replays && again && same_report(*again, v.report)) return true;
    }
    return false;
}

void rediscovery() {
    const auto start = Clock::now();
    std::ostringstream d;

    ExploreBounds fault_free;
    fault_free.workload = default_workload(honest(), 2);
    fault_free.max_events = 16;
    fault_free.deepen_from = 8;
    fault_free.stop_when_found = {Property::dependency_inclusion};
    const auto a = explore(honest(), fault_free, fault_free.stop_when_found);
    const bool dep = found_and_replays(a, Property::dependency_inclusion);

    const auto cfg = paper_config({"T"}, {"c1"});
    ExploreBounds byz;
    byz.workload = default_workload(cfg, 2, "T");
    byz.max_events = 16;
    byz.deepen_from = 8;
    byz.stop_when_found = {Property::agreement, Property::liveness};
    const auto b = explore(cfg, byz, byz.stop_when_found);
    const bool agr = found_and_replays(b, Property::agreement);
    const bool live = found_and_replays(b, Property::liveness);
    const double secs = since(start);

    for (const auto* r : {&a, &b}) {
        for (const auto& v : r->violations) {
            d << to_string(v.report.property) << " at depth " << r->max_events << " (" << v.original_events << " -> "
              << v.schedule.events.size() << " events): " << witness_summary(v.report, v.schedule.config) << "; ";
        }
    }
    d << "states " << a.states_visited << " + " << b.states_visited << ", " << secs << "s";
    verdict(6, "violation rediscovery", dep && agr && live && secs < 1800, d.str());
}

void determinism() {
    const std::filesystem::path dir = EZBFT_SOURCE_DIR "/scenarios";
    bool ok = true;
    std::string detail;
    for (const auto& name : scenario_names()) {
        const auto s = build_scenario(name).schedule;
        const auto one = write_trace(run(s));
        const auto two = write_trace(run(decode_schedule(encode_schedule(s))));
        const auto golden_path = dir / (name + ".jsonl");
        const bool golden = std::filesystem::exists(golden_path) && read_file(golden_path.string()) == one;
        ok = ok && one == two && golden;
        detail += name + (one == two ? " stable" : " UNSTABLE") + (golden ? "/golden" : "/GOLDEN MISMATCH") + "; ";
    }
    verdict(7, "determinism", ok, detail);
}

void unit_properties() {
    bool ok = true;
    std::string detail;
    for (const auto& r : {compute_seq_monotone(1000), interferes_symmetric(1000), selection_order_invariant(1000),
                          honest_choice_equivalence(1000)}) {
        ok = ok && r.cases >= 1000 && r.failures == 0;
        detail += r.name + " " + std::to_string(r.cases) + " cases " + std::to_string(r.failures) + " failures; ";
    }
    verdict(8, "protocol-unit properties", ok, detail);
}

}  // namespace

int main() {
    safety();
    exec_consistency();
    liveness();
    step_count();
    honest_soundness();
    rediscovery();
    determinism();
    unit_properties();
    return failures == 0 ? 0 : 1;
}
