#include "support.hpp"

using namespace ezt;

namespace {

Schedule happy() { return build_scenario("happy").schedule; }

Event deliver(const std::string& id) {
    Event e;
    e.kind = Event::Kind::deliver;
    e.message = Codec(honest()).message_id(id);
    return e;
}

}  // namespace

TEST_CASE("empty schedule") {
    Schedule s{honest(), {}, {}};
    auto t = run(s);
    CHECK(t.steps.empty());
    CHECK(t.initial.empty());
    CHECK(replay_world(s).pending.empty());
}

TEST_CASE("happy path commits everywhere") {
    auto t = run(happy());
    auto commits = effects_of(t, Effect::Kind::commit);
    std::set<std::string> at;
    for (const auto& c : commits) {
        CHECK(summary(c.tuple) == "<alpha,{},1>");
        CHECK(c.detail == "commit_fast");
        at.insert(honest().name(c.node));
    }
    CHECK(at == std::set<std::string>{"R", "L", "Q", "T"});
    CHECK(replay_world(happy()).pending.empty());
}

TEST_CASE("pending after the leader's broadcast") {
    auto w = World::start(honest(), {{cmd("alpha"), honest().replica("R")}});
    CHECK(w.pending_messages().size() == 1);
    w.apply(deliver("c1#0"));
    std::map<std::string, int> kinds;
    for (const auto& m : w.pending) kinds[kind_name(m->body)]++;
    CHECK(kinds["spec_order"] == 3);
    CHECK(kinds["spec_reply"] == 1);
    CHECK(w.pending.size() == 4);
}

TEST_CASE("unknown message is a schedule error") {
    auto w = World::start(honest(), {{cmd("alpha"), honest().replica("R")}});
    CHECK_THROWS_AS(w.apply(deliver("R#7")), ScheduleError);
}

TEST_CASE("workload validation") {
    CHECK_THROWS_AS(World::start(honest(), {{cmd("alpha"), honest().replica("R")}, {cmd("alpha"), honest().replica("L")}}),
                    ConfigError);
}

TEST_CASE("fast path takes two communication steps") {
    auto t = run(happy());
    std::uint32_t request_step = 0;
    for (const auto& m : t.initial) request_step = m->step;
    std::vector<std::uint32_t> fast_steps;
    for (const auto& s : t.steps) {
        for (const auto& m : s.emitted) {
            if (std::holds_alternative<CommitFast>(m->body)) fast_steps.push_back(m->step);
        }
    }
    REQUIRE(fast_steps.size() == 4);
    for (auto s : fast_steps) CHECK(s - request_step - 1 == 2);
}

TEST_CASE("runs are deterministic") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const auto s = build_scenario(name).schedule;
        CHECK(write_trace(run(s)) == write_trace(run(s)));
    }
}

TEST_CASE("every message has a producing step") {
    auto t = run(build_scenario("safety").schedule);
    std::set<std::string> produced;
    Codec codec(honest());
    for (const auto& m : t.initial) produced.insert(codec.message_id(m->id));
    for (const auto& s : t.steps) {
        if (s.event.kind == Event::Kind::deliver) CHECK(produced.count(codec.message_id(*s.event.message)) == 1);
        for (const auto& m : s.emitted) produced.insert(codec.message_id(m->id));
    }
}

TEST_CASE("digests ignore delivery annotations") {
    auto a = World::start(honest(), {{cmd("alpha"), honest().replica("R")}, {cmd("beta"), honest().replica("Q")}});
    auto b = a;
    a.apply(deliver("c1#0"));
    a.apply(deliver("c2#0"));
    b.apply(deliver("c2#0"));
    b.apply(deliver("c1#0"));
    CHECK(a.digest() == b.digest());
    a.apply(deliver("R#0"));
    CHECK_FALSE(a.digest() == b.digest());
}
