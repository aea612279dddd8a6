#include "support.hpp"

using namespace ezt;

TEST_CASE("honest single command without owner changes") {
    ExploreBounds b;
    b.workload = default_workload(honest(), 1);
    b.max_owner_changes_per_instance = 0;
    auto r = explore(honest(), b, {Property::agreement, Property::validity, Property::liveness});
    CHECK(r.exhausted);
    CHECK(r.violations.empty());
    CHECK(r.states_visited == 1123);
}

TEST_CASE("byzantine T and faulty c1 at small depth") {
    const auto cfg = paper_config({"T"}, {"c1"});
    ExploreBounds b;
    b.workload = default_workload(cfg, 2, "T");
    b.max_events = 10;
    b.deepen_from = 8;
    b.stop_when_found = {Property::agreement, Property::liveness};
    auto r = explore(cfg, b, b.stop_when_found);
    REQUIRE(r.violations.size() == 2);
    for (const auto& v : r.violations) {
        CAPTURE(to_string(v.report.property));
        CHECK(v.replays);
        auto again = replay_check(v.schedule, v.report.property);
        REQUIRE(again);
        CHECK(same_report(*again, v.report));
        CHECK(v.schedule.events.size() <= v.original_events);
    }
}

TEST_CASE("enabled events") {
    auto w = World::start(honest(), default_workload(honest(), 2));
    auto evs = enabled_events(w, ExploreBounds{});
    CHECK(evs.size() == 2);
    for (const auto& e : evs) CHECK(e.kind == Event::Kind::deliver);
}

TEST_CASE("minimize") {
    const auto full = build_scenario("safety");
    const auto report = *check_agreement(observe(run(full.schedule)));
    const auto small = minimize(full.schedule, report);
    CHECK(small.events.size() <= full.schedule.events.size());
    auto again = replay_check(small, Property::agreement);
    REQUIRE(again);
    CHECK(same_report(*again, report));

    SUBCASE("already minimal") { CHECK(encode_schedule(minimize(small, report)) == encode_schedule(small)); }

    SUBCASE("an extra delivery is removed") {
        auto padded = small;
        auto prefix = small;
        prefix.events.pop_back();
        const auto w = replay_world(prefix);
        bool inserted = false;
        for (const auto& m : w.pending) {
            auto trial = small;
            Event e;
            e.kind = Event::Kind::deliver;
            e.message = m->id;
            trial.events.insert(trial.events.end() - 1, e);
            for (std::size_t i = 0; i < trial.events.size(); ++i) trial.events[i].seq_no = static_cast<std::uint32_t>(i + 1);
            auto r = replay_check(trial, Property::agreement);
            if (r && same_report(*r, report)) {
                padded = trial;
                inserted = true;
                break;
            }
        }
        REQUIRE(inserted);
        CHECK(minimize(padded, report).events.size() < padded.events.size());
    }
}

TEST_CASE("default workload") {
    auto w = default_workload(honest(), 2);
    REQUIRE(w.size() == 2);
    CHECK(honest().name(w[1].target) == "Q");
    CHECK(honest().name(default_workload(honest(), 2, "T")[1].target) == "T");
    CHECK_THROWS_AS(default_workload(honest(), 3), ConfigError);
}
