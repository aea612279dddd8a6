#include "support.hpp"

#include <filesystem>

using namespace ezt;

TEST_CASE("scenarios reproduce their expected reports") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        auto res = run_scenario(build_scenario(name));
        CHECK(res.matches);
    }
    CHECK_THROWS_AS(build_scenario("nope"), UnknownScenario);
}

TEST_CASE("safety scenario end state") {
    auto t = run(build_scenario("safety").schedule);
    std::map<std::string, std::pair<std::string, std::string>> at_r0;
    for (const auto& e : effects_of(t, Effect::Kind::commit)) {
        if (e.instance == inst("R.0") && e.node.is_replica() && honest().is_correct(e.node.replica())) {
            at_r0[honest().name(e.node)] = {summary(e.tuple), e.detail};
        }
    }
    CHECK(at_r0["R"] == std::make_pair(std::string("<alpha,{},1>"), std::string("commit_fast")));
    CHECK(at_r0["L"] == std::make_pair(std::string("<alpha,{T.0},2>"), std::string("new_owner")));
    CHECK(at_r0["Q"] == std::make_pair(std::string("<alpha,{T.0},2>"), std::string("new_owner")));
}

TEST_CASE("liveness scenario ends in conflict") {
    auto t = run(build_scenario("liveness").schedule);
    auto sel = effects_of(t, Effect::Kind::selection);
    REQUIRE_FALSE(sel.empty());
    const auto& last = sel.back();
    CHECK(last.outcome == SelectionOutcome::conflict);
    REQUIRE(last.rival);
    std::set<std::string> pair{summary(last.tuple), summary(*last.rival)};
    CHECK(pair == std::set<std::string>{"<alpha,{},1>", "<alpha,{T.0},2>"});
}

TEST_CASE("exec-consistency has no faulty participants") {
    auto s = build_scenario("exec-consistency").schedule;
    CHECK(s.config.byzantine_ids.empty());
    CHECK(s.config.faulty_client_ids.empty());
}

TEST_CASE("golden traces") {
    const std::filesystem::path dir = EZBFT_SOURCE_DIR "/scenarios";
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const auto schedule = load_schedule((dir / (name + ".json")).string());
        CHECK(encode_schedule(schedule) == encode_schedule(build_scenario(name).schedule));
        CHECK(write_trace(run(schedule)) == read_file((dir / (name + ".jsonl")).string()));
    }
}
