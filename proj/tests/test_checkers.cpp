#include "support.hpp"

using namespace ezt;

namespace {

Observations observed(const std::string& name) { return observe(run(build_scenario(name).schedule)); }

}  // namespace

TEST_CASE("agreement") {
    auto r = check_agreement(observed("safety"));
    REQUIRE(r);
    CHECK(witness_summary(*r, honest()) == "R@R.0=<alpha,{},1>; L@R.0=<alpha,{T.0},2>; Q@R.0=<alpha,{T.0},2>");
    CHECK(verify_report(*r, honest(), {"alpha", "beta"}));
    CHECK_FALSE(check_agreement(observed("happy")));
    CHECK_FALSE(check_agreement(observed("exec-consistency")));
}

TEST_CASE("dependency inclusion") {
    auto r = check_dependency_inclusion(observed("exec-consistency"));
    REQUIRE(r);
    CHECK(witness_summary(*r, honest()) == "R@R.0=<alpha,{},1>; R@Q.0=<beta,{},1>");
    CHECK_FALSE(check_dependency_inclusion(observed("happy")));

    auto obs = observed("exec-consistency");
    for (auto& [key, c] : obs.commits) {
        if (key.second == inst("Q.0")) c.tuple = tup("beta", {"R.0"}, 2);
    }
    CHECK_FALSE(check_dependency_inclusion(obs));
}

TEST_CASE("execution consistency") {
    auto r = check_execution_consistency(observed("exec-consistency"));
    REQUIRE(r);
    CHECK(r->property == Property::execution_consistency);
    CHECK_FALSE(check_execution_consistency(observed("happy")));

    Observations obs = observed("happy");
    std::vector<ExecutedEntry> order{{"beta", inst("Q.0"), 1, {}, ""}, {"alpha", inst("R.0"), 2, {inst("Q.0")}, ""}};
    for (auto& [r2, log] : obs.executed) log = order;
    obs.commits.clear();
    for (auto rid : honest().replicas()) {
        obs.commits[{rid, inst("Q.0")}] = {tup("beta", {}, 1), "commit_fast", 1};
        obs.commits[{rid, inst("R.0")}] = {tup("alpha", {"Q.0"}, 2), "commit_fast", 1};
    }
    CHECK_FALSE(check_execution_consistency(obs));
}

TEST_CASE("liveness") {
    auto r = check_liveness(observed("liveness"));
    REQUIRE(r);
    CHECK(witness_summary(*r, honest()) == "L@R.0=<alpha,{},1>; L@R.0=<alpha,{T.0},2>");
    CHECK_FALSE(check_liveness(observed("happy")));
    CHECK_FALSE(check_liveness(observed("safety")));

    auto no_tail = build_scenario("happy").schedule;
    no_tail.events.pop_back();
    CHECK_THROWS_AS(check_liveness(observe(run(no_tail))), PreconditionUnmet);
}

TEST_CASE("validity") {
    CHECK_FALSE(check_validity(observed("happy")));
    CHECK_FALSE(check_validity(observed("safety")));

    // A commit of a command no client proposed.
    auto t = run(build_scenario("happy").schedule);
    for (auto& s : t.steps) {
        for (auto& e : s.effects) {
            if (e.kind == Effect::Kind::commit && honest().name(e.node) == "Q") e.tuple.command.id = "zeta";
        }
    }
    auto r = check_validity(observe(t));
    REQUIRE(r);
    CHECK(r->witnesses.size() == 1);
    CHECK(r->witnesses[0].tuple.command.id == "zeta");
}

TEST_CASE("checkers only see correct replicas") {
    auto obs = observed("safety");
    for (const auto& [key, c] : obs.commits) CHECK(honest().name(key.first) != "T");
}

TEST_CASE("report codec") {
    auto r = *check_agreement(observed("safety"));
    const auto j = encode_report(r, honest());
    CHECK(j["summary"] == witness_summary(r, honest()));
    CHECK(same_report(decode_report(j, honest()), r));
}

TEST_CASE("property names") {
    CHECK(parse_properties("agreement,liveness").size() == 2);
    CHECK_THROWS_AS(parse_property("safety"), FormatError);
    for (auto p : all_properties()) CHECK(parse_property(to_string(p)) == p);
}
