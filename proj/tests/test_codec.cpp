#include "support.hpp"

using namespace ezt;

TEST_CASE("names") {
    Codec c(honest());
    CHECK(c.instance(inst("Q.0")) == "Q.0");
    CHECK(c.message_id(c.message_id("c1#0")) == "c1#0");
    CHECK(c.message_id(c.message_id("T#12")) == "T#12");
    CHECK_THROWS_AS(c.instance("X.0"), std::exception);
    CHECK_THROWS_AS(c.message_id("R-3"), FormatError);
}

TEST_CASE("tuple and certificate round trip") {
    Codec c(honest());
    const auto t = tup("alpha", {"T.0", "Q.0"}, 3);
    CHECK(tuples_equal(c.tuple(c.tuple(t)), t));
    auto cc = cert(CertPath::slow, {reply("R", "R.0", tup("alpha", {}, 1)), reply("L", "R.0", tup("alpha", {}, 1)),
                                    reply("T", "R.0", tup("alpha", {"T.0"}, 2))});
    const auto j = c.certificate(*cc);
    CHECK(c.certificate(*c.certificate(j)) == j);
}

TEST_CASE("schedule round trip") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const auto s = build_scenario(name).schedule;
        const auto j = encode_schedule(s);
        CHECK(encode_schedule(decode_schedule(j)) == j);
        CHECK(write_trace(run(decode_schedule(j))) == write_trace(run(s)));
    }
}

TEST_CASE("trace round trip") {
    const auto text = write_trace(run(build_scenario("safety").schedule));
    CHECK(write_trace(read_trace(text)) == text);
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(decode_schedule(Json::parse(R"({"config": 3})")), FormatError);
    CHECK_THROWS_AS(read_trace("not json\n"), FormatError);
    auto j = encode_schedule(build_scenario("happy").schedule);
    j["events"][1]["seq_no"] = 1;
    CHECK_THROWS_AS(decode_schedule(j), ScheduleError);
}
