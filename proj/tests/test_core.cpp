#include "support.hpp"

using namespace ezt;

TEST_CASE("config validation") {
    Config c = honest();
    CHECK_NOTHROW(c.validate());
    CHECK(c.fast_quorum() == 4);
    CHECK(c.slow_quorum() == 3);
    CHECK(c.owner_change_quorum() == 3);
    CHECK(c.weak_quorum() == 2);

    Config bad = c;
    bad.n = 5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.byzantine_ids = {ReplicaId{0}, ReplicaId{1}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.replica_ids[1] = "R";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("leader rotation") {
    const auto& c = honest();
    CHECK(c.name(c.leader_of(OwnerNumber{0})) == "R");
    CHECK(c.name(c.leader_of(OwnerNumber{1})) == "L");
    CHECK(c.name(c.leader_of(OwnerNumber{3})) == "T");
    CHECK(c.name(c.leader_of(OwnerNumber{4})) == "R");
    CHECK(c.default_owner_number(inst("Q.0")).value == 2);
}

TEST_CASE("interferes") {
    CHECK(interferes(cmd("alpha"), cmd("beta")));
    CHECK_FALSE(interferes(cmd("alpha"), cmd("alpha")));
    CHECK_FALSE(interferes(cmd("alpha", "k1"), cmd("delta", "k2")));
    CHECK_FALSE(interferes(Command::noop(), cmd("beta")));
}

TEST_CASE("compute_seq") {
    CHECK(compute_seq({}, {}) == 1);

    KnownTuples known{{inst("Q.0"), tup("beta", {}, 1)}};
    CHECK(compute_seq({inst("Q.0")}, known) == 2);

    known = {{inst("R.0"), tup("alpha", {}, 3)}, {inst("L.0"), tup("beta", {}, 7)}};
    CHECK(compute_seq({inst("R.0"), inst("L.0")}, known) == 8);

    CHECK_THROWS_AS(compute_seq({inst("T.0")}, known), MissingDependency);
    CHECK(compute_seq_known({inst("T.0"), inst("R.0")}, known) == 4);
}

TEST_CASE("tuples_equal") {
    CHECK(tuples_equal(tup("alpha", {}, 1), tup("alpha", {}, 1)));
    CHECK_FALSE(tuples_equal(tup("alpha", {}, 1), tup("alpha", {"T.0"}, 2)));
    CHECK(tuples_equal(tup("alpha", {"R.1", "Q.0"}, 3), tup("alpha", {"Q.0", "R.1"}, 3)));
    CHECK_FALSE(tuples_equal(tup("alpha", {}, 1), tup("alpha", {}, 2)));
}

TEST_CASE("dep sets") {
    DepSet a{inst("Q.0"), inst("R.0")};
    DepSet b{inst("R.0")};
    CHECK(b.is_subset_of(a));
    CHECK_FALSE(a.is_subset_of(b));
    CHECK(a.minus(b) == DepSet{inst("Q.0")});
    b.merge(DepSet{inst("T.0")});
    CHECK(b.size() == 2);
    CHECK(b.contains(inst("T.0")));
}

TEST_CASE("digest hex") {
    Hasher h;
    h.str("alpha");
    const auto d = h.finish();
    CHECK(d.hex().size() == 32);
    Hasher g;
    g.str("alpha");
    CHECK(g.finish() == d);
}
