#include "support.hpp"

using namespace ezt;

namespace {

ReplicaState replica(const std::string& name) { return ReplicaState(honest().replica(name)); }

SpecOrder order(const std::string& at, const OrderingTuple& t, std::uint32_t owner = 0) {
    return {inst(at), OwnerNumber{owner}, t};
}

NodeId node(const std::string& name) { return honest().node(name); }

}  // namespace

TEST_CASE("proposal on an empty log") {
    auto r = replica("R");
    auto out = on_client_request(r, cmd("alpha"), honest());
    auto orders = bodies<SpecOrder>(out);
    REQUIRE(orders.size() == 3);
    for (const auto* o : orders) {
        CHECK(o->instance == inst("R.0"));
        CHECK(summary(o->tuple) == "<alpha,{},1>");
    }
    auto replies = bodies<SpecReply>(out);
    REQUIRE(replies.size() == 1);
    CHECK(summary(replies[0]->tuple) == "<alpha,{},1>");
    CHECK(r.next_slot == 1);

    auto q = replica("Q");
    auto qo = on_client_request(q, cmd("beta"), honest());
    CHECK(bodies<SpecOrder>(qo)[0]->instance == inst("Q.0"));
    CHECK(summary(bodies<SpecOrder>(qo)[0]->tuple) == "<beta,{},1>");
}

TEST_CASE("proposal after a committed interfering command") {
    auto r = replica("R");
    on_client_request(r, cmd("alpha"), honest());
    auto& rec = r.upsert(inst("R.0"));
    rec.status = RecordStatus::committed;
    rec.new_owner_accepted = true;

    auto out = on_client_request(r, cmd("gamma"), honest());
    auto orders = bodies<SpecOrder>(out);
    REQUIRE_FALSE(orders.empty());
    CHECK(orders[0]->instance == inst("R.1"));
    CHECK(summary(orders[0]->tuple) == "<gamma,{R.0},2>");
}

TEST_CASE("spec order attribute update") {
    SUBCASE("empty log keeps the proposal") {
        auto l = replica("L");
        auto out = on_spec_order(l, node("R"), order("R.0", tup("alpha", {}, 1)), honest());
        auto replies = bodies<SpecReply>(out);
        REQUIRE(replies.size() == 1);
        CHECK(summary(replies[0]->tuple) == "<alpha,{},1>");
        CHECK(out.out[0].to == node("c1"));
    }
    SUBCASE("Q holding beta at Q.0") {
        auto q = replica("Q");
        on_client_request(q, cmd("beta"), honest());
        auto out = on_spec_order(q, node("R"), order("R.0", tup("alpha", {}, 1)), honest());
        CHECK(summary(bodies<SpecReply>(out)[0]->tuple) == "<alpha,{Q.0},2>");
    }
    SUBCASE("R holding alpha at R.0") {
        auto r = replica("R");
        on_client_request(r, cmd("alpha"), honest());
        auto out = on_spec_order(r, node("Q"), order("Q.0", tup("beta", {}, 1), 2), honest());
        CHECK(summary(bodies<SpecReply>(out)[0]->tuple) == "<beta,{R.0},2>");
    }
    SUBCASE("sender that does not lead the instance") {
        auto l = replica("L");
        auto out = on_spec_order(l, node("Q"), order("R.0", tup("alpha", {}, 1)), honest());
        CHECK(out.out.empty());
        CHECK(out.dropped == DropReason::not_leader);
    }
    SUBCASE("occupied slot") {
        auto l = replica("L");
        on_spec_order(l, node("R"), order("R.0", tup("alpha", {}, 1)), honest());
        auto out = on_spec_order(l, node("R"), order("R.0", tup("gamma", {}, 1)), honest());
        CHECK(out.out.empty());
        CHECK(out.dropped == DropReason::slot_occupied);
    }
}

TEST_CASE("commit fast") {
    const auto t = tup("alpha", {}, 1);
    std::vector<SpecReply> four;
    for (const char* r : {"R", "L", "Q", "T"}) four.push_back(reply(r, "R.0", t));

    SUBCASE("four identical replies commit") {
        auto r = replica("R");
        on_client_request(r, cmd("alpha"), honest());
        auto out = on_commit_fast(r, CommitFast{cert(CertPath::fast, four)}, honest());
        CHECK(r.committed(inst("R.0")));
        CHECK(summary(r.find(inst("R.0"))->tuple) == "<alpha,{},1>");
        bool saw = false;
        for (const auto& e : out.effects) saw = saw || (e.kind == Effect::Kind::commit && e.detail == "commit_fast");
        CHECK(saw);
    }
    SUBCASE("three replies rejected") {
        auto r = replica("R");
        std::vector<SpecReply> three(four.begin(), four.begin() + 3);
        auto c = std::make_shared<CommitCertificate>(*cert(CertPath::fast, three));
        CHECK(validate_certificate(*c, honest()) == CertDefect::too_few_replies);
        auto out = on_commit_fast(r, CommitFast{c}, honest());
        CHECK_FALSE(r.committed(inst("R.0")));
        CHECK(out.dropped == DropReason::invalid_certificate);
    }
    SUBCASE("one reply differing in seq rejected") {
        auto r = replica("R");
        auto bad = four;
        bad[3].tuple.seq = 2;
        auto c = std::make_shared<CommitCertificate>(*cert(CertPath::fast, four));
        c->replies = bad;
        CHECK(validate_certificate(*c, honest()) == CertDefect::not_identical);
        on_commit_fast(r, CommitFast{c}, honest());
        CHECK_FALSE(r.committed(inst("R.0")));
    }
}

TEST_CASE("commit accepts a slow certificate") {
    const auto plain = tup("alpha", {}, 1);
    const auto with_beta = tup("alpha", {"T.0"}, 2);

    SUBCASE("Q re-executes the finalized tuple") {
        auto q = replica("Q");
        on_spec_order(q, node("R"), order("R.0", plain), honest());
        auto c = cert(CertPath::slow, {reply("R", "R.0", plain), reply("L", "R.0", plain), reply("T", "R.0", with_beta)});
        CHECK(summary(c->tuple) == "<alpha,{T.0},2>");
        auto out = on_commit(q, node("c1"), Commit{c->tuple, c}, honest());
        const auto* rec = q.find(inst("R.0"));
        REQUIRE(rec);
        CHECK(rec->status == RecordStatus::accepted);
        CHECK(summary(rec->tuple) == "<alpha,{T.0},2>");
        CHECK(rec->certificate == c);
        bool executed = false;
        for (const auto& e : out.effects) executed = executed || e.kind == Effect::Kind::execute;
        CHECK(executed);
        CHECK(bodies<CommitReply>(out).size() == 1);
    }
    SUBCASE("two f replies rejected") {
        auto l = replica("L");
        auto c = cert(CertPath::slow, {reply("R", "R.0", plain), reply("L", "R.0", plain)});
        auto out = on_commit(l, node("c1"), Commit{c->tuple, c}, honest());
        CHECK(out.dropped == DropReason::invalid_certificate);
        CHECK(l.find(inst("R.0")) == nullptr);
    }
    SUBCASE("tuple that is not the union is rejected") {
        auto l = replica("L");
        auto c = std::make_shared<CommitCertificate>(
            *cert(CertPath::slow, {reply("R", "R.0", plain), reply("L", "R.0", plain), reply("T", "R.0", with_beta)}));
        c->tuple = plain;
        CHECK(validate_certificate(*c, honest()) == CertDefect::deps_not_union);
    }
}

TEST_CASE("execution order") {
    auto rec = [](const std::string& at, const OrderingTuple& t) {
        InstanceRecord r;
        r.instance = inst(at);
        r.tuple = t;
        return r;
    };
    auto ids = [](const std::vector<Command>& v) {
        std::vector<std::string> out;
        for (const auto& c : v) out.push_back(c.id);
        return out;
    };
    CHECK(ids(execution_order({rec("R.0", tup("alpha", {}, 1))})) == std::vector<std::string>{"alpha"});
    CHECK(ids(execution_order({rec("Q.0", tup("beta", {}, 1)), rec("R.0", tup("alpha", {"Q.0"}, 2))})) ==
          std::vector<std::string>{"beta", "alpha"});
    CHECK(ids(execution_order({rec("Q.0", tup("beta", {}, 1)), rec("R.0", tup("alpha", {}, 1))})) ==
          std::vector<std::string>{"alpha", "beta"});
}
