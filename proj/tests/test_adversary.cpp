#include "support.hpp"

using namespace ezt;

namespace {

const OrderingTuple plain = tup("alpha", {}, 1);
const OrderingTuple with_beta = tup("alpha", {"T.0"}, 2);

MessageId mid(const std::string& from, std::uint32_t n) { return {honest().node(from), n}; }

ClientState holding(std::vector<std::pair<MessageId, SpecReply>> replies) {
    ClientState c(honest().client("c1"));
    submit(c, cmd("alpha"), honest().replica("R"));
    for (const auto& [m, r] : replies) record_spec_reply(c, m, r);
    return c;
}

// R, L, Q and T's first reply agree; T's second cites T.0.
ClientState safety_client() {
    return holding({{mid("R", 3), reply("R", "R.0", plain)},
                    {mid("L", 0), reply("L", "R.0", plain)},
                    {mid("Q", 0), reply("Q", "R.0", plain)},
                    {mid("T", 4), reply("T", "R.0", plain)},
                    {mid("T", 5), reply("T", "R.0", with_beta)}});
}

}  // namespace

TEST_CASE("byzantine spec replies") {
    const SpecOrder order{inst("R.0"), OwnerNumber{0}, plain};
    SUBCASE("equivocation sends one reply per branch") {
        ReplicaState t(honest().replica("T"));
        ByzantineChoice ch{ByzantineChoice::Kind::equivocate_spec_reply, {plain, with_beta}, {}, {}, {}};
        auto replies_out = byz_spec_replies(t, honest().node("R"), order, ch, honest());
        auto replies = bodies<SpecReply>(replies_out);
        REQUIRE(replies.size() == 2);
        CHECK(summary(replies[0]->tuple) == "<alpha,{},1>");
        CHECK(summary(replies[1]->tuple) == "<alpha,{T.0},2>");
    }
    SUBCASE("silent") {
        ReplicaState t(honest().replica("T"));
        ByzantineChoice ch{ByzantineChoice::Kind::silent, {}, {}, {}, {}};
        CHECK(byz_spec_replies(t, honest().node("R"), order, ch, honest()).out.empty());
    }
    SUBCASE("honest on an empty log") {
        ReplicaState t(honest().replica("T"));
        auto replies_out = byz_spec_replies(t, honest().node("R"), order, {}, honest());
        auto replies = bodies<SpecReply>(replies_out);
        REQUIRE(replies.size() == 1);
        CHECK(summary(replies[0]->tuple) == "<alpha,{},1>");
    }
    SUBCASE("equivocation needs two distinct tuples") {
        ByzantineChoice ch{ByzantineChoice::Kind::equivocate_spec_reply, {plain, plain}, {}, {}, {}};
        CHECK_THROWS_AS(ch.validate(), ScheduleError);
    }
}

TEST_CASE("faulty client splits certificates") {
    SUBCASE("fast to R, slow to Q") {
        auto c = safety_client();
        FaultyClientChoice ch;
        ch.kind = FaultyClientChoice::Kind::split_certificates;
        ch.certificates = {{CertPath::fast, {mid("R", 3), mid("L", 0), mid("Q", 0), mid("T", 4)}, {honest().replica("R")}},
                           {CertPath::slow, {mid("R", 3), mid("L", 0), mid("T", 5)}, {honest().replica("Q")}}};
        auto out = faulty_client_certificates(c, ch, honest());
        REQUIRE(out.out.size() == 2);
        CHECK(out.out[0].to == honest().node("R"));
        CHECK(summary(std::get<CommitFast>(out.out[0].body).certificate->tuple) == "<alpha,{},1>");
        CHECK(out.out[1].to == honest().node("Q"));
        CHECK(summary(std::get<Commit>(out.out[1].body).tuple) == "<alpha,{T.0},2>");
    }
    SUBCASE("two slow certificates to R and L") {
        auto c = holding({{mid("R", 3), reply("R", "R.0", plain)},
                          {mid("L", 0), reply("L", "R.0", plain)},
                          {mid("Q", 0), reply("Q", "R.0", plain)},
                          {mid("T", 4), reply("T", "R.0", with_beta)}});
        FaultyClientChoice ch;
        ch.kind = FaultyClientChoice::Kind::split_certificates;
        ch.certificates = {{CertPath::slow, {mid("R", 3), mid("L", 0), mid("Q", 0)}, {honest().replica("R")}},
                           {CertPath::slow, {mid("R", 3), mid("L", 0), mid("T", 4)}, {honest().replica("L")}}};
        auto commits_out = faulty_client_certificates(c, ch, honest());
        auto commits = bodies<Commit>(commits_out);
        REQUIRE(commits.size() == 2);
        CHECK(summary(commits[0]->tuple) == "<alpha,{},1>");
        CHECK(summary(commits[1]->tuple) == "<alpha,{T.0},2>");
    }
    SUBCASE("a reply never received is a forgery") {
        auto c = safety_client();
        FaultyClientChoice ch;
        ch.kind = FaultyClientChoice::Kind::selective_send;
        ch.certificates = {{CertPath::slow, {mid("R", 3), mid("L", 0), mid("Q", 9)}, {honest().replica("R")}}};
        CHECK_THROWS_AS(faulty_client_certificates(c, ch, honest()), ForgedReply);
    }
    SUBCASE("honest choice matches the correct client") {
        auto a = holding({{mid("R", 3), reply("R", "R.0", plain)},
                          {mid("L", 0), reply("L", "R.0", plain)},
                          {mid("Q", 0), reply("Q", "R.0", with_beta)}});
        auto b = a;
        auto faulty = faulty_client_certificates(a, {}, honest());
        auto correct = on_timeout(b, honest());
        REQUIRE(faulty.out.size() == correct.out.size());
        for (std::size_t i = 0; i < faulty.out.size(); ++i) {
            CHECK(faulty.out[i].to == correct.out[i].to);
            CHECK(summary(std::get<Commit>(faulty.out[i].body).tuple) ==
                  summary(std::get<Commit>(correct.out[i].body).tuple));
        }
    }
}

TEST_CASE("byzantine owner change vote") {
    ReplicaState t(honest().replica("T"));
    on_client_request(t, cmd("beta"), honest());
    byz_spec_replies(t, honest().node("R"), SpecOrder{inst("R.0"), OwnerNumber{0}, plain},
                     ByzantineChoice{ByzantineChoice::Kind::equivocate_spec_reply, {plain, with_beta}, {}, {}, {}},
                     honest());

    SUBCASE("arbitrary tuple") {
        ByzantineChoice ch{ByzantineChoice::Kind::arbitrary_owner_change_tuple, {with_beta}, {}, {}, {}};
        auto out = byz_owner_change_vote(t, inst("R.0"), ch, honest());
        REQUIRE(out.out.size() == 1);
        CHECK(out.out[0].to == honest().node("L"));
        const auto& v = std::get<OwnerChange>(out.out[0].body).vote;
        REQUIRE(v.accepted_tuple);
        CHECK(summary(*v.accepted_tuple) == "<alpha,{T.0},2>");
        CHECK(v.certificate == nullptr);
    }
    SUBCASE("silent") {
        ByzantineChoice ch{ByzantineChoice::Kind::silent, {}, {}, {}, {}};
        CHECK(byz_owner_change_vote(t, inst("R.0"), ch, honest()).out.empty());
    }
    SUBCASE("honest") {
        auto out = byz_owner_change_vote(t, inst("R.0"), {}, honest());
        REQUIRE(out.out.size() == 1);
        const auto& v = std::get<OwnerChange>(out.out[0].body).vote;
        REQUIRE(v.accepted_tuple);
        CHECK(summary(*v.accepted_tuple) == "<alpha,{T.0},2>");
    }
}
