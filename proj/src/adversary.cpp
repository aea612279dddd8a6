#include "ezbft/adversary.hpp"

#include <algorithm>

namespace ezbft {

const char* to_string(ByzantineChoice::Kind k) {
    switch (k) {
        case ByzantineChoice::Kind::honest: return "honest";
        case ByzantineChoice::Kind::silent: return "silent";
        case ByzantineChoice::Kind::equivocate_spec_reply: return "equivocate_spec_reply";
        case ByzantineChoice::Kind::arbitrary_owner_change_tuple: return "arbitrary_owner_change_tuple";
        case ByzantineChoice::Kind::equivocate_spec_order: return "equivocate_spec_order";
    }
    return "unknown";
}

const char* to_string(FaultyClientChoice::Kind k) {
    switch (k) {
        case FaultyClientChoice::Kind::honest: return "honest";
        case FaultyClientChoice::Kind::split_certificates: return "split_certificates";
        case FaultyClientChoice::Kind::selective_send: return "selective_send";
    }
    return "unknown";
}

void ByzantineChoice::validate() const {
    switch (kind) {
        case Kind::honest:
        case Kind::silent: return;
        case Kind::equivocate_spec_reply: {
            bool distinct = false;
            for (std::size_t i = 1; i < branches.size(); ++i) {
                if (!tuples_equal(branches[i], branches[0])) distinct = true;
            }
            if (!distinct) throw ScheduleError("equivocate_spec_reply needs at least two distinct tuples");
            return;
        }
        case Kind::arbitrary_owner_change_tuple:
            if (branches.size() != 1) {
                throw ScheduleError("arbitrary_owner_change_tuple needs exactly one tuple");
            }
            return;
        case Kind::equivocate_spec_order:
            if (branches.size() < 2 || branches.size() != recipients.size()) {
                throw ScheduleError("equivocate_spec_order needs one recipient set per branch");
            }
            return;
    }
}

void FaultyClientChoice::validate() const {
    switch (kind) {
        case Kind::honest: return;
        case Kind::split_certificates:
            if (certificates.size() < 2) throw ScheduleError("split_certificates needs two or more certificates");
            break;
        case Kind::selective_send:
            if (certificates.size() != 1) throw ScheduleError("selective_send needs exactly one certificate");
            break;
    }
    for (const auto& c : certificates) {
        if (c.reply_ids.empty()) throw ScheduleError("certificate without replies");
        if (c.recipients.empty()) throw ScheduleError("certificate without recipients");
    }
}

StepOutput byz_spec_replies(ReplicaState& state, NodeId from, const SpecOrder& msg,
                            const ByzantineChoice& choice, const Config& cfg) {
    switch (choice.kind) {
        case ByzantineChoice::Kind::silent: return {};
        case ByzantineChoice::Kind::equivocate_spec_reply: break;
        default: return on_spec_order(state, from, msg, cfg);
    }
    choice.validate();
    StepOutput out;
    auto& rec = state.upsert(msg.instance);
    rec.owner_number = msg.owner_number;
    rec.status = RecordStatus::speculated;
    for (const auto& t : choice.branches) {
        rec.tuple = t;
        SpecReply reply{state.id, msg.tuple.command.client, msg.instance, msg.owner_number, t};
        state.sent_replies.push_back(reply);
        out.out.push_back({NodeId::of(msg.tuple.command.client), reply});
    }
    reexecute(state, out);
    return out;
}

StepOutput byz_propose(ReplicaState& state, const Command& cmd, const ByzantineChoice& choice,
                       const Config& cfg) {
    switch (choice.kind) {
        case ByzantineChoice::Kind::silent: return {};
        case ByzantineChoice::Kind::equivocate_spec_order: break;
        default: return on_client_request(state, cmd, cfg);
    }
    choice.validate();
    const InstanceId instance{state.id, state.next_slot++};
    const OwnerNumber owner = cfg.default_owner_number(instance);
    auto& rec = state.upsert(instance);
    rec.tuple = choice.branches.front();
    rec.owner_number = owner;
    rec.status = RecordStatus::speculated;

    StepOutput out;
    for (std::size_t i = 0; i < choice.branches.size(); ++i) {
        for (auto r : choice.recipients[i]) {
            if (r != state.id) out.out.push_back({NodeId::of(r), SpecOrder{instance, owner, choice.branches[i]}});
        }
    }
    SpecReply reply{state.id, cmd.client, instance, owner, rec.tuple};
    state.sent_replies.push_back(reply);
    out.out.push_back({NodeId::of(cmd.client), reply, 1});
    reexecute(state, out);
    return out;
}

StepOutput byz_owner_change_vote(ReplicaState& state, InstanceId instance, const ByzantineChoice& choice,
                                 const Config& cfg) {
    switch (choice.kind) {
        case ByzantineChoice::Kind::silent: return {};
        case ByzantineChoice::Kind::arbitrary_owner_change_tuple: break;
        default: return trigger_owner_change(state, instance, cfg);
    }
    choice.validate();
    const OwnerNumber target = choice.target.value_or(OwnerNumber{state.owner_number(instance, cfg).value + 1});
    if (target > state.owner_number(instance, cfg)) state.set_owner_number(instance, target, cfg);

    const OrderingTuple& tuple = choice.branches.front();
    OwnerChangeVote vote;
    vote.sender = state.id;
    vote.instance = instance;
    vote.owner_number = target;
    vote.accepted_tuple = tuple;
    // Attach only evidence this replica holds that matches the claimed tuple.
    for (auto it = state.sent_replies.rbegin(); it != state.sent_replies.rend(); ++it) {
        if (it->instance == instance && it->owner_number < target && tuples_equal(it->tuple, tuple)) {
            vote.spec_reply = *it;
            break;
        }
    }
    if (const auto* rec = state.find(instance);
        rec && rec->certificate && tuples_equal(rec->certificate->tuple, tuple)) {
        vote.certificate = rec->certificate;
    }
    for (auto d : tuple.deps) {
        DepEvidence e;
        e.instance = d;
        if (const auto* r = state.own_reply(d)) e.spec_reply = *r;
        if (const auto* dr = state.find(d)) e.certificate = dr->certificate;
        if (e.spec_reply || e.certificate) vote.dep_evidence.push_back(std::move(e));
    }

    const ReplicaId leader = cfg.leader_of(target);
    if (leader == state.id) return on_owner_change(state, vote, cfg);
    StepOutput out;
    out.out.push_back({NodeId::of(leader), OwnerChange{std::move(vote)}});
    return out;
}

StepOutput faulty_client_certificates(ClientState& state, const FaultyClientChoice& choice, const Config& cfg) {
    if (choice.kind == FaultyClientChoice::Kind::honest) {
        // Exactly what a correct client would send now.
        auto fast = try_fast_path(state, cfg);
        if (!fast.out.empty()) return fast;
        return on_timeout(state, cfg);
    }

    choice.validate();
    StepOutput out;
    for (const auto& spec : choice.certificates) {
        auto cert = std::make_shared<CommitCertificate>();
        cert->path = spec.path;
        for (const auto& mid : spec.reply_ids) {
            const auto* r = state.reply_by_id(mid);
            if (!r) throw ForgedReply("client " + std::to_string(state.id.index) + " never received reply #" +
                                      std::to_string(mid.counter));
            cert->replies.push_back(*r);
        }
        cert->instance = cert->replies.front().instance;
        cert->owner_number = cert->replies.front().owner_number;
        cert->tuple = spec.path == CertPath::fast ? cert->replies.front().tuple : finalize_tuple(cert->replies, cfg);
        state.certificates_sent.push_back(cert);
        for (auto r : spec.recipients) {
            if (spec.path == CertPath::fast) {
                out.out.push_back({NodeId::of(r), CommitFast{cert}});
            } else {
                out.out.push_back({NodeId::of(r), Commit{cert->tuple, cert}});
            }
        }
    }
    if (state.phase == ClientState::Phase::speculating) state.phase = ClientState::Phase::finalizing;
    state.timer_armed = false;
    return out;
}

}  // namespace ezbft
