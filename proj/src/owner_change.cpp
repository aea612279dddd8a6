#include "ezbft/owner_change.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ezbft {

const char* to_string(SafeSelection::Basis b) {
    switch (b) {
        case SafeSelection::Basis::none: return "none";
        case SafeSelection::Basis::condition1: return "condition1";
        case SafeSelection::Basis::condition2: return "condition2";
        case SafeSelection::Basis::extension_rule1: return "extension_rule1";
        case SafeSelection::Basis::extension_rule2: return "extension_rule2";
    }
    return "unknown";
}

namespace {

Digest vote_digest(const OwnerChangeVote& v) {
    Hasher h;
    hash_append(h, v);
    return h.finish();
}

/// One vote per sender; a sender that voted twice contributes the vote with the
/// smallest digest so the result does not depend on arrival order.
std::vector<const OwnerChangeVote*> canonical_votes(const std::vector<OwnerChangeVote>& votes) {
    std::map<ReplicaId, std::pair<Digest, const OwnerChangeVote*>> by_sender;
    for (const auto& v : votes) {
        const Digest d = vote_digest(v);
        auto [it, inserted] = by_sender.try_emplace(v.sender, d, &v);
        if (!inserted && std::tie(d.hi, d.lo) < std::tie(it->second.first.hi, it->second.first.lo)) {
            it->second = {d, &v};
        }
    }
    std::vector<const OwnerChangeVote*> out;
    for (const auto& [_, p] : by_sender) out.push_back(p.second);
    return out;
}

void add_unique(std::vector<OrderingTuple>& set, const OrderingTuple& t) {
    for (const auto& s : set) {
        if (tuples_equal(s, t)) return;
    }
    set.push_back(t);
}

bool contains(const std::vector<OrderingTuple>& set, const OrderingTuple& t) {
    return std::any_of(set.begin(), set.end(), [&](const auto& s) { return tuples_equal(s, t); });
}

/// Evidence about one instance: which replicas replied at which owner number
/// and which certificates vouch for what.
struct InstanceEvidence {
    std::vector<std::pair<ReplicaId, SpecReply>> replies;
    std::vector<const CommitCertificate*> certificates;

    std::optional<OwnerNumber> highest() const {
        std::optional<OwnerNumber> h;
        for (const auto& [_, r] : replies) h = std::max(h.value_or(r.owner_number), r.owner_number);
        for (const auto* c : certificates) h = std::max(h.value_or(c->owner_number), c->owner_number);
        return h;
    }
};

class Evidence {
  public:
    Evidence(const std::vector<const OwnerChangeVote*>& votes, const Config& cfg) : cfg_(cfg) {
        for (const auto* v : votes) {
            if (v->spec_reply) add_reply(v->instance, v->sender, *v->spec_reply);
            if (v->certificate) add_certificate(v->instance, *v->certificate);
            for (const auto& e : v->dep_evidence) {
                if (e.spec_reply) add_reply(e.instance, v->sender, *e.spec_reply);
                if (e.certificate) add_certificate(e.instance, *e.certificate);
            }
        }
    }

    const InstanceEvidence* about(InstanceId i) const {
        auto it = by_instance_.find(i);
        return it == by_instance_.end() ? nullptr : &it->second;
    }

    /// Distinct repliers for `i` at its highest owner number.
    std::size_t replies_at_highest(InstanceId i) const {
        const auto* ev = about(i);
        if (!ev) return 0;
        const auto h = ev->highest();
        std::set<ReplicaId> senders;
        for (const auto& [sender, r] : ev->replies) {
            if (r.owner_number == h) senders.insert(sender);
        }
        return senders.size();
    }

    bool certified_at_highest(InstanceId i) const {
        const auto* ev = about(i);
        if (!ev) return false;
        const auto h = ev->highest();
        return std::any_of(ev->certificates.begin(), ev->certificates.end(),
                           [&](const CommitCertificate* c) { return c->owner_number == h; });
    }

  private:
    void add_reply(InstanceId i, ReplicaId sender, const SpecReply& r) {
        // Only the voter's own reply counts: channels are authenticated, but a
        // vote may not pass off another replica's reply as its own.
        if (r.replica != sender || r.instance != i) return;
        by_instance_[i].replies.emplace_back(sender, r);
    }
    void add_certificate(InstanceId i, const CommitCertificate& c) {
        if (c.instance != i || validate_certificate(c, cfg_) != CertDefect::none) return;
        by_instance_[i].certificates.push_back(&c);
    }

    const Config& cfg_;
    std::map<InstanceId, InstanceEvidence> by_instance_;
};

}  // namespace

SafeSelection select_safe_tuple(const std::vector<OwnerChangeVote>& votes, const Config& cfg) {
    if (votes.empty()) throw InsufficientVotes("no OWNER-CHANGE votes");
    const InstanceId instance = votes.front().instance;
    const OwnerNumber target = votes.front().owner_number;
    for (const auto& v : votes) {
        if (v.instance != instance || v.owner_number != target) {
            throw InsufficientVotes("votes disagree on instance or owner number");
        }
    }
    const auto canonical = canonical_votes(votes);
    if (canonical.size() < cfg.owner_change_quorum()) {
        throw InsufficientVotes("need " + std::to_string(cfg.owner_change_quorum()) +
                                " distinct voters, have " + std::to_string(canonical.size()));
    }

    SafeSelection sel;
    sel.instance = instance;
    sel.target = target;

    const Evidence evidence(canonical, cfg);
    const auto* own = evidence.about(instance);
    const auto highest = own ? own->highest() : std::nullopt;
    if (!highest) return sel;
    sel.highest = *highest;

    std::vector<OrderingTuple> cond1;
    for (const auto* c : own->certificates) {
        if (c->owner_number == *highest) add_unique(cond1, c->tuple);
    }
    std::vector<OrderingTuple> cond2;
    {
        std::vector<std::pair<OrderingTuple, std::set<ReplicaId>>> tally;
        for (const auto& [sender, r] : own->replies) {
            if (r.owner_number != *highest) continue;
            auto it = std::find_if(tally.begin(), tally.end(),
                                   [&](const auto& p) { return tuples_equal(p.first, r.tuple); });
            if (it == tally.end()) {
                tally.push_back({r.tuple, {sender}});
            } else {
                it->second.insert(sender);
            }
        }
        for (const auto& [t, senders] : tally) {
            if (senders.size() >= cfg.weak_quorum()) cond2.push_back(t);
        }
    }
    std::sort(cond1.begin(), cond1.end(), tuple_less);
    std::sort(cond2.begin(), cond2.end(), tuple_less);

    std::vector<OrderingTuple> candidates = cond1;
    for (const auto& t : cond2) add_unique(candidates, t);
    std::sort(candidates.begin(), candidates.end(), tuple_less);

    // Which extension rule (if any) makes `pj` a valid extension of `pi`.
    auto valid_extension = [&](const OrderingTuple& pj, const OrderingTuple& pi) {
        using B = SafeSelection::Basis;
        if (pj.command.id != pi.command.id || pj.deps == pi.deps || !pi.deps.is_subset_of(pj.deps)) {
            return B::none;
        }
        const DepSet added = pj.deps.minus(pi.deps);
        if (contains(cond1, pj) &&
            std::all_of(added.begin(), added.end(), [&](InstanceId g) {
                return evidence.replies_at_highest(g) >= cfg.weak_quorum();
            })) {
            return B::extension_rule1;
        }
        if (contains(cond2, pj) && std::all_of(added.begin(), added.end(), [&](InstanceId g) {
                return evidence.certified_at_highest(g);
            })) {
            return B::extension_rule2;
        }
        return B::none;
    };

    if (cond1.size() >= 2) {
        for (const auto& p : candidates) {
            auto basis = SafeSelection::Basis::condition1;
            const bool covers_all = std::all_of(cond1.begin(), cond1.end(), [&](const auto& q) {
                if (tuples_equal(p, q)) return true;
                auto b = valid_extension(p, q);
                if (b != SafeSelection::Basis::none) basis = b;
                return b != SafeSelection::Basis::none;
            });
            if (covers_all) {
                sel.outcome = SelectionOutcome::safe;
                sel.tuple = p;
                sel.basis = basis;
                return sel;
            }
        }
        sel.outcome = SelectionOutcome::conflict;
        sel.tuple = cond1[0];
        sel.rival = cond1[1];
        return sel;
    }

    if (!cond1.empty()) {
        sel.tuple = cond1.front();
        sel.basis = SafeSelection::Basis::condition1;
    } else if (!cond2.empty()) {
        sel.tuple = cond2.front();
        sel.basis = SafeSelection::Basis::condition2;
    } else {
        return sel;
    }
    sel.outcome = SelectionOutcome::safe;

    // Follow valid extensions; each step strictly grows deps, so this ends.
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& p : candidates) {
            if (auto b = valid_extension(p, sel.tuple); b != SafeSelection::Basis::none) {
                sel.tuple = p;
                sel.basis = b;
                grew = true;
                break;
            }
        }
    }
    return sel;
}

NewOwner issue_new_owner(const SafeSelection& selection, const std::vector<OwnerChangeVote>& votes,
                         ReplicaId new_owner, const Config& cfg) {
    if (selection.outcome == SelectionOutcome::conflict) {
        throw CannotProceed("conflicting certificates at the highest owner number; no rule applies");
    }
    if (cfg.leader_of(selection.target) != new_owner) {
        throw CannotProceed("replica does not lead the target owner number");
    }
    NewOwner msg;
    msg.instance = selection.instance;
    msg.owner_number = selection.target;
    msg.tuple = selection.outcome == SelectionOutcome::safe ? selection.tuple : OrderingTuple::noop();
    msg.proof = votes;
    return msg;
}

OwnerChangeVote make_vote(const ReplicaState& state, InstanceId instance, OwnerNumber target) {
    OwnerChangeVote vote;
    vote.sender = state.id;
    vote.instance = instance;
    vote.owner_number = target;
    if (const auto* rec = state.find(instance)) {
        vote.accepted_tuple = rec->tuple;
        vote.certificate = rec->certificate;
        for (auto d : rec->tuple.deps) {
            DepEvidence e;
            e.instance = d;
            if (const auto* r = state.own_reply(d)) e.spec_reply = *r;
            if (const auto* dr = state.find(d)) e.certificate = dr->certificate;
            if (e.spec_reply || e.certificate) vote.dep_evidence.push_back(std::move(e));
        }
    }
    if (const auto* r = state.own_reply(instance); r && r->owner_number < target) {
        vote.spec_reply = *r;
    }
    return vote;
}

StepOutput trigger_owner_change(ReplicaState& state, InstanceId instance, const Config& cfg) {
    const OwnerNumber target{state.owner_number(instance, cfg).value + 1};
    state.set_owner_number(instance, target, cfg);
    auto vote = make_vote(state, instance, target);
    const ReplicaId leader = cfg.leader_of(target);
    if (leader == state.id) return on_owner_change(state, vote, cfg);
    StepOutput out;
    out.out.push_back({NodeId::of(leader), OwnerChange{std::move(vote)}});
    return out;
}

StepOutput on_owner_change(ReplicaState& state, const OwnerChangeVote& vote, const Config& cfg) {
    StepOutput out;
    auto drop = [&](DropReason reason) {
        Effect e;
        e.kind = Effect::Kind::drop;
        e.node = NodeId::of(state.id);
        e.instance = vote.instance;
        e.detail = to_string(reason);
        out.effects.push_back(std::move(e));
        out.dropped = reason;
        return out;
    };
    if (cfg.leader_of(vote.owner_number) != state.id) return drop(DropReason::not_leader);

    auto it = std::find_if(state.rounds.begin(), state.rounds.end(), [&](const LeaderRound& r) {
        return r.instance == vote.instance && r.target == vote.owner_number;
    });
    if (it == state.rounds.end()) {
        state.rounds.push_back({vote.instance, vote.owner_number, {}, LeaderRound::Status::collecting});
        it = std::prev(state.rounds.end());
    }
    auto& round = *it;
    if (round.status == LeaderRound::Status::issued) return out;
    if (std::any_of(round.votes.begin(), round.votes.end(),
                    [&](const auto& v) { return v.sender == vote.sender; })) {
        return out;
    }
    round.votes.push_back(vote);
    if (round.votes.size() < cfg.owner_change_quorum()) return out;

    const auto sel = select_safe_tuple(round.votes, cfg);
    Effect e;
    e.kind = Effect::Kind::selection;
    e.node = NodeId::of(state.id);
    e.instance = vote.instance;
    e.owner_number = vote.owner_number;
    e.outcome = sel.outcome;
    e.tuple = sel.tuple;
    e.rival = sel.rival;
    e.detail = to_string(sel.basis);
    for (const auto& v : round.votes) e.voters.push_back(v.sender);
    std::sort(e.voters.begin(), e.voters.end());
    out.effects.push_back(std::move(e));

    if (sel.outcome == SelectionOutcome::conflict) {
        round.status = LeaderRound::Status::stuck;
        return out;
    }
    round.status = LeaderRound::Status::issued;
    NewOwner msg = issue_new_owner(sel, round.votes, state.id, cfg);
    for (auto r : cfg.replicas()) {
        if (r != state.id) out.out.push_back({NodeId::of(r), msg});
    }
    out.append(on_new_owner(state, NodeId::of(state.id), msg, cfg));
    return out;
}

StepOutput on_new_owner(ReplicaState& state, NodeId from, const NewOwner& msg, const Config& cfg) {
    StepOutput out;
    auto drop = [&](DropReason reason) {
        Effect e;
        e.kind = Effect::Kind::drop;
        e.node = NodeId::of(state.id);
        e.instance = msg.instance;
        e.detail = to_string(reason);
        out.effects.push_back(std::move(e));
        out.dropped = reason;
        return out;
    };
    if (!from.is_replica() || cfg.leader_of(msg.owner_number) != from.replica()) {
        return drop(DropReason::not_leader);
    }
    if (state.owner_number(msg.instance, cfg) > msg.owner_number) {
        return drop(DropReason::stale_owner_number);
    }
    for (const auto& v : msg.proof) {
        if (v.instance != msg.instance || v.owner_number != msg.owner_number) {
            return drop(DropReason::invalid_proof);
        }
    }
    SafeSelection sel;
    try {
        sel = select_safe_tuple(msg.proof, cfg);
    } catch (const InsufficientVotes&) {
        return drop(DropReason::invalid_proof);
    }
    const bool vouched = (sel.outcome == SelectionOutcome::safe && tuples_equal(sel.tuple, msg.tuple)) ||
                         (sel.outcome == SelectionOutcome::none && msg.tuple.command.is_noop());
    if (!vouched) return drop(DropReason::invalid_proof);

    state.set_owner_number(msg.instance, msg.owner_number, cfg);
    auto* existing = state.find(msg.instance);
    if (existing && existing->status == RecordStatus::committed) {
        if (!tuples_equal(existing->tuple, msg.tuple)) return drop(DropReason::already_committed);
        existing->new_owner_accepted = true;
        return out;
    }

    auto& rec = state.upsert(msg.instance);
    rec.tuple = msg.tuple;
    rec.owner_number = msg.owner_number;
    rec.status = RecordStatus::committed;
    rec.new_owner_accepted = true;

    Effect e;
    e.kind = Effect::Kind::commit;
    e.node = NodeId::of(state.id);
    e.instance = msg.instance;
    e.tuple = msg.tuple;
    e.owner_number = msg.owner_number;
    e.detail = "new_owner";
    out.effects.push_back(std::move(e));
    reexecute(state, out);

    if (!msg.tuple.command.is_noop()) {
        std::string result;
        for (const auto& x : state.executed) {
            if (x.command_id == msg.tuple.command.id) result = x.result;
        }
        out.out.push_back({NodeId::of(msg.tuple.command.client),
                           CommitReply{state.id, msg.instance, msg.tuple, result}});
    }
    return out;
}

}  // namespace ezbft
