#include "ezbft/replica.hpp"

#include <algorithm>

namespace ezbft {

const char* to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::speculated: return "speculated";
        case RecordStatus::accepted: return "accepted";
        case RecordStatus::committed: return "committed";
    }
    return "unknown";
}

const char* to_string(DropReason r) {
    switch (r) {
        case DropReason::not_leader: return "not_leader";
        case DropReason::stale_owner_number: return "stale_owner_number";
        case DropReason::slot_occupied: return "slot_occupied";
        case DropReason::duplicate_request: return "duplicate_request";
        case DropReason::invalid_certificate: return "invalid_certificate";
        case DropReason::already_committed: return "already_committed";
        case DropReason::invalid_proof: return "invalid_proof";
        case DropReason::unexpected: return "unexpected";
    }
    return "unknown";
}

const char* to_string(SelectionOutcome o) {
    switch (o) {
        case SelectionOutcome::safe: return "safe";
        case SelectionOutcome::conflict: return "conflict";
        case SelectionOutcome::none: return "none";
    }
    return "unknown";
}

const char* to_string(Effect::Kind k) {
    switch (k) {
        case Effect::Kind::accept: return "accept";
        case Effect::Kind::commit: return "commit";
        case Effect::Kind::execute: return "execute";
        case Effect::Kind::selection: return "selection";
        case Effect::Kind::client_complete: return "client_complete";
        case Effect::Kind::drop: return "drop";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ReplicaState
// ---------------------------------------------------------------------------

const InstanceRecord* ReplicaState::find(InstanceId i) const {
    auto it = std::lower_bound(log.begin(), log.end(), i,
                               [](const InstanceRecord& r, InstanceId id) { return r.instance < id; });
    return it != log.end() && it->instance == i ? &*it : nullptr;
}

InstanceRecord* ReplicaState::find(InstanceId i) {
    return const_cast<InstanceRecord*>(std::as_const(*this).find(i));
}

InstanceRecord& ReplicaState::upsert(InstanceId i) {
    auto it = std::lower_bound(log.begin(), log.end(), i,
                               [](const InstanceRecord& r, InstanceId id) { return r.instance < id; });
    if (it != log.end() && it->instance == i) return *it;
    InstanceRecord rec;
    rec.instance = i;
    return *log.insert(it, std::move(rec));
}

OwnerNumber ReplicaState::owner_number(InstanceId i, const Config& cfg) const {
    for (const auto& [inst, o] : owner_numbers) {
        if (inst == i) return o;
    }
    return cfg.default_owner_number(i);
}

void ReplicaState::set_owner_number(InstanceId i, OwnerNumber o, const Config& cfg) {
    for (auto& [inst, cur] : owner_numbers) {
        if (inst == i) {
            cur = o;
            return;
        }
    }
    if (o == cfg.default_owner_number(i)) return;
    auto it = std::lower_bound(owner_numbers.begin(), owner_numbers.end(), i,
                               [](const auto& p, InstanceId id) { return p.first < id; });
    owner_numbers.insert(it, {i, o});
}

const SpecReply* ReplicaState::own_reply(InstanceId i) const {
    for (auto it = sent_replies.rbegin(); it != sent_replies.rend(); ++it) {
        if (it->instance == i) return &*it;
    }
    return nullptr;
}

KnownTuples ReplicaState::known() const {
    KnownTuples out;
    for (const auto& r : log) out.emplace(r.instance, r.tuple);
    return out;
}

bool ReplicaState::committed(InstanceId i) const {
    const auto* r = find(i);
    return r && r->status == RecordStatus::committed;
}

void ReplicaState::hash_into(Hasher& h) const {
    h.word(id.index);
    h.word(next_slot);
    h.word(log.size());
    for (const auto& r : log) {
        h.word((std::uint64_t{r.instance.owner.index} << 32) | r.instance.slot);
        hash_append(h, r.tuple);
        h.word(r.owner_number.value);
        h.word(static_cast<std::uint64_t>(r.status) | (r.new_owner_accepted ? 0x100 : 0));
        h.word(r.certificate ? 1 : 0);
        if (r.certificate) hash_append(h, *r.certificate);
    }
    h.word(owner_numbers.size());
    for (const auto& [i, o] : owner_numbers) {
        h.word((std::uint64_t{i.owner.index} << 32) | i.slot);
        h.word(o.value);
    }
    h.word(sent_replies.size());
    for (const auto& r : sent_replies) hash_append(h, r);
    // executed and kv are functions of the log; the execution log's replay
    // count is not state.
    h.word(rounds.size());
    for (const auto& round : rounds) {
        h.word((std::uint64_t{round.instance.owner.index} << 32) | round.instance.slot);
        h.word(round.target.value);
        h.word(static_cast<std::uint64_t>(round.status));
        h.word(round.votes.size());
        for (const auto& v : round.votes) hash_append(h, v);
    }
}

void StepOutput::append(StepOutput&& other) {
    for (auto& o : other.out) out.push_back(std::move(o));
    for (auto& e : other.effects) effects.push_back(std::move(e));
    if (!dropped) dropped = other.dropped;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

std::vector<const InstanceRecord*> ordered_records(const std::vector<InstanceRecord>& records) {
    std::vector<const InstanceRecord*> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.tuple.command.is_noop()) out.push_back(&r);
    }
    std::sort(out.begin(), out.end(), [](const InstanceRecord* a, const InstanceRecord* b) {
        if (a->tuple.seq != b->tuple.seq) return a->tuple.seq < b->tuple.seq;
        return a->instance < b->instance;
    });
    return out;
}

Effect drop_effect(ReplicaId id, InstanceId instance, DropReason reason) {
    Effect e;
    e.kind = Effect::Kind::drop;
    e.node = NodeId::of(id);
    e.instance = instance;
    e.detail = to_string(reason);
    return e;
}

StepOutput dropped(ReplicaId id, InstanceId instance, DropReason reason) {
    StepOutput out;
    out.dropped = reason;
    out.effects.push_back(drop_effect(id, instance, reason));
    return out;
}

std::string result_of(const ReplicaState& state, const std::string& command_id) {
    for (const auto& e : state.executed) {
        if (e.command_id == command_id) return e.result;
    }
    return {};
}

}  // namespace

std::vector<Command> execution_order(const std::vector<InstanceRecord>& records) {
    std::vector<Command> out;
    for (const auto* r : ordered_records(records)) out.push_back(r->tuple.command);
    return out;
}

void reexecute(ReplicaState& state, StepOutput& out) {
    auto order = ordered_records(state.log);
    bool same = order.size() == state.executed.size();
    for (std::size_t i = 0; same && i < order.size(); ++i) {
        const auto& e = state.executed[i];
        const auto& t = order[i]->tuple;
        same = e.command_id == t.command.id && e.instance == order[i]->instance && e.seq == t.seq &&
               e.deps == t.deps;
    }
    if (same) return;

    // Rollback and replay on a fresh store.
    state.kv.clear();
    state.executed.clear();
    for (const auto* r : order) {
        const auto& cmd = r->tuple.command;
        auto it = std::find_if(state.kv.begin(), state.kv.end(),
                               [&](const auto& kv) { return kv.first == cmd.object_key; });
        if (it == state.kv.end()) {
            state.kv.emplace_back(cmd.object_key, cmd.id);
            it = std::prev(state.kv.end());
        } else {
            it->second += "," + cmd.id;
        }
        state.executed.push_back({cmd.id, r->instance, r->tuple.seq, r->tuple.deps, it->second});
    }
    std::sort(state.kv.begin(), state.kv.end());

    Effect e;
    e.kind = Effect::Kind::execute;
    e.node = NodeId::of(state.id);
    e.order = state.executed;
    out.effects.push_back(std::move(e));
}

// ---------------------------------------------------------------------------
// Fast path
// ---------------------------------------------------------------------------

OrderingTuple updated_tuple(const ReplicaState& state, InstanceId instance, const OrderingTuple& proposed) {
    OrderingTuple t = proposed;
    for (const auto& r : state.log) {
        if (r.instance != instance && interferes(r.tuple.command, proposed.command)) {
            t.deps.insert(r.instance);
        }
    }
    if (t.deps.contains(instance)) {
        std::vector<InstanceId> rest;
        for (auto d : t.deps) {
            if (d != instance) rest.push_back(d);
        }
        t.deps = DepSet(std::move(rest));
    }
    t.seq = std::max(proposed.seq, compute_seq_known(t.deps, state.known()));
    return t;
}

StepOutput on_client_request(ReplicaState& state, const Command& cmd, const Config& cfg) {
    for (const auto& r : state.log) {
        if (r.tuple.command.id == cmd.id && r.instance.owner == state.id) {
            return dropped(state.id, r.instance, DropReason::duplicate_request);
        }
    }

    const InstanceId instance{state.id, state.next_slot++};
    OrderingTuple tuple{cmd, {}, 1};
    for (const auto& r : state.log) {
        if (interferes(r.tuple.command, cmd)) tuple.deps.insert(r.instance);
    }
    tuple.seq = compute_seq(tuple.deps, state.known());

    const OwnerNumber owner = cfg.default_owner_number(instance);
    auto& rec = state.upsert(instance);
    rec.tuple = tuple;
    rec.owner_number = owner;
    rec.status = RecordStatus::speculated;

    StepOutput out;
    for (auto r : cfg.replicas()) {
        if (r != state.id) out.out.push_back({NodeId::of(r), SpecOrder{instance, owner, tuple}});
    }
    // The leader handles its own SPEC-ORDER locally.
    SpecReply reply{state.id, cmd.client, instance, owner, tuple};
    state.sent_replies.push_back(reply);
    out.out.push_back({NodeId::of(cmd.client), reply, 1});
    reexecute(state, out);
    return out;
}

StepOutput on_spec_order(ReplicaState& state, NodeId from, const SpecOrder& msg, const Config& cfg) {
    if (!from.is_replica() || cfg.leader_of(msg.owner_number) != from.replica() ||
        msg.instance.owner != from.replica()) {
        return dropped(state.id, msg.instance, DropReason::not_leader);
    }
    if (state.owner_number(msg.instance, cfg) > msg.owner_number) {
        return dropped(state.id, msg.instance, DropReason::stale_owner_number);
    }
    if (state.find(msg.instance)) {
        return dropped(state.id, msg.instance, DropReason::slot_occupied);
    }

    const OrderingTuple tuple = updated_tuple(state, msg.instance, msg.tuple);
    auto& rec = state.upsert(msg.instance);
    rec.tuple = tuple;
    rec.owner_number = msg.owner_number;
    rec.status = RecordStatus::speculated;

    StepOutput out;
    SpecReply reply{state.id, tuple.command.client, msg.instance, msg.owner_number, tuple};
    state.sent_replies.push_back(reply);
    out.out.push_back({NodeId::of(tuple.command.client), reply});
    reexecute(state, out);
    return out;
}

StepOutput on_commit_fast(ReplicaState& state, const CommitFast& msg, const Config& cfg) {
    if (!msg.certificate || msg.certificate->path != CertPath::fast ||
        validate_certificate(*msg.certificate, cfg) != CertDefect::none) {
        const InstanceId i = msg.certificate ? msg.certificate->instance : InstanceId{};
        return dropped(state.id, i, DropReason::invalid_certificate);
    }
    const auto& cert = *msg.certificate;
    if (state.owner_number(cert.instance, cfg) > cert.owner_number) {
        return dropped(state.id, cert.instance, DropReason::stale_owner_number);
    }
    if (const auto* existing = state.find(cert.instance);
        existing && existing->status == RecordStatus::committed) {
        return tuples_equal(existing->tuple, cert.tuple)
                   ? StepOutput{}
                   : dropped(state.id, cert.instance, DropReason::already_committed);
    }

    auto& rec = state.upsert(cert.instance);
    rec.tuple = cert.tuple;
    rec.owner_number = cert.owner_number;
    rec.status = RecordStatus::committed;
    rec.certificate = msg.certificate;

    StepOutput out;
    Effect e;
    e.kind = Effect::Kind::commit;
    e.node = NodeId::of(state.id);
    e.instance = cert.instance;
    e.tuple = cert.tuple;
    e.owner_number = cert.owner_number;
    e.detail = "commit_fast";
    out.effects.push_back(std::move(e));
    reexecute(state, out);
    return out;
}

StepOutput on_commit(ReplicaState& state, NodeId from, const Commit& msg, const Config& cfg) {
    if (!msg.certificate || msg.certificate->path != CertPath::slow ||
        validate_certificate(*msg.certificate, cfg) != CertDefect::none ||
        !tuples_equal(msg.certificate->tuple, msg.tuple)) {
        const InstanceId i = msg.certificate ? msg.certificate->instance : InstanceId{};
        return dropped(state.id, i, DropReason::invalid_certificate);
    }
    const auto& cert = *msg.certificate;
    if (state.owner_number(cert.instance, cfg) > cert.owner_number) {
        return dropped(state.id, cert.instance, DropReason::stale_owner_number);
    }

    StepOutput out;
    auto* existing = state.find(cert.instance);
    if (existing && existing->status == RecordStatus::committed &&
        !tuples_equal(existing->tuple, msg.tuple)) {
        return dropped(state.id, cert.instance, DropReason::already_committed);
    }
    if (!existing || existing->status != RecordStatus::committed) {
        auto& rec = state.upsert(cert.instance);
        rec.tuple = msg.tuple;
        rec.owner_number = cert.owner_number;
        rec.status = RecordStatus::accepted;
        rec.certificate = msg.certificate;

        Effect e;
        e.kind = Effect::Kind::accept;
        e.node = NodeId::of(state.id);
        e.instance = cert.instance;
        e.tuple = msg.tuple;
        e.owner_number = cert.owner_number;
        e.detail = "commit";
        out.effects.push_back(std::move(e));
        reexecute(state, out);
    }

    if (from.is_client()) {
        out.out.push_back({from, CommitReply{state.id, cert.instance, msg.tuple,
                                             result_of(state, msg.tuple.command.id)}});
    }
    return out;
}

}  // namespace ezbft
