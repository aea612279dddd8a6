#include "ezbft/client.hpp"

#include <algorithm>

namespace ezbft {

const char* to_string(ClientState::Phase p) {
    switch (p) {
        case ClientState::Phase::idle: return "idle";
        case ClientState::Phase::speculating: return "speculating";
        case ClientState::Phase::finalizing: return "finalizing";
        case ClientState::Phase::complete: return "complete";
    }
    return "unknown";
}

const SpecReply* ClientState::reply_by_id(const MessageId& mid) const {
    auto it = std::lower_bound(received.begin(), received.end(), mid,
                               [](const auto& p, const MessageId& m) { return p.first < m; });
    return it != received.end() && it->first == mid ? &it->second : nullptr;
}

void ClientState::hash_into(Hasher& h) const {
    h.word(id.index);
    h.word(static_cast<std::uint64_t>(phase) | (timer_armed ? 0x100 : 0));
    h.word(command ? 1 : 0);
    if (command) hash_append(h, *command);
    h.word(target.index);
    h.word(received.size());
    for (const auto& [mid, r] : received) {
        h.word((std::uint64_t{static_cast<std::uint8_t>(mid.producer.kind)} << 40) |
               (std::uint64_t{mid.producer.index} << 32) | mid.counter);
        hash_append(h, r);
    }
    // `replies` is derived from `received`.
    h.word(commit_replies.size());
    for (const auto& c : commit_replies) {
        h.word(c.replica.index);
        hash_append(h, c.tuple);
        h.str(c.result);
    }
    h.word(finalized ? 1 : 0);
    if (finalized) hash_append(h, *finalized);
    h.str(completion);
    h.word(certificates_sent.size());
    for (const auto& c : certificates_sent) hash_append(h, *c);
}

namespace {

Effect completion_effect(const ClientState& state, const OrderingTuple& tuple, InstanceId instance) {
    Effect e;
    e.kind = Effect::Kind::client_complete;
    e.node = NodeId::of(state.id);
    e.instance = instance;
    e.tuple = tuple;
    e.detail = state.completion;
    return e;
}

}  // namespace

StepOutput submit(ClientState& state, const Command& cmd, ReplicaId target) {
    state.command = cmd;
    state.target = target;
    state.phase = ClientState::Phase::speculating;
    state.timer_armed = true;
    StepOutput out;
    out.out.push_back({NodeId::of(target), ClientRequest{cmd}});
    return out;
}

void record_spec_reply(ClientState& state, const MessageId& mid, const SpecReply& reply) {
    auto it = std::lower_bound(state.received.begin(), state.received.end(), mid,
                               [](const auto& p, const MessageId& m) { return p.first < m; });
    if (it == state.received.end() || it->first != mid) state.received.insert(it, {mid, reply});

    auto r = std::lower_bound(state.replies.begin(), state.replies.end(), reply.replica,
                              [](const SpecReply& x, ReplicaId id) { return x.replica < id; });
    if (r != state.replies.end() && r->replica == reply.replica) {
        *r = reply;
    } else {
        state.replies.insert(r, reply);
    }
}

StepOutput on_spec_reply(ClientState& state, const MessageId& mid, const SpecReply& reply, const Config& cfg) {
    StepOutput out;
    if (state.phase != ClientState::Phase::speculating) return out;
    record_spec_reply(state, mid, reply);
    return try_fast_path(state, cfg);
}

StepOutput try_fast_path(ClientState& state, const Config& cfg) {
    StepOutput out;
    if (state.phase != ClientState::Phase::speculating || state.replies.size() < cfg.fast_quorum()) return out;

    const auto& first = state.replies.front();
    const bool identical = std::all_of(state.replies.begin(), state.replies.end(), [&](const SpecReply& r) {
        return r.instance == first.instance && r.owner_number == first.owner_number &&
               tuples_equal(r.tuple, first.tuple);
    });
    if (!identical) return out;

    auto cert = std::make_shared<CommitCertificate>();
    cert->path = CertPath::fast;
    cert->instance = first.instance;
    cert->owner_number = first.owner_number;
    cert->tuple = first.tuple;
    cert->replies = state.replies;
    state.certificates_sent.push_back(cert);
    state.phase = ClientState::Phase::complete;
    state.timer_armed = false;
    state.finalized = first.tuple;
    state.completion = "fast";
    for (auto r : cfg.replicas()) out.out.push_back({NodeId::of(r), CommitFast{cert}});
    out.effects.push_back(completion_effect(state, first.tuple, first.instance));
    return out;
}

bool timeout_ready(const ClientState& state, const Config& cfg) {
    return state.phase == ClientState::Phase::speculating && state.timer_armed &&
           state.replies.size() >= cfg.slow_quorum();
}

StepOutput on_timeout(ClientState& state, const Config& cfg) {
    StepOutput out;
    if (!timeout_ready(state, cfg)) return out;

    auto cert = std::make_shared<CommitCertificate>();
    cert->path = CertPath::slow;
    cert->instance = state.replies.front().instance;
    cert->owner_number = state.replies.front().owner_number;
    cert->replies = state.replies;
    cert->tuple = finalize_tuple(state.replies, cfg);
    state.certificates_sent.push_back(cert);
    state.phase = ClientState::Phase::finalizing;
    state.timer_armed = false;
    state.finalized = cert->tuple;
    for (auto r : cfg.replicas()) out.out.push_back({NodeId::of(r), Commit{cert->tuple, cert}});
    return out;
}

StepOutput on_commit_reply(ClientState& state, const CommitReply& reply, const Config& cfg) {
    StepOutput out;
    auto it = std::lower_bound(state.commit_replies.begin(), state.commit_replies.end(), reply.replica,
                               [](const CommitReply& x, ReplicaId id) { return x.replica < id; });
    if (it != state.commit_replies.end() && it->replica == reply.replica) {
        *it = reply;
    } else {
        state.commit_replies.insert(it, reply);
    }
    if (state.phase == ClientState::Phase::complete || state.phase == ClientState::Phase::idle) return out;

    std::size_t same = 0;
    for (const auto& c : state.commit_replies) {
        if (c.instance == reply.instance && tuples_equal(c.tuple, reply.tuple) && c.result == reply.result) {
            ++same;
        }
    }
    if (same < cfg.slow_quorum()) return out;

    const bool slow = state.phase == ClientState::Phase::finalizing && state.finalized &&
                      tuples_equal(*state.finalized, reply.tuple);
    state.completion = slow ? "slow" : "owner_change";
    state.phase = ClientState::Phase::complete;
    state.timer_armed = false;
    state.finalized = reply.tuple;
    out.effects.push_back(completion_effect(state, reply.tuple, reply.instance));
    return out;
}

}  // namespace ezbft
