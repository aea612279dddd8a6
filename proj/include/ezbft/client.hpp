#pragma once

#include "ezbft/replica.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ezbft {

struct ClientState {
    enum class Phase : std::uint8_t { idle, speculating, finalizing, complete };

    ClientId id;
    Phase phase = Phase::idle;
    std::optional<Command> command;
    ReplicaId target;
    /// Every SPEC-REPLY received, keyed by message id (a faulty client packages by id).
    std::vector<std::pair<MessageId, SpecReply>> received;
    /// Latest SPEC-REPLY per sender, sorted by sender.
    std::vector<SpecReply> replies;
    /// Latest COMMIT-REPLY per sender, sorted by sender.
    std::vector<CommitReply> commit_replies;
    bool timer_armed = false;
    std::optional<OrderingTuple> finalized;
    std::string completion;  // fast, slow, owner_change
    std::vector<CertPtr> certificates_sent;

    explicit ClientState(ClientId cid = {}) : id(cid) {}

    const SpecReply* reply_by_id(const MessageId& mid) const;
    void hash_into(Hasher& h) const;
};

const char* to_string(ClientState::Phase p);

StepOutput submit(ClientState& state, const Command& cmd, ReplicaId target);

/// Records the reply (last-write-wins per sender) without acting on it.
void record_spec_reply(ClientState& state, const MessageId& mid, const SpecReply& reply);

/// Correct-client handling: records, then sends COMMIT-FAST on 3f+1 identical replies.
StepOutput on_spec_reply(ClientState& state, const MessageId& mid, const SpecReply& reply, const Config& cfg);

/// Sends COMMIT-FAST if the recorded replies are 3f+1 identical ones.
StepOutput try_fast_path(ClientState& state, const Config& cfg);

/// Slow path: with at least 2f+1 replies, COMMIT the union over all of them.
/// Otherwise the timer stays armed and nothing is sent.
StepOutput on_timeout(ClientState& state, const Config& cfg);

StepOutput on_commit_reply(ClientState& state, const CommitReply& reply, const Config& cfg);

/// True when a timeout would produce a COMMIT.
bool timeout_ready(const ClientState& state, const Config& cfg);

}  // namespace ezbft
