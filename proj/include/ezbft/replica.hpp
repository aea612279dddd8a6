#pragma once

#include "ezbft/core.hpp"
#include "ezbft/effects.hpp"
#include "ezbft/messages.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ezbft {

enum class RecordStatus : std::uint8_t {
    speculated,
    accepted,   // holds a valid slow-path certificate; not yet final
    committed,
};

const char* to_string(RecordStatus s);

struct InstanceRecord {
    InstanceId instance;
    OrderingTuple tuple;
    OwnerNumber owner_number;
    RecordStatus status = RecordStatus::speculated;
    CertPtr certificate;
    bool new_owner_accepted = false;
};

/// An owner-change round this replica leads.
struct LeaderRound {
    enum class Status : std::uint8_t { collecting, issued, stuck };
    InstanceId instance;
    OwnerNumber target;
    std::vector<OwnerChangeVote> votes;
    Status status = Status::collecting;
};

struct ReplicaState {
    ReplicaId id;
    std::uint32_t next_slot = 0;
    std::vector<InstanceRecord> log;                             // sorted by instance
    std::vector<std::pair<InstanceId, OwnerNumber>> owner_numbers;  // only when past the default
    std::vector<SpecReply> sent_replies;                         // every SPEC-REPLY this replica sent
    std::vector<ExecutedEntry> executed;
    std::vector<std::pair<std::string, std::string>> kv;         // object_key -> value
    std::vector<LeaderRound> rounds;

    explicit ReplicaState(ReplicaId rid = {}) : id(rid) {}

    const InstanceRecord* find(InstanceId i) const;
    InstanceRecord* find(InstanceId i);
    InstanceRecord& upsert(InstanceId i);

    OwnerNumber owner_number(InstanceId i, const Config& cfg) const;
    void set_owner_number(InstanceId i, OwnerNumber o, const Config& cfg);

    /// Latest SPEC-REPLY this replica sent for the instance.
    const SpecReply* own_reply(InstanceId i) const;

    KnownTuples known() const;
    bool committed(InstanceId i) const;

    void hash_into(Hasher& h) const;
};

/// Result of a step: messages to send and the effects observed.
struct StepOutput {
    std::vector<Outbound> out;
    std::vector<Effect> effects;
    std::optional<DropReason> dropped;

    void append(StepOutput&& other);
};

/// Deterministic order: ascending seq, ties by instance (owner position, slot).
std::vector<Command> execution_order(const std::vector<InstanceRecord>& records);

/// Replays the execution log if the record set changed; emits an execute effect.
void reexecute(ReplicaState& state, StepOutput& out);

/// Leader proposal for a client command.
StepOutput on_client_request(ReplicaState& state, const Command& cmd, const Config& cfg);

/// Acceptance of a SPEC-ORDER; `from` must lead the instance at its owner number.
StepOutput on_spec_order(ReplicaState& state, NodeId from, const SpecOrder& msg, const Config& cfg);

StepOutput on_commit_fast(ReplicaState& state, const CommitFast& msg, const Config& cfg);

StepOutput on_commit(ReplicaState& state, NodeId from, const Commit& msg, const Config& cfg);

/// Shared by honest SPEC-ORDER handling and the byzantine "honest" branch: the
/// tuple a correct replica would reply with.
OrderingTuple updated_tuple(const ReplicaState& state, InstanceId instance, const OrderingTuple& proposed);

}  // namespace ezbft
