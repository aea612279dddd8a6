#pragma once

#include "ezbft/messages.hpp"

#include <string>
#include <vector>

namespace ezbft {

/// One entry of a replica's speculative execution log.
struct ExecutedEntry {
    std::string command_id;
    InstanceId instance;
    std::uint32_t seq = 0;
    DepSet deps;
    std::string result;

    bool operator==(const ExecutedEntry&) const = default;
};

enum class DropReason : std::uint8_t {
    not_leader,
    stale_owner_number,
    slot_occupied,
    duplicate_request,
    invalid_certificate,
    already_committed,
    invalid_proof,
    unexpected,
};

const char* to_string(DropReason r);

enum class SelectionOutcome : std::uint8_t { safe, conflict, none };

const char* to_string(SelectionOutcome o);

/// Observable side effect of a step. Traces record these so checkers can run
/// on a trace file alone.
struct Effect {
    enum class Kind : std::uint8_t {
        accept,           // slow-path COMMIT accepted (not final)
        commit,           // instance committed (fast certificate or NEW-OWNER)
        execute,          // execution log replayed; `order` holds the new log
        selection,        // owner-change leader evaluated its votes
        client_complete,  // client considers its command complete
        drop,             // message dropped; `detail` holds the reason
    };

    Kind kind = Kind::commit;
    NodeId node;
    InstanceId instance;
    OrderingTuple tuple;
    std::string detail;  // commit path, drop reason, completion path
    std::vector<ExecutedEntry> order;
    SelectionOutcome outcome = SelectionOutcome::none;
    std::optional<OrderingTuple> rival;
    OwnerNumber owner_number;
    std::vector<ReplicaId> voters;
};

const char* to_string(Effect::Kind k);

}  // namespace ezbft
