#pragma once

#include "ezbft/replica.hpp"

#include <optional>
#include <vector>

namespace ezbft {

/// Outcome of the safe-tuple rule over a set of OWNER-CHANGE votes.
struct SafeSelection {
    enum class Basis : std::uint8_t {
        none,
        condition1,       // a commit certificate at the highest owner number
        condition2,       // f+1 SPEC-REPLYs at the highest owner number
        extension_rule1,  // certified extension whose new deps each have f+1 replies
        extension_rule2,  // f+1-reply extension whose new deps each have a certificate
    };

    SelectionOutcome outcome = SelectionOutcome::none;
    OrderingTuple tuple;                 // safe: the pick; conflict: first certified tuple
    std::optional<OrderingTuple> rival;  // conflict: second certified tuple
    Basis basis = Basis::none;
    InstanceId instance;
    OwnerNumber target;
    OwnerNumber highest;  // highest owner number among the evidence
};

const char* to_string(SafeSelection::Basis b);

/// Applies Conditions 1/2 and the valid-extension rules. Deterministic and
/// independent of vote order. Throws InsufficientVotes with fewer than N-f
/// distinct senders or when votes disagree on instance or target.
SafeSelection select_safe_tuple(const std::vector<OwnerChangeVote>& votes, const Config& cfg);

/// Builds the NEW-OWNER for a Safe (or NoCandidate: noop) selection.
/// Throws CannotProceed on Conflict.
NewOwner issue_new_owner(const SafeSelection& selection, const std::vector<OwnerChangeVote>& votes,
                         ReplicaId new_owner, const Config& cfg);

/// The vote a correct replica casts when moving `instance` to `target`.
OwnerChangeVote make_vote(const ReplicaState& state, InstanceId instance, OwnerNumber target);

/// Scheduler-driven trigger: advance one owner number and vote.
StepOutput trigger_owner_change(ReplicaState& state, InstanceId instance, const Config& cfg);

/// Vote collection at the leader of the vote's owner number.
StepOutput on_owner_change(ReplicaState& state, const OwnerChangeVote& vote, const Config& cfg);

StepOutput on_new_owner(ReplicaState& state, NodeId from, const NewOwner& msg, const Config& cfg);

}  // namespace ezbft
