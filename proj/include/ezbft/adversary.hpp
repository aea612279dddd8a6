#pragma once

#include "ezbft/client.hpp"
#include "ezbft/owner_change.hpp"

#include <optional>
#include <vector>

namespace ezbft {

struct ByzantineChoice {
    enum class Kind : std::uint8_t {
        honest,
        silent,
        equivocate_spec_reply,         // one SPEC-REPLY per branch, all to the client
        arbitrary_owner_change_tuple,  // OWNER-CHANGE carrying branches[0]
        equivocate_spec_order,         // experimental: branches[i] to recipients[i]
    };

    Kind kind = Kind::honest;
    std::vector<OrderingTuple> branches;
    std::vector<std::vector<ReplicaId>> recipients;
    /// arbitrary_owner_change_tuple: the instance and target voted on.
    std::optional<InstanceId> instance;
    std::optional<OwnerNumber> target;

    /// Throws ScheduleError when the choice is malformed for its kind.
    void validate() const;
};

const char* to_string(ByzantineChoice::Kind k);

/// A certificate a faulty client packages from replies it received, named by
/// message id.
struct CertificateSpec {
    CertPath path = CertPath::fast;
    std::vector<MessageId> reply_ids;
    std::vector<ReplicaId> recipients;
};

struct FaultyClientChoice {
    enum class Kind : std::uint8_t {
        honest,
        split_certificates,  // two or more certificates, each to its own recipients
        selective_send,      // one certificate to a subset of replicas
    };

    Kind kind = Kind::honest;
    std::vector<CertificateSpec> certificates;

    void validate() const;
};

const char* to_string(FaultyClientChoice::Kind k);

/// A byzantine replica's response to a SPEC-ORDER.
StepOutput byz_spec_replies(ReplicaState& state, NodeId from, const SpecOrder& msg,
                            const ByzantineChoice& choice, const Config& cfg);

/// A byzantine leader's response to a client request (experimental equivocation).
StepOutput byz_propose(ReplicaState& state, const Command& cmd, const ByzantineChoice& choice,
                       const Config& cfg);

/// A byzantine replica's OWNER-CHANGE. The vote only carries evidence the
/// replica actually holds.
StepOutput byz_owner_change_vote(ReplicaState& state, InstanceId instance, const ByzantineChoice& choice,
                                 const Config& cfg);

/// Packages certificates from received replies. Throws ForgedReply when a spec
/// names a reply the client never received.
StepOutput faulty_client_certificates(ClientState& state, const FaultyClientChoice& choice, const Config& cfg);

}  // namespace ezbft
