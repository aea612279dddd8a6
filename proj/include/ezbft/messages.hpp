#pragma once

#include "ezbft/core.hpp"
#include "ezbft/hash.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ezbft {

/// A SPEC-REPLY as sent by a replica. Channels are authenticated, so a record
/// in hand is proof that `replica` sent it.
struct SpecReply {
    ReplicaId replica;
    ClientId client;
    InstanceId instance;
    OwnerNumber owner_number;
    OrderingTuple tuple;
};

bool records_equal(const SpecReply& a, const SpecReply& b);

enum class CertPath : std::uint8_t { fast, slow };

/// Bundle of SPEC-REPLY records vouching for `tuple` at `instance`.
/// Fast certificates hold 3f+1 identical replies; slow ones at least 2f+1
/// replies whose deps union and seq maximum give `tuple`.
struct CommitCertificate {
    CertPath path = CertPath::fast;
    InstanceId instance;
    OwnerNumber owner_number;
    OrderingTuple tuple;
    std::vector<SpecReply> replies;
};

using CertPtr = std::shared_ptr<const CommitCertificate>;

enum class CertDefect : std::uint8_t {
    none,
    too_few_replies,
    duplicate_signer,
    wrong_instance,
    mixed_owner_numbers,
    wrong_command,
    not_identical,
    deps_not_union,
    seq_mismatch,
};

const char* to_string(CertDefect d);

/// Checks a certificate against the replica-side validation rules.
CertDefect validate_certificate(const CommitCertificate& cert, const Config& cfg);

/// The tuple a slow-path certificate built from `replies` vouches for: union of
/// deps and (by SeqMode) the finalized seq. `known` feeds SeqMode::recompute.
OrderingTuple finalize_tuple(const std::vector<SpecReply>& replies, const Config& cfg,
                             const KnownTuples& known = {});

/// Evidence a voter holds about an instance its accepted tuple depends on.
struct DepEvidence {
    InstanceId instance;
    std::optional<SpecReply> spec_reply;
    CertPtr certificate;
};

struct OwnerChangeVote {
    ReplicaId sender;
    InstanceId instance;
    OwnerNumber owner_number;  // the number being voted into
    std::optional<OrderingTuple> accepted_tuple;
    std::optional<SpecReply> spec_reply;
    CertPtr certificate;
    std::vector<DepEvidence> dep_evidence;
};

// Message bodies --------------------------------------------------------------

struct ClientRequest {
    Command command;
};

struct SpecOrder {
    InstanceId instance;
    OwnerNumber owner_number;
    OrderingTuple tuple;
};

struct CommitFast {
    CertPtr certificate;
};

struct Commit {
    OrderingTuple tuple;
    CertPtr certificate;
};

struct CommitReply {
    ReplicaId replica;
    InstanceId instance;
    OrderingTuple tuple;
    std::string result;
};

struct OwnerChange {
    OwnerChangeVote vote;
};

struct NewOwner {
    InstanceId instance;
    OwnerNumber owner_number;
    OrderingTuple tuple;  // noop command when nothing was recoverable
    std::vector<OwnerChangeVote> proof;
};

using MessageBody =
    std::variant<ClientRequest, SpecOrder, SpecReply, CommitFast, Commit, CommitReply, OwnerChange, NewOwner>;

const char* kind_name(const MessageBody& body);

/// Stable message identity: producing node plus its emission counter.
struct MessageId {
    NodeId producer;
    std::uint32_t counter = 0;
    auto operator<=>(const MessageId&) const = default;
};

struct Message {
    MessageId id;
    NodeId from;
    NodeId to;
    /// Lamport step: one more than the sender's clock at emission.
    std::uint32_t step = 0;
    std::optional<MessageId> cause;
    MessageBody body;
    Digest digest;  // content hash, filled by seal()

    void seal();
};

using MessagePtr = std::shared_ptr<const Message>;

/// Outbound message before the harness assigns identity.
struct Outbound {
    NodeId to;
    MessageBody body;
    /// Local processing steps between the triggering delivery and emission
    /// (a leader's own SPEC-REPLY follows its SPEC-ORDER by one step).
    std::uint8_t hop = 0;
};

// Digest helpers --------------------------------------------------------------

void hash_append(Hasher& h, const Command& c);
void hash_append(Hasher& h, const OrderingTuple& t);
void hash_append(Hasher& h, const SpecReply& r);
void hash_append(Hasher& h, const CommitCertificate& c);
void hash_append(Hasher& h, const OwnerChangeVote& v);
void hash_append(Hasher& h, const MessageBody& b);

}  // namespace ezbft
