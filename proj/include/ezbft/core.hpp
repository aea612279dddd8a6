#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ezbft {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define EZBFT_DEFINE_ERROR(Name)                                                                   \
    class Name : public Error {                                                                    \
      public:                                                                                      \
        using Error::Error;                                                                        \
    }

EZBFT_DEFINE_ERROR(ConfigError);
EZBFT_DEFINE_ERROR(MissingDependency);
EZBFT_DEFINE_ERROR(InsufficientVotes);
EZBFT_DEFINE_ERROR(CannotProceed);
EZBFT_DEFINE_ERROR(ForgedReply);
EZBFT_DEFINE_ERROR(ScheduleError);
EZBFT_DEFINE_ERROR(UnknownScenario);
EZBFT_DEFINE_ERROR(PreconditionUnmet);
EZBFT_DEFINE_ERROR(FormatError);

#undef EZBFT_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Position of a replica in Config::replica_ids. The position doubles as the
/// replica's default owner number and as the execution tie-break rank.
struct ReplicaId {
    std::uint8_t index = 0;
    auto operator<=>(const ReplicaId&) const = default;
};

/// Position of a client in Config::client_ids.
struct ClientId {
    std::uint8_t index = 0;
    auto operator<=>(const ClientId&) const = default;
};

struct NodeId {
    enum class Kind : std::uint8_t { replica, client };
    Kind kind = Kind::replica;
    std::uint8_t index = 0;

    static NodeId of(ReplicaId r) { return {Kind::replica, r.index}; }
    static NodeId of(ClientId c) { return {Kind::client, c.index}; }
    bool is_replica() const { return kind == Kind::replica; }
    bool is_client() const { return kind == Kind::client; }
    ReplicaId replica() const { return {index}; }
    ClientId client() const { return {index}; }

    auto operator<=>(const NodeId&) const = default;
};

struct InstanceId {
    ReplicaId owner;
    std::uint32_t slot = 0;
    auto operator<=>(const InstanceId&) const = default;
};

struct OwnerNumber {
    std::uint32_t value = 0;
    auto operator<=>(const OwnerNumber&) const = default;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// How a finalized slow-path sequence number is derived from the replies.
enum class SeqMode : std::uint8_t {
    /// seq = max over the certificate's replies.
    max_of_replies,
    /// seq = max(max over replies, compute_seq over the finalizer's known deps).
    /// Validators accept any seq at or above the reply maximum.
    recompute,
};

struct Config {
    std::uint32_t n = 0;
    std::uint32_t f = 0;
    std::vector<std::string> replica_ids;
    std::vector<ReplicaId> byzantine_ids;
    std::vector<std::string> client_ids;
    std::vector<ClientId> faulty_client_ids;
    SeqMode seq_mode = SeqMode::max_of_replies;

    /// Throws ConfigError if n != 3f+1, too many byzantine replicas, or ids clash.
    void validate() const;

    std::size_t fast_quorum() const { return 3 * f + 1; }
    std::size_t slow_quorum() const { return 2 * f + 1; }
    std::size_t owner_change_quorum() const { return n - f; }
    std::size_t weak_quorum() const { return f + 1; }

    bool is_byzantine(ReplicaId r) const;
    bool is_faulty(ClientId c) const;
    bool is_correct(ReplicaId r) const { return !is_byzantine(r); }

    ReplicaId leader_of(OwnerNumber o) const {
        return {static_cast<std::uint8_t>(o.value % n)};
    }
    OwnerNumber default_owner_number(InstanceId i) const { return {i.owner.index}; }

    ReplicaId replica(std::string_view name) const;
    ClientId client(std::string_view name) const;
    NodeId node(std::string_view name) const;
    const std::string& name(ReplicaId r) const { return replica_ids.at(r.index); }
    const std::string& name(ClientId c) const { return client_ids.at(c.index); }
    const std::string& name(NodeId id) const;

    std::vector<ReplicaId> replicas() const;
    std::vector<ReplicaId> correct_replicas() const;

    bool operator==(const Config&) const = default;
};

// ---------------------------------------------------------------------------
// Commands and ordering tuples
// ---------------------------------------------------------------------------

struct Command {
    std::string id;
    ClientId client;
    std::string object_key;
    std::string payload;

    /// The empty command proposed when an owner change finds nothing to recover.
    static Command noop() { return {}; }
    bool is_noop() const { return id.empty(); }

    bool operator==(const Command&) const = default;
};

/// Commands interfere iff they touch the same object and are distinct.
bool interferes(const Command& a, const Command& b);

/// Sorted, duplicate-free set of instance references.
class DepSet {
  public:
    DepSet() = default;
    DepSet(std::initializer_list<InstanceId> ids);
    explicit DepSet(std::vector<InstanceId> ids);

    void insert(InstanceId id);
    void merge(const DepSet& other);
    bool contains(InstanceId id) const;
    bool is_subset_of(const DepSet& other) const;
    DepSet minus(const DepSet& other) const;

    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }
    const std::vector<InstanceId>& items() const { return ids_; }

    bool operator==(const DepSet&) const = default;
    auto operator<=>(const DepSet&) const = default;

  private:
    std::vector<InstanceId> ids_;
};

struct OrderingTuple {
    Command command;
    DepSet deps;
    std::uint32_t seq = 1;

    static OrderingTuple noop() { return {Command::noop(), {}, 1}; }
};

/// Same command id, set-equal deps, equal seq.
bool tuples_equal(const OrderingTuple& p, const OrderingTuple& q);

/// Canonical total order used wherever a deterministic pick among tuples is
/// needed: command id, then seq, then deps.
bool tuple_less(const OrderingTuple& p, const OrderingTuple& q);

using KnownTuples = std::map<InstanceId, OrderingTuple>;

/// 1 + max seq over deps (1 for an empty set). Throws MissingDependency when a
/// dep is absent from `known`.
std::uint32_t compute_seq(const DepSet& deps, const KnownTuples& known);

/// compute_seq restricted to the deps present in `known`; absent deps
/// contribute nothing.
std::uint32_t compute_seq_known(const DepSet& deps, const KnownTuples& known);

}  // namespace ezbft
