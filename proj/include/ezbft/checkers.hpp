#pragma once

#include "ezbft/codec.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ezbft {

enum class Property : std::uint8_t { agreement, validity, execution_consistency, liveness, dependency_inclusion };

const char* to_string(Property p);
Property parse_property(const std::string& s);  // throws FormatError
std::vector<Property> all_properties();
/// Comma-separated list; "all" or empty selects every property.
std::vector<Property> parse_properties(const std::string& csv);

struct Witness {
    ReplicaId replica;
    InstanceId instance;
    OrderingTuple tuple;
};

struct ViolationReport {
    Property property = Property::agreement;
    std::vector<Witness> witnesses;
    std::string detail;
    std::pair<std::uint32_t, std::uint32_t> trace_slice{0, 0};
};

/// What the checkers look at: final commits, final execution logs, and every
/// owner-change selection, extracted from a trace or a live world.
struct Observations {
    struct Commit {
        OrderingTuple tuple;
        std::string path;
        std::uint32_t seq_no = 0;
    };
    struct Selection {
        ReplicaId leader;
        InstanceId instance;
        OwnerNumber owner_number;
        SelectionOutcome outcome = SelectionOutcome::none;
        OrderingTuple tuple;
        std::optional<OrderingTuple> rival;
        std::uint32_t seq_no = 0;
    };

    Config config;
    std::vector<std::string> proposed;
    std::map<std::pair<ReplicaId, InstanceId>, Commit> commits;  // correct replicas only
    std::map<ReplicaId, std::vector<ExecutedEntry>> executed;    // correct replicas only
    std::vector<Selection> selections;
    bool has_tail = false;
    std::uint32_t last_seq_no = 0;

    const Commit* commit(ReplicaId r, InstanceId i) const;
};

Observations observe(const Trace& trace);
Observations observe(const World& world);

std::optional<ViolationReport> check_agreement(const Observations& obs);
std::optional<ViolationReport> check_validity(const Observations& obs);
std::optional<ViolationReport> check_dependency_inclusion(const Observations& obs);
std::optional<ViolationReport> check_execution_consistency(const Observations& obs);
/// Throws PreconditionUnmet when no synchronous tail ran.
std::optional<ViolationReport> check_liveness(const Observations& obs);

std::optional<ViolationReport> check(Property p, const Observations& obs);

/// Runs the selected checkers. Liveness is skipped without a tail unless
/// `strict`, in which case PreconditionUnmet propagates.
std::vector<ViolationReport> check_all(const Observations& obs, const std::vector<Property>& props,
                                       bool strict = false);

/// Re-verifies a report from its witnesses alone.
bool verify_report(const ViolationReport& report, const Config& cfg, const std::vector<std::string>& proposed);

std::string tuple_summary(const OrderingTuple& t, const Config& cfg);
/// "R@R.0=<alpha,{},1>" per witness, joined by "; ".
std::string witness_summary(const ViolationReport& r, const Config& cfg);

/// Same property and witnesses (trace slices may differ).
bool same_report(const ViolationReport& a, const ViolationReport& b);

Json encode_report(const ViolationReport& r, const Config& cfg);
ViolationReport decode_report(const Json& j, const Config& cfg);

}  // namespace ezbft
