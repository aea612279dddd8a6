#pragma once

#include "ezbft/checkers.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ezbft {

struct ExploreBounds {
    std::uint32_t max_events = 40;
    std::uint32_t max_owner_changes_per_instance = 1;
    /// Candidate tuples per equivocation point (pairs are drawn from these).
    std::uint32_t byzantine_branch_tuples = 2;
    /// Certificates each faulty client may send.
    std::uint32_t faulty_sends = 2;
    std::vector<WorkloadItem> workload;
    /// 0 = unbounded. Hitting either limit clears `exhausted`.
    std::uint64_t max_states = 0;
    double time_limit_seconds = 0;
    /// Stop as soon as every property in this list has a violation.
    std::vector<Property> stop_when_found;
    /// Reports kept per property (each minimized and replayed).
    std::uint32_t keep_per_property = 1;
    /// Nonzero: iterative deepening, max_events = deepen_from, +1, ... up to
    /// max_events; stops early once stop_when_found is satisfied.
    std::uint32_t deepen_from = 0;
    /// Deliver messages to faulty clients as soon as they are sent; such
    /// deliveries are not counted against max_events.
    bool eager_faulty_delivery = true;
};

struct FoundViolation {
    ViolationReport report;
    Schedule schedule;        // minimized
    std::size_t original_events = 0;
    bool replays = false;     // minimized schedule reproduces the report
};

struct ExploreResult {
    std::uint64_t states_visited = 0;
    std::uint64_t transitions = 0;
    std::uint64_t tails_run = 0;
    bool exhausted = false;
    double seconds = 0;
    std::vector<FoundViolation> violations;
    /// Distinct reports per property (by witnesses).
    std::map<Property, std::uint64_t> counts;
    /// Depth bound of the last (or only) pass.
    std::uint32_t max_events = 0;
};

/// Every event the explorer would branch on from `world`.
std::vector<Event> enabled_events(const World& world, const ExploreBounds& bounds);

ExploreResult explore(const Config& cfg, const ExploreBounds& bounds, const std::vector<Property>& properties);

/// Greedy single-event elision until no event can be removed without losing
/// the report.
Schedule minimize(const Schedule& schedule, const ViolationReport& report);

/// Runs the schedule and returns the report for `p`, if any.
std::optional<ViolationReport> replay_check(const Schedule& schedule, Property p);

/// Two interfering commands: alpha from c1 to R and beta from c2 to `beta_target`.
std::vector<WorkloadItem> default_workload(const Config& cfg, std::size_t commands,
                                           const std::string& beta_target = "");

Json encode_result(const ExploreResult& r, const Config& cfg);

}  // namespace ezbft
