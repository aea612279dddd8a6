#pragma once

#include "ezbft/checkers.hpp"

#include <string>
#include <vector>

namespace ezbft {

struct ExpectedReport {
    Property property;
    std::string summary;  // witness_summary of the report
};

struct ScenarioSpec {
    std::string name;
    Schedule schedule;
    std::vector<ExpectedReport> expected;
};

std::vector<std::string> scenario_names();

/// safety, exec-consistency, liveness, or happy. Throws UnknownScenario.
ScenarioSpec build_scenario(const std::string& name);

struct ScenarioResult {
    Trace trace;
    std::vector<ViolationReport> reports;
    bool matches = false;
};

ScenarioResult run_scenario(const ScenarioSpec& spec);

/// Four replicas R, L, Q, T and clients c1, c2.
Config paper_config(std::vector<std::string> byzantine = {}, std::vector<std::string> faulty = {});

/// n = 3f+1 replicas (R, L, Q, T when n = 4, else r0, r1, ...) and clients c1, c2.
Config lab_config(std::uint32_t n, std::uint32_t f, const std::vector<std::string>& byzantine,
                  const std::vector<std::string>& faulty);

}  // namespace ezbft
