#include "ezbft/explorer.hpp"
#include "ezbft/scenarios.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace ezbft;
namespace fs = std::filesystem;

namespace {

constexpr int kClean = 0;
constexpr int kError = 1;
constexpr int kViolation = 2;

std::vector<std::string> split_ids(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    return out;
}

Json reports_json(const std::vector<ViolationReport>& reports, const Config& cfg) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(encode_report(r, cfg));
    return arr;
}

void print_reports(const std::vector<ViolationReport>& reports, const Config& cfg) {
    for (const auto& r : reports) std::cout << to_string(r.property) << ": " << witness_summary(r, cfg) << "\n";
}

std::vector<ViolationReport> check_trace(const Trace& trace, const std::string& props) {
    const auto obs = observe(trace);
    const auto wanted = props.empty() ? all_properties() : parse_properties(props);
    return check_all(obs, wanted, !props.empty());
}

int cmd_scenario(const std::string& name, const std::string& out) {
    const auto spec = build_scenario(name);
    const auto res = run_scenario(spec);
    const auto& cfg = spec.schedule.config;
    print_reports(res.reports, cfg);
    if (!out.empty()) {
        fs::create_directories(out);
        save_schedule(spec.schedule, (fs::path(out) / (name + ".json")).string());
        write_file((fs::path(out) / (name + ".jsonl")).string(), write_trace(res.trace));
        write_file((fs::path(out) / (name + ".reports.json")).string(), reports_json(res.reports, cfg).dump(2) + "\n");
    }
    std::cout << (res.matches ? "matches expected reports" : "DOES NOT match expected reports") << "\n";
    return res.matches ? kClean : kViolation;
}

int cmd_replay(const std::string& path, const std::string& props, const std::string& trace_out) {
    const auto schedule = load_schedule(path);
    const auto trace = run(schedule);
    if (!trace_out.empty()) write_file(trace_out, write_trace(trace));
    const auto reports = check_trace(trace, props);
    print_reports(reports, schedule.config);
    return reports.empty() ? kClean : kViolation;
}

int cmd_check(const std::string& path, const std::string& props) {
    const auto trace = load_trace(path);
    const auto reports = check_trace(trace, props);
    print_reports(reports, trace.config);
    return reports.empty() ? kClean : kViolation;
}

struct ExploreArgs {
    std::uint32_t replicas = 4;
    std::uint32_t faults = 1;
    std::string byzantine;
    std::string faulty_clients;
    std::uint32_t commands = 2;
    std::string beta_target;
    std::string check;
    std::string out;
    double time_limit = 0;
    ExploreBounds bounds;
};

int cmd_explore(ExploreArgs a) {
    const auto cfg = lab_config(a.replicas, a.faults, split_ids(a.byzantine), split_ids(a.faulty_clients));
    a.bounds.workload = default_workload(cfg, a.commands, a.beta_target);
    a.bounds.time_limit_seconds = a.time_limit;
    const auto props = a.check.empty() ? std::vector<Property>{Property::agreement, Property::validity,
                                                               Property::liveness, Property::dependency_inclusion}
                                       : parse_properties(a.check);
    const auto res = explore(cfg, a.bounds, props);
    const Json j = encode_result(res, cfg);
    std::cout << "states_visited " << res.states_visited << "\nexhausted " << (res.exhausted ? "true" : "false")
              << "\nmax_events " << res.max_events << "\n";
    for (const auto& [p, n] : res.counts) std::cout << to_string(p) << " " << n << "\n";
    for (const auto& v : res.violations) {
        std::cout << "found " << to_string(v.report.property) << ": " << witness_summary(v.report, cfg) << " ("
                  << v.schedule.events.size() << " events, replays " << (v.replays ? "yes" : "no") << ")\n";
    }
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_file((fs::path(a.out) / "result.json").string(), j.dump(2) + "\n");
        std::map<Property, int> seen;
        for (const auto& v : res.violations) {
            const auto file = std::string(to_string(v.report.property)) + "-" +
                              std::to_string(seen[v.report.property]++) + ".json";
            save_schedule(v.schedule, (fs::path(a.out) / file).string());
        }
    }
    return res.violations.empty() ? kClean : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EZBFT simulation lab"};
    app.require_subcommand(1);

    std::string name, out, path, props, trace_out;
    auto* sc = app.add_subcommand("scenario", "Run a scripted scenario and compare against its expected reports");
    sc->add_option("name", name, "safety | exec-consistency | liveness | happy")->required();
    sc->add_option("--out", out, "Directory for schedule, trace and reports");

    auto* rp = app.add_subcommand("replay", "Run a schedule and check the resulting trace");
    rp->add_option("schedule", path)->required()->check(CLI::ExistingFile);
    rp->add_option("--check", props, "Comma-separated properties (default: all applicable)");
    rp->add_option("--trace", trace_out, "Write the trace here");

    std::string check_path, check_props;
    auto* ck = app.add_subcommand("check", "Check a recorded trace");
    ck->add_option("trace", check_path)->required()->check(CLI::ExistingFile);
    ck->add_option("--check", check_props, "Comma-separated properties")->required();

    ExploreArgs ea;
    auto* ex = app.add_subcommand("explore", "Bounded exhaustive search for violations");
    ex->add_option("--replicas", ea.replicas)->default_val(4);
    ex->add_option("--faults", ea.faults)->default_val(1);
    ex->add_option("--byzantine", ea.byzantine, "Comma-separated replica ids");
    ex->add_option("--faulty-clients", ea.faulty_clients, "Comma-separated client ids");
    ex->add_option("--max-events", ea.bounds.max_events)->default_val(40);
    ex->add_option("--out", ea.out, "Directory for result.json and minimized schedules");
    ex->add_option("--commands", ea.commands, "1 (alpha) or 2 (alpha, beta)")->default_val(2);
    ex->add_option("--beta-target", ea.beta_target, "Replica beta is sent to");
    ex->add_option("--max-owner-changes", ea.bounds.max_owner_changes_per_instance)->default_val(1);
    ex->add_option("--branch-tuples", ea.bounds.byzantine_branch_tuples)->default_val(2);
    ex->add_option("--faulty-sends", ea.bounds.faulty_sends)->default_val(2);
    ex->add_option("--deepen-from", ea.bounds.deepen_from, "Iterative deepening start depth (0 = off)");
    ex->add_option("--time-limit", ea.time_limit, "Seconds (0 = none)");
    ex->add_option("--check", ea.check, "Comma-separated properties");
    bool stop_when_found = false;
    ex->add_flag("--stop-when-found", stop_when_found, "Stop once every checked property has a violation");
    ex->add_option("--keep", ea.bounds.keep_per_property, "Violations kept per property")->default_val(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kClean : kError;
    }

    try {
        if (*sc) return cmd_scenario(name, out);
        if (*rp) return cmd_replay(path, props, trace_out);
        if (*ck) return cmd_check(check_path, check_props);
        if (*ex) {
            if (stop_when_found) {
                ea.bounds.stop_when_found =
                    ea.check.empty() ? std::vector<Property>{Property::agreement, Property::validity, Property::liveness,
                                                             Property::dependency_inclusion}
                                     : parse_properties(ea.check);
            }
            return cmd_explore(ea);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
