#include "ezbft/explorer.hpp"
#include "ezbft/scenarios.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ezbft;

namespace {

std::string run_scenario_json(const std::string& name) {
    const auto spec = build_scenario(name);
    const auto res = run_scenario(spec);
    Json reports = Json::array();
    for (const auto& r : res.reports) reports.push_back(encode_report(r, spec.schedule.config));
    Json out;
    out["schedule"] = encode_schedule(spec.schedule);
    out["trace"] = write_trace(res.trace);
    out["reports"] = reports;
    out["matches"] = res.matches;
    return out.dump();
}

std::string run_schedule(const std::string& schedule_json) {
    return write_trace(run(decode_schedule(Json::parse(schedule_json))));
}

std::string check_trace(const std::string& trace_jsonl, const std::string& properties) {
    const auto t = read_trace(trace_jsonl);
    Json out = Json::array();
    for (const auto& r : check_all(observe(t), parse_properties(properties))) out.push_back(encode_report(r, t.config));
    return out.dump();
}

std::string explore_json(std::uint32_t replicas, std::uint32_t faults, const std::vector<std::string>& byzantine,
                         const std::vector<std::string>& faulty_clients, std::uint32_t max_events,
                         std::size_t commands, const std::string& beta_target, std::uint32_t max_owner_changes,
                         std::uint32_t deepen_from, double time_limit, const std::string& properties,
                         const std::string& stop_when_found) {
    const auto cfg = lab_config(replicas, faults, byzantine, faulty_clients);
    ExploreBounds b;
    b.workload = default_workload(cfg, commands, beta_target);
    b.max_events = max_events;
    b.max_owner_changes_per_instance = max_owner_changes;
    b.deepen_from = deepen_from;
    b.time_limit_seconds = time_limit;
    if (!stop_when_found.empty()) b.stop_when_found = parse_properties(stop_when_found);
    return encode_result(explore(cfg, b, parse_properties(properties)), cfg).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<Error>(m, "EzbftError", PyExc_ValueError);
    m.def("scenario_names", &scenario_names);
    m.def("run_scenario", &run_scenario_json, py::arg("name"));
    m.def("run_schedule", &run_schedule, py::arg("schedule_json"));
    m.def("check_trace", &check_trace, py::arg("trace_jsonl"), py::arg("properties") = "all");
    m.def("explore", &explore_json, py::arg("replicas") = 4, py::arg("faults") = 1,
          py::arg("byzantine") = std::vector<std::string>{}, py::arg("faulty_clients") = std::vector<std::string>{},
          py::arg("max_events") = 40, py::arg("commands") = 2, py::arg("beta_target") = "",
          py::arg("max_owner_changes") = 1, py::arg("deepen_from") = 0, py::arg("time_limit") = 0.0,
          py::arg("properties") = "all", py::arg("stop_when_found") = "",
          py::call_guard<py::gil_scoped_release>());
}
