// Copyright 2026 The rtolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>

#include "rtolab/scenarios.hpp"
#include "rtolab/timeout_policy.hpp"

namespace py = pybind11;
using namespace rtolab;

namespace {

ClassCase class_case(const std::string& name) {
  if (name == "from_first") return ClassCase::FromFirstEveryFirstLost;
  if (name == "ignore") return ClassCase::IgnoreEveryFirstLost;
  if (name == "early_copy") return ClassCase::EarlyCopyMeasuredLater;
  throw std::invalid_argument("class case must be from_first, ignore or early_copy, got '" + name + "'");
}

py::dict summary_dict(const SummaryReport& s) {
  py::dict d;
  d["packets_offered"] = s.packets_offered;
  d["packets_delivered"] = s.packets_delivered;
  d["total_copies_sent"] = s.total_copies_sent;
  d["duplicates_received"] = s.duplicates_received;
  d["timeout_count"] = s.timeout_count;
  d["drop_count_per_node"] = s.drop_count_per_node;
  d["elapsed"] = s.elapsed;
  d["throughput"] = s.throughput;
  d["final_E"] = s.final_E;
  d["max_E"] = s.max_E;
  d["verdict"] = to_string(s.verdict);
  if (s.algorithm_class) d["algorithm_class"] = to_string(*s.algorithm_class);
  else d["algorithm_class"] = py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_rtolab, m) {
  m.doc() = "Retransmission timeout algorithm laboratory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<RttEstimate>(m, "RttEstimate")
      .def(py::init([](double mean, double variance) { return RttEstimate::initial(mean, variance); }),
           py::arg("mean"), py::arg("variance") = 0.0)
      .def_readonly("mean", &RttEstimate::mean)
      .def_readonly("variance", &RttEstimate::variance)
      .def_readonly("update_count", &RttEstimate::update_count)
      .def("__repr__", [](const RttEstimate& e) {
        std::ostringstream o;
        o << "RttEstimate(mean=" << format_double(e.mean) << ", variance=" << format_double(e.variance)
          << ", update_count=" << e.update_count << ")";
        return o.str();
      });

  m.def("ewma_update", &ewma_update, py::arg("est"), py::arg("sample"), py::arg("alpha"));
  m.def("ewma_shift_update", &ewma_shift_update, py::arg("est"), py::arg("sample"), py::arg("n"));
  m.def("mills_update", &mills_update, py::arg("est"), py::arg("sample"), py::arg("alpha1"), py::arg("alpha2"));
  m.def("edge_update", &edge_update, py::arg("est"), py::arg("sample"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "scale_timeout", [](const RttEstimate& e, double k) { return first_timeout(e, ScaleTimeout{k}); },
      py::arg("est"), py::arg("k"));
  m.def(
      "mean_plus_deviation_timeout",
      [](const RttEstimate& e, double k) { return first_timeout(e, MeanPlusDeviationTimeout{k}); }, py::arg("est"),
      py::arg("k"));

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("time", &TraceRow::time)
      .def_property_readonly("event", [](const TraceRow& r) { return to_string(r.event); })
      .def_readonly("packet_id", &TraceRow::packet_id)
      .def_readonly("copy", &TraceRow::copy)
      .def_readonly("estimate_e", &TraceRow::estimate_e)
      .def_readonly("estimate_v", &TraceRow::estimate_v)
      .def_readonly("timeout_interval", &TraceRow::timeout_interval)
      .def_readonly("retry_count", &TraceRow::retry_count);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("summary", [](const RunResult& r) { return summary_dict(r.summary); })
      .def_readonly("trace", &RunResult::trace)
      .def_property_readonly("trace_csv", [](const RunResult& r) { return format_trace(r.trace); })
      .def_property_readonly("summary_text", [](const RunResult& r) { return format_summary(r.summary); })
      .def_readonly("receiver_duplicates", &RunResult::receiver_duplicates)
      .def_readonly("disconnected", &RunResult::disconnected)
      .def_readonly("completed", &RunResult::completed)
      .def_readonly("waiting_with_timer", &RunResult::waiting_with_timer)
      .def_property_readonly("estimates", [](const RunResult& r) {
        std::vector<double> out;
        for (const auto& p : estimate_trajectory(r.trace)) out.push_back(p.estimate);
        return out;
      });

  m.def("scenario_names", &scenario_names);
  m.def(
      "default_config", [](const std::string& name) { return default_config(name); }, py::arg("name"));
  m.def("policy_catalog", &policy_catalog);
  m.def(
      "run_config",
      [](const ConfigMap& config) {
        const auto scenario = build_scenario(resolve_config(config));
        py::gil_scoped_release unlocked;
        return run_scenario(scenario);
      },
      py::arg("config"));

  m.def("fig3_divergence", &fig3_divergence, py::arg("i_max"));
  m.def(
      "fig6_false_convergence",
      [](const std::string& policy, std::uint64_t packets) {
        const auto r = fig6_false_convergence(policy, packets);
        py::dict d;
        d["estimates"] = r.estimates;
        d["retransmissions"] = r.retransmissions;
        d["duplicates"] = r.run.receiver_duplicates;
        d["verdict"] = to_string(r.run.summary.verdict);
        return d;
      },
      py::arg("policy"), py::arg("packets"));
  m.def(
      "tsao_lee",
      [](double rate, const ConfigMap& overrides) {
        const auto r = tsao_lee(rate, overrides);
        py::dict d;
        d["elapsed"] = r.elapsed;
        d["drops_per_node"] = r.drops_per_node;
        d["timeouts"] = r.timeouts;
        d["waiting_fraction"] = r.waiting_fraction;
        d["completed"] = r.completed;
        return d;
      },
      py::arg("ingress_rate_bps"), py::arg("overrides") = ConfigMap{});
  m.def(
      "loss_threshold_sweep",
      [](double k, const std::vector<double>& ps, const std::vector<std::uint64_t>& seeds, const ConfigMap& overrides) {
        std::vector<SweepPoint> pts;
        {
          py::gil_scoped_release unlocked;
          pts = loss_threshold_sweep(k, ps, seeds, overrides);
        }
        py::list out;
        for (const auto& p : pts) out.append(py::make_tuple(p.p, p.seed, to_string(p.verdict), p.max_E));
        return out;
      },
      py::arg("k"), py::arg("p_values"), py::arg("seeds"), py::arg("overrides") = ConfigMap{});
  m.def(
      "jth_attempt_matrix",
      [](unsigned i, unsigned j) { return std::string(to_string(jth_attempt_matrix(i, j))); }, py::arg("i"),
      py::arg("j"));
  m.def(
      "classify",
      [](const std::string& which, std::uint64_t seed) {
        return std::string(to_string(classify_algorithm(class_case_scenario(class_case(which), seed))));
      },
      py::arg("case"), py::arg("seed") = 1);
  m.def(
      "sweep_csv",
      [](const ConfigMap& config, const std::string& axis, const std::vector<double>& values) {
        const auto base = resolve_config(config);
        py::gil_scoped_release unlocked;
        return format_sweep_csv(sweep(base, axis, values));
      },
      py::arg("config"), py::arg("axis"), py::arg("values"));
}
