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

// Named experiments and the driver that runs a sender/receiver pair over a
// chain network inside one engine.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtolab/config.hpp"
#include "rtolab/metrics_report.hpp"
#include "rtolab/sim_core.hpp"
#include "rtolab/transport.hpp"

namespace rtolab {

enum class LossKind { None, Bernoulli, EveryFirstCopyLost, ForcedCopy, BufferOverflowOnly };

struct LossModel {
  LossKind kind = LossKind::None;
  double p = 0.0;                   ///< Bernoulli, per copy
  std::uint32_t delivered_copy = 1;  ///< ForcedCopy: the only copy let through
  double ack_p = 0.0;               ///< reverse-path loss, any kind
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  double horizon = 1e9;  ///< seconds
  std::int64_t ticks_per_second = 1'000'000;

  Topology topology;
  LossModel loss;
  TimeoutAlgorithm algorithm;
  SenderOptions sender;
  double initial_estimate = 1.0;
  double initial_variance = 0.0;
  std::uint64_t packet_count = 100;
  double true_rtt = 1.0;

  SummaryOptions detectors;
};

class UnknownScenario : public ConfigError {
 public:
  explicit UnknownScenario(const std::string& name) : ConfigError("unknown scenario '" + name + "'") {}
};

/// fig3, fig6_fromlast, fig6_ignore, tsao_lee_slow, tsao_lee_fast,
/// loss_sweep, jth_matrix, classify.
const std::vector<std::string>& scenario_names();

/// Complete key set with the defaults of scenario `name`.
ConfigMap default_config(std::string_view name);
/// Defaults for config["scenario"] with config merged on top.
ConfigMap resolve_config(const ConfigMap& config);
/// Throws ConfigError on bad values.
Scenario build_scenario(const ConfigMap& config);
Scenario named_scenario(std::string_view name, const ConfigMap& overrides = {});

/// Layer identifiers with their parameter keys, one line per layer.
std::string policy_catalog();

struct RunOptions {
  bool log_events = false;
};

struct RunResult {
  std::vector<TraceRow> trace;
  SummaryReport summary;
  SimStats sim;
  std::vector<SimEvent> event_log;
  std::uint64_t receiver_copies = 0;
  std::uint64_t receiver_duplicates = 0;
  std::uint64_t network_copies_sent = 0;
  std::uint64_t network_drops = 0;
  std::uint64_t timeout_events = 0;
  bool disconnected = false;
  bool completed = false;  ///< every offered packet acknowledged
  /// Seconds with a timer armed while the source link sat idle, counted up
  /// to the last ack or disconnect (the summary's elapsed).
  double waiting_with_timer = 0.0;
  /// The conservation identity held after every event.
  bool conservation_held = true;
  std::size_t max_armed_timers = 0;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Canned experiments

/// E0..E_imax from the stop-and-wait run where every first copy is lost.
std::vector<double> fig3_divergence(unsigned i_max);

struct FalseConvergenceRun {
  std::vector<double> estimates;  ///< E after each acknowledged packet
  std::uint64_t retransmissions = 0;
  RunResult run;
};

/// `policy` is "from_last", "ignore" or "from_first".
FalseConvergenceRun fig6_false_convergence(std::string_view policy, std::uint64_t packets);

struct TsaoLeeRun {
  double elapsed = 0.0;
  std::vector<std::uint64_t> drops_per_node;
  std::uint64_t timeouts = 0;
  double waiting_fraction = 0.0;
  bool completed = false;
  RunResult run;
};

TsaoLeeRun tsao_lee(double ingress_rate_bps, const ConfigMap& overrides = {});

struct SweepPoint {
  double p = 0.0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::Bounded;
  double max_E = 0.0;
};

/// Runs every (p, seed) pair, sorted by p then seed.
std::vector<SweepPoint> loss_threshold_sweep(double k, const std::vector<double>& p_values,
                                             const std::vector<std::uint64_t>& seeds,
                                             const ConfigMap& overrides = {});

enum class CopyOutcome { Converges, Diverges, FalseConverges, Indeterminate };
const char* to_string(CopyOutcome o);

/// Only copy i reaches the receiver; samples are measured from copy j.
CopyOutcome jth_attempt_matrix(unsigned i, unsigned j, const ConfigMap& overrides = {});

/// Class of the algorithm in `scenario`, from the mean estimate change
/// across multi-copy acks. Throws if the run had no multi-copy acks.
AlgorithmClass classify_algorithm(const Scenario& scenario);

enum class ClassCase { FromFirstEveryFirstLost, IgnoreEveryFirstLost, EarlyCopyMeasuredLater };
/// Scenario for one of the three canned class demonstrations.
Scenario class_case_scenario(ClassCase which, std::uint64_t seed);

struct SweepRow {
  double param = 0.0;
  SummaryReport summary;
};

/// One run per value of `axis` (a config key, or the aliases p and k),
/// executed concurrently and returned sorted by value.
std::vector<SweepRow> sweep(const ConfigMap& base, std::string_view axis, const std::vector<double>& values);
/// param,verdict,final_e,throughput,duplicates
std::string format_sweep_csv(const std::vector<SweepRow>& rows);
/// Maps the axis aliases to their config keys; throws ConfigError for keys
/// not in the config.
std::string resolve_axis(const ConfigMap& config, std::string_view axis);

}  // namespace rtolab
