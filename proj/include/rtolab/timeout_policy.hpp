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

// First timeout computation (layer 3), back-off across retransmissions of one
// packet (layer 4) and disconnection (layer 5), including the setup-time
// burst of connect requests.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtolab/rng.hpp"
#include "rtolab/rtt_estimation.hpp"

namespace rtolab {

// ---------------------------------------------------------------------------
// Layer 3

struct ScaleTimeout {
  double k;
};
struct MeanPlusDeviationTimeout {
  double k;
};
struct ClampedTimeout {
  double k;
  double t_min;
  double t_max;
};

using Layer3Policy = std::variant<ScaleTimeout, MeanPlusDeviationTimeout, ClampedTimeout>;

void validate(const Layer3Policy& policy);
std::string policy_name(const Layer3Policy& policy);

/// t0 from the current estimate. Throws if the estimate has a nonpositive
/// mean (never initialized) or the result would not be positive.
double first_timeout(const RttEstimate& est, const Layer3Policy& policy);

// ---------------------------------------------------------------------------
// Layer 4

struct NoBackoff {};
struct ExponentialBackoff {
  double b;
};
/// Uniform draw on [t_min, b^i * t0].
struct RandomExponentialBackoff {
  double b;
  double t_min;
};
struct LinearBackoff {
  double dt;
};

struct Layer4Policy {
  std::variant<NoBackoff, ExponentialBackoff, RandomExponentialBackoff, LinearBackoff> rule =
      NoBackoff{};
  std::optional<double> cap;  ///< t_max; every produced interval is <= cap
};

void validate(const Layer4Policy& policy);
std::string policy_name(const Layer4Policy& policy);

/// Retransmission history of the packet currently owning a timer.
struct RetryState {
  std::uint32_t retry_count = 0;
  std::vector<double> interval_history;  ///< t0, t1, ..., ti
  double cumulative_timeout = 0.0;       ///< sum of interval_history
  std::uint64_t packets_delivered = 0;

  /// Starts a fresh history with t0.
  void reset(double t0);
  void push_interval(double t);
};

/// t_i for i = state.retry_count >= 1. `t0` is the first interval of the
/// history; exponential and linear rules chain off interval_history.back().
double backoff_interval(const RetryState& state, double t0, const Layer4Policy& policy, Rng& rng);

// ---------------------------------------------------------------------------
// Layer 5

struct FixedRetries {
  std::uint32_t r;
};
/// r = base_r + floor(log2(1 + delivered)) unless `growth` is supplied.
struct GrowingRetries {
  std::uint32_t base_r;
  std::function<std::uint32_t(std::uint64_t delivered)> growth;

  std::uint32_t limit(std::uint64_t delivered) const;
};
/// Requires both the time budget g and r retries to be exhausted.
struct TotalTimeAndRetries {
  double g;
  std::uint32_t r;
};

using Layer5Policy = std::variant<FixedRetries, GrowingRetries, TotalTimeAndRetries>;

void validate(const Layer5Policy& policy);
std::string policy_name(const Layer5Policy& policy);

bool disconnect_decision(const RetryState& state, const Layer5Policy& policy);

/// Connect-request burst used at setup: r copies spaced t0 apart, then a
/// wait until `patience` for an ack to any of them.
struct ProbePlan {
  std::vector<double> send_times;
  double deadline;
};

ProbePlan setup_probe_plan(double t0, std::uint32_t r, double patience);

struct ProbeOutcome {
  bool connected;
  /// Set when the deadline passed without an ack; the caller should show it
  /// to the user and start another round.
  std::optional<std::string> user_event;
};

/// Resolves one round of the plan given when (if ever) the first ack came.
ProbeOutcome evaluate_probe_round(const ProbePlan& plan, std::optional<double> first_ack_time);

}  // namespace rtolab
