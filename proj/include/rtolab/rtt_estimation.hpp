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

// Round-trip delay estimation: how a sample updates the estimate (layer 1)
// and how a sample is obtained, or replaced, when a packet needed more than
// one transmission (layer 2). Everything here is a pure function of its
// arguments; durations are seconds as double.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtolab/sim_time.hpp"

namespace rtolab {

using PacketId = std::int64_t;

struct RttEstimate {
  double mean = 1.0;      ///< E, seconds
  double variance = 0.0;  ///< V, seconds^2 (only the mean+variance estimator moves it)
  std::uint64_t update_count = 0;

  /// Rejects a nonpositive mean or negative variance.
  static RttEstimate initial(double mean, double variance = 0.0);
};

// ---------------------------------------------------------------------------
// Layer 1

struct EwmaPolicy {
  double alpha;
};
struct EwmaShiftPolicy {
  unsigned n;
};
/// Separate gains for samples below (alpha1) and at/above (alpha2) the estimate.
struct MillsPolicy {
  double alpha1;
  double alpha2;
};
/// Mean and variance, both exponentially averaged.
struct EdgePolicy {
  double alpha;
  double beta;
};

using Layer1Policy = std::variant<EwmaPolicy, EwmaShiftPolicy, MillsPolicy, EdgePolicy>;

/// Throws std::invalid_argument when a parameter is out of range.
void validate(const Layer1Policy& policy);
std::string policy_name(const Layer1Policy& policy);

RttEstimate ewma_update(const RttEstimate& est, double sample, double alpha);
RttEstimate ewma_shift_update(const RttEstimate& est, double sample, unsigned n);
RttEstimate mills_update(const RttEstimate& est, double sample, double alpha1, double alpha2);
/// V is moved with the error against the pre-update mean, then E is moved.
RttEstimate edge_update(const RttEstimate& est, double sample, double alpha, double beta);

RttEstimate apply_sample(const RttEstimate& est, double sample, const Layer1Policy& policy);

// ---------------------------------------------------------------------------
// Layer 2

struct LinearIncrease {
  double delta;  ///< seconds added per application
};
struct ParabolicIncrease {
  double delta0;        ///< first increment, seconds
  double second_delta;  ///< growth of the increment per application, seconds
  double current = 0;   ///< increment used by the next application
};
struct ExponentialIncrease {
  double c;
};
struct SecondOrderExponentialIncrease {
  double c0;
  double dc;
  double current = 0;  ///< multiplier used by the next application
};

/// Increase applied instead of a sample after a multi-copy acknowledgment.
/// The dimensionless multipliers work across all delay scales; the linear and
/// parabolic forms need increments chosen for the delay range at hand.
using IncreaseScheme = std::variant<LinearIncrease, ParabolicIncrease, ExponentialIncrease,
                                    SecondOrderExponentialIncrease>;

/// Validates and sets the running increment/multiplier to its starting value.
IncreaseScheme make_increase_scheme(IncreaseScheme scheme);

struct IncreaseOutcome {
  RttEstimate estimate;
  IncreaseScheme scheme;  ///< advanced state for the next application
};

/// Leaves update_count alone: an increase is not a sample.
IncreaseOutcome increase_estimate(const RttEstimate& est, const IncreaseScheme& scheme);

struct FromFirst {};
struct FromLast {};
struct FromCopy {
  unsigned j;
};
struct Ignore {};
struct IgnoreAndIncrease {
  IncreaseScheme scheme;
};

using Layer2Policy = std::variant<FromFirst, FromLast, FromCopy, Ignore, IgnoreAndIncrease>;

void validate(const Layer2Policy& policy);
std::string policy_name(const Layer2Policy& policy);

struct TransmissionRecord {
  PacketId packet_id = 0;
  std::vector<SimTime> copy_send_times;  ///< strictly increasing, one per copy
  std::optional<SimTime> first_ack_time;

  std::size_t copies() const { return copy_send_times.size(); }
  /// Appends a copy; rejects a send time not after the previous one.
  void add_copy(SimTime at);
};

/// Sample delay for an acknowledgment under a layer 2 policy. nullopt means
/// the policy discards the sample. Nonpositive intervals are raised to
/// `floor_seconds` (callers normally pass one tick).
std::optional<double> extract_sample(const TransmissionRecord& record, SimTime ack_time,
                                     const Layer2Policy& policy, const TickScale& scale,
                                     double floor_seconds);

}  // namespace rtolab
