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

#include "rtolab/timeout_policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "rtolab/detail/overloaded.hpp"

namespace rtolab {

using detail::overloaded;

void validate(const Layer3Policy& policy) {
  std::visit(overloaded{
                 [](const ScaleTimeout& p) {
                   if (!(p.k > 0.0)) throw std::invalid_argument("scale: k must be > 0");
                 },
                 [](const MeanPlusDeviationTimeout& p) {
                   if (!(p.k >= 0.0)) throw std::invalid_argument("mean_plus_dev: k must be >= 0");
                 },
                 [](const ClampedTimeout& p) {
                   if (!(p.k > 0.0)) throw std::invalid_argument("clamped: k must be > 0");
                   if (!(0.0 < p.t_min && p.t_min <= p.t_max))
                     throw std::invalid_argument("clamped: requires 0 < t_min <= t_max");
                 },
             },
             policy);
}

std::string policy_name(const Layer3Policy& policy) {
  static constexpr const char* names[] = {"scale", "mean_plus_dev", "clamped"};
  return names[policy.index()];
}

double first_timeout(const RttEstimate& est, const Layer3Policy& policy) {
  if (!(est.mean > 0.0)) throw std::invalid_argument("first_timeout: estimate is not initialized");
  const double t0 = std::visit(
      overloaded{
          [&](const ScaleTimeout& p) { return p.k * est.mean; },
          [&](const MeanPlusDeviationTimeout& p) { return est.mean + p.k * std::sqrt(est.variance); },
          [&](const ClampedTimeout& p) { return std::max(p.t_min, std::min(p.k * est.mean, p.t_max)); },
      },
      policy);
  if (!(t0 > 0.0)) throw std::invalid_argument("first_timeout: policy produced a nonpositive interval");
  return t0;
}

void validate(const Layer4Policy& policy) {
  std::visit(overloaded{
                 [](const NoBackoff&) {},
                 [](const ExponentialBackoff& p) {
                   if (!(p.b > 1.0)) throw std::invalid_argument("exp: b must be > 1");
                 },
                 [](const RandomExponentialBackoff& p) {
                   if (!(p.b > 1.0)) throw std::invalid_argument("rand_exp: b must be > 1");
                   if (!(p.t_min > 0.0)) throw std::invalid_argument("rand_exp: t_min must be > 0");
                 },
                 [](const LinearBackoff& p) {
                   if (!(p.dt > 0.0)) throw std::invalid_argument("linear: dt must be > 0");
                 },
             },
             policy.rule);
  if (policy.cap && !(*policy.cap > 0.0)) throw std::invalid_argument("back-off cap must be > 0");
}

std::string policy_name(const Layer4Policy& policy) {
  static constexpr const char* names[] = {"none", "exp", "rand_exp", "linear"};
  return names[policy.rule.index()];
}

void RetryState::reset(double t0) {
  retry_count = 0;
  interval_history.assign(1, t0);
  cumulative_timeout = t0;
}

void RetryState::push_interval(double t) {
  interval_history.push_back(t);
  cumulative_timeout += t;
}

double backoff_interval(const RetryState& state, double t0, const Layer4Policy& policy, Rng& rng) {
  if (state.retry_count == 0) throw std::invalid_argument("backoff_interval: retry_count must be >= 1");
  const double previous = state.interval_history.empty() ? t0 : state.interval_history.back();
  const double i = static_cast<double>(state.retry_count);
  double t = std::visit(overloaded{
                            [&](const NoBackoff&) { return t0; },
                            [&](const ExponentialBackoff& p) { return p.b * previous; },
                            [&](const RandomExponentialBackoff& p) {
                              const double hi = std::pow(p.b, i) * t0;
                              return hi <= p.t_min ? p.t_min : rng.uniform(p.t_min, hi);
                            },
                            [&](const LinearBackoff& p) { return previous + p.dt; },
                        },
                        policy.rule);
  if (policy.cap) t = std::min(t, *policy.cap);
  return t;
}

std::uint32_t GrowingRetries::limit(std::uint64_t delivered) const {
  if (growth) return growth(delivered);
  // floor(log2(1 + delivered)) is the index of the highest set bit.
  return base_r + static_cast<std::uint32_t>(std::bit_width(delivered + 1) - 1);
}

void validate(const Layer5Policy& policy) {
  std::visit(overloaded{
                 [](const FixedRetries& p) {
                   if (p.r < 1) throw std::invalid_argument("fixed_retries: r must be >= 1");
                 },
                 [](const GrowingRetries& p) {
                   if (p.base_r < 1) throw std::invalid_argument("growing_retries: base_r must be >= 1");
                 },
                 [](const TotalTimeAndRetries& p) {
                   if (p.r < 1) throw std::invalid_argument("time_and_retries: r must be >= 1");
                   if (!(p.g > 0.0)) throw std::invalid_argument("time_and_retries: g must be > 0");
                 },
             },
             policy);
}

std::string policy_name(const Layer5Policy& policy) {
  static constexpr const char* names[] = {"fixed_retries", "growing_retries", "time_and_retries"};
  return names[policy.index()];
}

bool disconnect_decision(const RetryState& state, const Layer5Policy& policy) {
  if (state.retry_count == 0) return false;
  return std::visit(overloaded{
                        [&](const FixedRetries& p) { return state.retry_count >= p.r; },
                        [&](const GrowingRetries& p) {
                          return state.retry_count >= p.limit(state.packets_delivered);
                        },
                        [&](const TotalTimeAndRetries& p) {
                          return state.cumulative_timeout >= p.g && state.retry_count >= p.r;
                        },
                    },
                    policy);
}

ProbePlan setup_probe_plan(double t0, std::uint32_t r, double patience) {
  if (r < 1) throw std::invalid_argument("setup_probe_plan: r must be >= 1");
  if (!(t0 > 0.0)) throw std::invalid_argument("setup_probe_plan: t0 must be > 0");
  if (!(patience > r * t0))
    throw std::invalid_argument("setup_probe_plan: patience must exceed r * t0");
  ProbePlan plan;
  plan.send_times.reserve(r);
  for (std::uint32_t i = 0; i < r; ++i) plan.send_times.push_back(i * t0);
  plan.deadline = patience;
  return plan;
}

ProbeOutcome evaluate_probe_round(const ProbePlan& plan, std::optional<double> first_ack_time) {
  if (first_ack_time && *first_ack_time <= plan.deadline) return {true, std::nullopt};
  return {false, std::string("retrying ...")};
}

}  // namespace rtolab
