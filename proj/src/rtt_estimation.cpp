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

#include "rtolab/rtt_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtolab/detail/overloaded.hpp"

namespace rtolab {
namespace {

using detail::overloaded;

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

void check_sample(double sample) {
  if (!(sample >= 0.0)) throw std::invalid_argument("rtt sample must be nonnegative");
}

// Weighted average kept inside [min(e, s), max(e, s)]; rounding could
// otherwise step just outside, and e == s must stay a fixed point.
double blend(double e, double s, double a) {
  return std::clamp(a * e + (1.0 - a) * s, std::min(e, s), std::max(e, s));
}

}  // namespace

RttEstimate RttEstimate::initial(double mean, double variance) {
  if (!(mean > 0.0)) throw std::invalid_argument("initial estimate must be positive");
  if (!(variance >= 0.0)) throw std::invalid_argument("initial variance must be nonnegative");
  return RttEstimate{mean, variance, 0};
}

void validate(const Layer1Policy& policy) {
  std::visit(overloaded{
                 [](const EwmaPolicy& p) {
                   if (!open_unit(p.alpha)) throw std::invalid_argument("ewma: alpha must be in (0,1)");
                 },
                 [](const EwmaShiftPolicy& p) {
                   if (p.n < 1 || p.n > 52) throw std::invalid_argument("ewma_shift: n must be in 1..52");
                 },
                 [](const MillsPolicy& p) {
                   if (!(0.0 < p.alpha2 && p.alpha2 <= p.alpha1 && p.alpha1 < 1.0))
                     throw std::invalid_argument("mills: requires 0 < alpha2 <= alpha1 < 1");
                 },
                 [](const EdgePolicy& p) {
                   if (!open_unit(p.alpha) || !open_unit(p.beta))
                     throw std::invalid_argument("edge: alpha and beta must be in (0,1)");
                 },
             },
             policy);
}

std::string policy_name(const Layer1Policy& policy) {
  static constexpr const char* names[] = {"ewma", "ewma_shift", "mills", "edge"};
  return names[policy.index()];
}

RttEstimate ewma_update(const RttEstimate& est, double sample, double alpha) {
  if (!open_unit(alpha)) throw std::invalid_argument("ewma: alpha must be in (0,1)");
  check_sample(sample);
  RttEstimate out = est;
  out.mean = blend(est.mean, sample, alpha);
  ++out.update_count;
  return out;
}

RttEstimate ewma_shift_update(const RttEstimate& est, double sample, unsigned n) {
  if (n < 1 || n > 52) throw std::invalid_argument("ewma_shift: n must be in 1..52");
  check_sample(sample);
  RttEstimate out = est;
  out.mean = est.mean + std::ldexp(sample - est.mean, -static_cast<int>(n));
  ++out.update_count;
  return out;
}

RttEstimate mills_update(const RttEstimate& est, double sample, double alpha1, double alpha2) {
  // Equal gains are accepted and reduce to plain EWMA.
  if (!(0.0 < alpha2 && alpha2 <= alpha1 && alpha1 < 1.0))
    throw std::invalid_argument("mills: requires 0 < alpha2 <= alpha1 < 1");
  check_sample(sample);
  const double a = sample < est.mean ? alpha1 : alpha2;
  RttEstimate out = est;
  out.mean = blend(est.mean, sample, a);
  ++out.update_count;
  return out;
}

RttEstimate edge_update(const RttEstimate& est, double sample, double alpha, double beta) {
  if (!open_unit(alpha) || !open_unit(beta))
    throw std::invalid_argument("edge: alpha and beta must be in (0,1)");
  check_sample(sample);
  const double err = sample - est.mean;
  RttEstimate out = est;
  out.variance = beta * est.variance + (1.0 - beta) * err * err;
  out.mean = blend(est.mean, sample, alpha);
  ++out.update_count;
  return out;
}

RttEstimate apply_sample(const RttEstimate& est, double sample, const Layer1Policy& policy) {
  return std::visit(
      overloaded{
          [&](const EwmaPolicy& p) { return ewma_update(est, sample, p.alpha); },
          [&](const EwmaShiftPolicy& p) { return ewma_shift_update(est, sample, p.n); },
          [&](const MillsPolicy& p) { return mills_update(est, sample, p.alpha1, p.alpha2); },
          [&](const EdgePolicy& p) { return edge_update(est, sample, p.alpha, p.beta); },
      },
      policy);
}

IncreaseScheme make_increase_scheme(IncreaseScheme scheme) {
  std::visit(overloaded{
                 [](LinearIncrease& s) {
                   if (!(s.delta > 0.0)) throw std::invalid_argument("linear increase: delta must be > 0");
                 },
                 [](ParabolicIncrease& s) {
                   if (!(s.delta0 > 0.0) || !(s.second_delta >= 0.0))
                     throw std::invalid_argument("parabolic increase: needs delta0 > 0, second_delta >= 0");
                   s.current = s.delta0;
                 },
                 [](ExponentialIncrease& s) {
                   if (!(s.c > 1.0)) throw std::invalid_argument("exponential increase: c must be > 1");
                 },
                 [](SecondOrderExponentialIncrease& s) {
                   if (!(s.c0 > 1.0) || !(s.dc >= 0.0))
                     throw std::invalid_argument("second-order increase: needs c0 > 1, dc >= 0");
                   s.current = s.c0;
                 },
             },
             scheme);
  return scheme;
}

IncreaseOutcome increase_estimate(const RttEstimate& est, const IncreaseScheme& scheme) {
  IncreaseOutcome out{est, scheme};
  std::visit(overloaded{
                 [&](LinearIncrease& s) { out.estimate.mean = est.mean + s.delta; },
                 [&](ParabolicIncrease& s) {
                   out.estimate.mean = est.mean + s.current;
                   s.current += s.second_delta;
                 },
                 [&](ExponentialIncrease& s) { out.estimate.mean = s.c * est.mean; },
                 [&](SecondOrderExponentialIncrease& s) {
                   out.estimate.mean = s.current * est.mean;
                   s.current += s.dc;
                 },
             },
             out.scheme);
  return out;
}

void validate(const Layer2Policy& policy) {
  if (const auto* p = std::get_if<FromCopy>(&policy); p && p->j < 1)
    throw std::invalid_argument("from_copy: j must be >= 1");
  if (const auto* p = std::get_if<IgnoreAndIncrease>(&policy)) (void)make_increase_scheme(p->scheme);
}

std::string policy_name(const Layer2Policy& policy) {
  return std::visit(overloaded{
                        [](const FromFirst&) -> std::string { return "from_first"; },
                        [](const FromLast&) -> std::string { return "from_last"; },
                        [](const FromCopy&) -> std::string { return "from_copy"; },
                        [](const Ignore&) -> std::string { return "ignore"; },
                        [](const IgnoreAndIncrease& p) -> std::string {
                          static constexpr const char* suffix[] = {"linear", "parabolic", "exp", "exp2"};
                          return std::string("ignore_increase_") + suffix[p.scheme.index()];
                        },
                    },
                    policy);
}

void TransmissionRecord::add_copy(SimTime at) {
  if (!copy_send_times.empty() && at <= copy_send_times.back())
    throw std::invalid_argument("copy send times must be strictly increasing");
  copy_send_times.push_back(at);
}

std::optional<double> extract_sample(const TransmissionRecord& record, SimTime ack_time,
                                     const Layer2Policy& policy, const TickScale& scale,
                                     double floor_seconds) {
  const auto& sends = record.copy_send_times;
  if (sends.empty()) throw std::invalid_argument("transmission record has no copies");

  auto interval_from = [&](std::size_t copy_index) {
    const double s = scale.to_seconds(ack_time - sends[copy_index]);
    return s > 0.0 ? s : floor_seconds;
  };

  if (sends.size() == 1) return interval_from(0);

  return std::visit(overloaded{
                        [&](const FromFirst&) -> std::optional<double> { return interval_from(0); },
                        [&](const FromLast&) -> std::optional<double> { return interval_from(sends.size() - 1); },
                        [&](const FromCopy& p) -> std::optional<double> {
                          if (p.j < 1) throw std::invalid_argument("from_copy: j must be >= 1");
                          return interval_from(std::min<std::size_t>(p.j, sends.size()) - 1);
                        },
                        [](const Ignore&) -> std::optional<double> { return std::nullopt; },
                        [](const IgnoreAndIncrease&) -> std::optional<double> { return std::nullopt; },
                    },
                    policy);
}

}  // namespace rtolab
