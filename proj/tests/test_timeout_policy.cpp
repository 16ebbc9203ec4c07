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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rtolab/timeout_policy.hpp"

using namespace rtolab;

namespace {

RetryState history(std::initializer_list<double> intervals) {
  RetryState s;
  bool first = true;
  for (double t : intervals) {
    if (first) {
      s.reset(t);
      first = false;
    } else {
      ++s.retry_count;
      s.push_interval(t);
    }
  }
  return s;
}

// Runs the back-off chain for `n` retries starting from t0.
std::vector<double> chain(double t0, const Layer4Policy& p, std::size_t n, std::uint64_t seed = 1) {
  Rng rng(seed);
  RetryState s;
  s.reset(t0);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    ++s.retry_count;
    const double t = backoff_interval(s, t0, p, rng);
    s.push_interval(t);
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("first_timeout examples") {
  CHECK(first_timeout(RttEstimate{1, 0, 0}, ScaleTimeout{4}) == 4.0);
  CHECK(first_timeout(RttEstimate{5, 0, 0}, ScaleTimeout{2}) == 10.0);
  CHECK(first_timeout(RttEstimate{3, 4, 0}, MeanPlusDeviationTimeout{2}) == 7.0);
  CHECK(first_timeout(RttEstimate{0.1, 0, 0}, ClampedTimeout{4, 1, 30}) == 1.0);
  CHECK(first_timeout(RttEstimate{20, 0, 0}, ClampedTimeout{4, 1, 30}) == 30.0);
  CHECK(first_timeout(RttEstimate{2, 0, 0}, ClampedTimeout{4, 1, 30}) == 8.0);
}

TEST_CASE("first_timeout rejects an uninitialized estimate") {
  CHECK_THROWS_AS(first_timeout(RttEstimate{0, 0, 0}, ScaleTimeout{4}), std::invalid_argument);
}

TEST_CASE("layer 3 parameter validation") {
  CHECK_THROWS_AS(validate(Layer3Policy{ScaleTimeout{0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer3Policy{MeanPlusDeviationTimeout{-1}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer3Policy{ClampedTimeout{4, 0, 30}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer3Policy{ClampedTimeout{4, 5, 3}}), std::invalid_argument);
  CHECK_NOTHROW(validate(Layer3Policy{MeanPlusDeviationTimeout{0}}));
}

TEST_CASE("backoff examples") {
  CHECK(chain(4, Layer4Policy{ExponentialBackoff{2}, std::nullopt}, 2) == std::vector<double>{8, 16});
  CHECK(chain(4, Layer4Policy{NoBackoff{}, std::nullopt}, 5) == std::vector<double>{4, 4, 4, 4, 4});
  CHECK(chain(4, Layer4Policy{ExponentialBackoff{2}, 10.0}, 3) == std::vector<double>{8, 10, 10});
  CHECK(chain(4, Layer4Policy{LinearBackoff{1.5}, std::nullopt}, 3) == std::vector<double>{5.5, 7, 8.5});
}

TEST_CASE("random exponential backoff stays in range") {
  const Layer4Policy p{RandomExponentialBackoff{2, 1}, std::nullopt};
  Rng rng(42);
  const auto s = history({4, 4, 4, 4});
  for (int n = 0; n < 200; ++n) {
    const double t = backoff_interval(s, 4, p, rng);
    CHECK(t >= 1.0);
    CHECK(t <= 32.0);
  }
}

TEST_CASE("backoff rejects retry zero") {
  Rng rng(1);
  RetryState s;
  s.reset(4);
  CHECK_THROWS_AS(backoff_interval(s, 4, Layer4Policy{}, rng), std::invalid_argument);
}

TEST_CASE("layer 4 parameter validation") {
  CHECK_THROWS_AS(validate(Layer4Policy{ExponentialBackoff{1}, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer4Policy{RandomExponentialBackoff{2, 0}, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer4Policy{LinearBackoff{0}, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer4Policy{NoBackoff{}, 0.0}), std::invalid_argument);
}

TEST_CASE("retry state bookkeeping") {
  auto s = history({4, 8, 16});
  CHECK(s.retry_count == 2);
  CHECK(s.cumulative_timeout == 28.0);
  s.reset(3);
  CHECK(s.retry_count == 0);
  CHECK(s.interval_history == std::vector<double>{3});
  CHECK(s.cumulative_timeout == 3.0);
}

TEST_CASE("disconnect examples") {
  RetryState s;
  s.retry_count = 10;
  CHECK(disconnect_decision(s, FixedRetries{10}));
  s.retry_count = 9;
  CHECK_FALSE(disconnect_decision(s, FixedRetries{10}));

  RetryState zero;
  zero.cumulative_timeout = 1e9;
  CHECK_FALSE(disconnect_decision(zero, FixedRetries{1}));
  CHECK_FALSE(disconnect_decision(zero, GrowingRetries{1, {}}));
  CHECK_FALSE(disconnect_decision(zero, TotalTimeAndRetries{1, 0}));

  RetryState t;
  t.retry_count = 4;
  t.cumulative_timeout = 25;
  CHECK(disconnect_decision(t, TotalTimeAndRetries{20, 3}));
  t.cumulative_timeout = 19;
  CHECK_FALSE(disconnect_decision(t, TotalTimeAndRetries{20, 3}));
}

TEST_CASE("growing retries") {
  const GrowingRetries g{10, {}};
  CHECK(g.limit(0) == 10);
  CHECK(g.limit(1) == 11);
  CHECK(g.limit(2) == 11);
  CHECK(g.limit(3) == 12);
  CHECK(g.limit(1000) == 19);

  RetryState s;
  s.retry_count = 11;
  s.packets_delivered = 3;
  CHECK_FALSE(disconnect_decision(s, g));
  s.packets_delivered = 1;
  CHECK(disconnect_decision(s, g));

  const GrowingRetries custom{2, [](std::uint64_t d) { return static_cast<std::uint32_t>(2 + d); }};
  CHECK(custom.limit(5) == 7);
}

TEST_CASE("probe plan examples") {
  const auto plan = setup_probe_plan(1, 3, 5);
  CHECK(plan.send_times == std::vector<double>{0, 1, 2});
  CHECK(plan.deadline == 5.0);

  const auto single = setup_probe_plan(2, 1, 7);
  CHECK(single.send_times == std::vector<double>{0});
  CHECK(single.deadline == 7.0);

  CHECK_THROWS_AS(setup_probe_plan(1, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(setup_probe_plan(1, 0, 3), std::invalid_argument);
}

TEST_CASE("probe round outcome") {
  const auto plan = setup_probe_plan(1, 3, 5);
  const auto missed = evaluate_probe_round(plan, std::nullopt);
  CHECK_FALSE(missed.connected);
  REQUIRE(missed.user_event.has_value());
  CHECK(missed.user_event->find("retrying") != std::string::npos);

  const auto late = evaluate_probe_round(plan, 6.0);
  CHECK_FALSE(late.connected);
  CHECK(late.user_event.has_value());

  const auto ok = evaluate_probe_round(plan, 1.5);
  CHECK(ok.connected);
  CHECK_FALSE(ok.user_event.has_value());
}

TEST_CASE("layer 3-5 identifiers") {
  CHECK(policy_name(Layer3Policy{ScaleTimeout{1}}) == "scale");
  CHECK(policy_name(Layer3Policy{MeanPlusDeviationTimeout{1}}) == "mean_plus_dev");
  CHECK(policy_name(Layer3Policy{ClampedTimeout{1, 1, 2}}) == "clamped");
  CHECK(policy_name(Layer4Policy{NoBackoff{}, std::nullopt}) == "none");
  CHECK(policy_name(Layer4Policy{ExponentialBackoff{2}, std::nullopt}) == "exp");
  CHECK(policy_name(Layer4Policy{RandomExponentialBackoff{2, 1}, std::nullopt}) == "rand_exp");
  CHECK(policy_name(Layer4Policy{LinearBackoff{1}, std::nullopt}) == "linear");
  CHECK(policy_name(Layer5Policy{FixedRetries{1}}) == "fixed_retries");
  CHECK(policy_name(Layer5Policy{GrowingRetries{1, {}}}) == "growing_retries");
  CHECK(policy_name(Layer5Policy{TotalTimeAndRetries{1, 1}}) == "time_and_retries");
}
