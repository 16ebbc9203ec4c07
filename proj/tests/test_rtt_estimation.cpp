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

#include "rtolab/rtt_estimation.hpp"

using namespace rtolab;

namespace {

RttEstimate est(double e, double v = 0.0) { return RttEstimate{e, v, 0}; }

TransmissionRecord record(std::initializer_list<double> sends, const TickScale& scale) {
  TransmissionRecord r;
  r.packet_id = 1;
  for (double s : sends) r.add_copy(scale.from_seconds(s));
  return r;
}

}  // namespace

TEST_CASE("ewma examples") {
  CHECK(ewma_update(est(1), 5, 0.5).mean == 3.0);
  CHECK(ewma_update(est(2), 10, 0.875).mean == 3.0);
  CHECK(ewma_update(est(7.25), 7.25, 0.3).mean == 7.25);

  const auto r = ewma_update(est(1, 2.5), 5, 0.5);
  CHECK(r.variance == 2.5);
  CHECK(r.update_count == 1);
}

TEST_CASE("ewma rejects bad input") {
  CHECK_THROWS_AS(ewma_update(est(1), -1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ewma_update(est(1), 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ewma_update(est(1), 1, 1.0), std::invalid_argument);
}

TEST_CASE("ewma_shift examples") {
  CHECK(ewma_shift_update(est(1), 5, 1).mean == 3.0);
  CHECK(ewma_shift_update(est(4), 8, 2).mean == 5.0);
  CHECK(ewma_shift_update(est(6), 6, 4).mean == 6.0);
  CHECK_THROWS_AS(ewma_shift_update(est(1), 5, 0), std::invalid_argument);
}

TEST_CASE("mills examples") {
  const double a1 = 15.0 / 16.0, a2 = 3.0 / 4.0;
  CHECK(mills_update(est(16), 0, a1, a2).mean == 15.0);
  CHECK(mills_update(est(4), 8, a1, a2).mean == 5.0);
  CHECK(mills_update(est(9), 9, a1, a2).mean == 9.0);
  CHECK_THROWS_AS(mills_update(est(1), 1, a2, a1), std::invalid_argument);
  CHECK_THROWS_AS(validate(Layer1Policy{MillsPolicy{0.5, 0.0}}), std::invalid_argument);
}

TEST_CASE("mills boundary takes the alpha2 branch") {
  // S == E is a fixed point in both branches, so probe just either side.
  const double a1 = 0.9, a2 = 0.1;
  CHECK(mills_update(est(10), 9, a1, a2).mean == doctest::Approx(0.9 * 10 + 0.1 * 9));
  CHECK(mills_update(est(10), 11, a1, a2).mean == doctest::Approx(0.1 * 10 + 0.9 * 11));
}

TEST_CASE("edge examples") {
  const auto r = edge_update(est(0, 0), 4, 0.5, 0.5);
  CHECK(r.mean == 2.0);
  CHECK(r.variance == 8.0);

  const auto same = edge_update(est(3, 4), 3, 0.5, 0.75);
  CHECK(same.mean == 3.0);
  CHECK(same.variance == 3.0);
  CHECK_THROWS_AS(edge_update(est(1), 1, 0.5, 1.5), std::invalid_argument);
}

TEST_CASE("apply_sample dispatches on the policy") {
  CHECK(apply_sample(est(1), 5, EwmaPolicy{0.5}).mean == 3.0);
  CHECK(apply_sample(est(4), 8, EwmaShiftPolicy{2}).mean == 5.0);
  CHECK(apply_sample(est(16), 0, MillsPolicy{15.0 / 16, 0.75}).mean == 15.0);
  CHECK(apply_sample(est(0), 4, EdgePolicy{0.5, 0.5}).variance == 8.0);
}

TEST_CASE("initial estimate validation") {
  CHECK(RttEstimate::initial(1.5, 0.25).mean == 1.5);
  CHECK_THROWS_AS(RttEstimate::initial(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RttEstimate::initial(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("increase schemes") {
  SUBCASE("exponential") {
    auto s = make_increase_scheme(ExponentialIncrease{2});
    CHECK(increase_estimate(est(5), s).estimate.mean == 10.0);
  }
  SUBCASE("linear") {
    auto s = make_increase_scheme(LinearIncrease{2});
    CHECK(increase_estimate(est(5), s).estimate.mean == 7.0);
  }
  SUBCASE("parabolic") {
    auto s = make_increase_scheme(ParabolicIncrease{1, 1});
    auto first = increase_estimate(est(5), s);
    CHECK(first.estimate.mean == 6.0);
    auto second = increase_estimate(first.estimate, first.scheme);
    CHECK(second.estimate.mean == 8.0);
  }
  SUBCASE("second order exponential") {
    auto s = make_increase_scheme(SecondOrderExponentialIncrease{1.5, 0.5});
    auto first = increase_estimate(est(4), s);
    CHECK(first.estimate.mean == 6.0);
    auto second = increase_estimate(first.estimate, first.scheme);
    CHECK(second.estimate.mean == 12.0);
  }
  SUBCASE("an increase is not a sample") {
    auto s = make_increase_scheme(ExponentialIncrease{2});
    CHECK(increase_estimate(est(5), s).estimate.update_count == 0);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(make_increase_scheme(ExponentialIncrease{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_increase_scheme(LinearIncrease{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_increase_scheme(ParabolicIncrease{1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(make_increase_scheme(SecondOrderExponentialIncrease{2, -0.1}), std::invalid_argument);
  }
}

TEST_CASE("extract_sample examples") {
  const TickScale scale;
  const double tick = scale.tick_seconds();
  const auto two = record({0, 10}, scale);
  const SimTime ack = scale.from_seconds(15);

  CHECK(*extract_sample(two, ack, FromFirst{}, scale, tick) == 15.0);
  CHECK(*extract_sample(two, ack, FromLast{}, scale, tick) == 5.0);
  CHECK_FALSE(extract_sample(two, ack, Ignore{}, scale, tick).has_value());
  CHECK_FALSE(extract_sample(two, ack, IgnoreAndIncrease{ExponentialIncrease{2}}, scale, tick).has_value());

  const auto one = record({0}, scale);
  const SimTime ack7 = scale.from_seconds(7);
  for (const Layer2Policy& p : {Layer2Policy{FromFirst{}}, Layer2Policy{FromLast{}}, Layer2Policy{FromCopy{3}},
                                Layer2Policy{Ignore{}}, Layer2Policy{IgnoreAndIncrease{LinearIncrease{1}}}}) {
    CHECK(*extract_sample(one, ack7, p, scale, tick) == 7.0);
  }
}

TEST_CASE("from_copy clamps the index and floors nonpositive intervals") {
  const TickScale scale;
  const auto three = record({0, 10, 20}, scale);
  CHECK(*extract_sample(three, scale.from_seconds(25), FromCopy{2}, scale, 1e-6) == 15.0);
  CHECK(*extract_sample(three, scale.from_seconds(25), FromCopy{9}, scale, 1e-6) == 5.0);
  CHECK(*extract_sample(three, scale.from_seconds(15), FromCopy{3}, scale, 0.25) == 0.25);
  CHECK_THROWS_AS(validate(Layer2Policy{FromCopy{0}}), std::invalid_argument);
}

TEST_CASE("transmission record invariants") {
  const TickScale scale;
  TransmissionRecord r;
  CHECK_THROWS_AS(extract_sample(r, SimTime{5}, FromFirst{}, scale, 1e-6), std::invalid_argument);
  r.add_copy(SimTime{10});
  CHECK_THROWS(r.add_copy(SimTime{10}));
  CHECK_THROWS(r.add_copy(SimTime{3}));
  r.add_copy(SimTime{11});
  CHECK(r.copies() == 2);
}

TEST_CASE("policy identifiers") {
  CHECK(policy_name(Layer1Policy{EwmaPolicy{0.5}}) == "ewma");
  CHECK(policy_name(Layer1Policy{EwmaShiftPolicy{3}}) == "ewma_shift");
  CHECK(policy_name(Layer1Policy{MillsPolicy{0.9, 0.8}}) == "mills");
  CHECK(policy_name(Layer1Policy{EdgePolicy{0.5, 0.5}}) == "edge");
  CHECK(policy_name(Layer2Policy{FromFirst{}}) == "from_first");
  CHECK(policy_name(Layer2Policy{FromLast{}}) == "from_last");
  CHECK(policy_name(Layer2Policy{FromCopy{2}}) == "from_copy");
  CHECK(policy_name(Layer2Policy{Ignore{}}) == "ignore");
  CHECK(policy_name(Layer2Policy{IgnoreAndIncrease{LinearIncrease{1}}}) == "ignore_increase_linear");
  CHECK(policy_name(Layer2Policy{IgnoreAndIncrease{ParabolicIncrease{1, 1}}}) == "ignore_increase_parabolic");
  CHECK(policy_name(Layer2Policy{IgnoreAndIncrease{ExponentialIncrease{2}}}) == "ignore_increase_exp");
  CHECK(policy_name(Layer2Policy{IgnoreAndIncrease{SecondOrderExponentialIncrease{2, 0}}}) ==
        "ignore_increase_exp2");
}
