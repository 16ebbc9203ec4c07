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

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "rtolab/scenarios.hpp"

using namespace rtolab;

namespace {

std::size_t count(const RunResult& r, TraceEvent e) {
  return static_cast<std::size_t>(
      std::count_if(r.trace.begin(), r.trace.end(), [e](const TraceRow& row) { return row.event == e; }));
}

}  // namespace

TEST_CASE("every named scenario has a complete default config") {
  const auto reference = default_config("fig3");
  for (const auto& name : scenario_names()) {
    const auto c = default_config(name);
    CHECK(c.at("scenario") == name);
    CHECK(c.size() == reference.size());
    for (const auto& [k, _] : reference) CHECK(c.contains(k));
    CHECK_NOTHROW(build_scenario(c));
  }
  CHECK(scenario_names().size() == 8);
}

TEST_CASE("unknown scenario is named in the error") {
  try {
    default_config("fig9");
    FAIL("expected an exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("fig9") != std::string::npos);
  }
  CHECK_THROWS_AS(resolve_config({{"scenario", "nope"}}), UnknownScenario);
  CHECK_THROWS_AS(resolve_config({}), ConfigError);
}

TEST_CASE("bad config values are config errors") {
  auto bad = [](const char* key, const char* value) {
    const std::string k = key;
    CAPTURE(k);
    CHECK_THROWS_AS(named_scenario("fig3", {{key, value}}), ConfigError);
  };
  bad("algorithm.layer1", "kalman");
  bad("algorithm.layer1.alpha", "1.5");
  bad("algorithm.layer2", "from_middle");
  CHECK_THROWS_AS(named_scenario("fig3", {{"algorithm.layer2", "from_copy"}, {"algorithm.layer2.j", "0"}}), ConfigError);
  bad("algorithm.layer3.k", "0");
  bad("algorithm.layer4", "quadratic");
  bad("algorithm.layer4.cap", "-1");
  bad("algorithm.layer5.r", "2.5");
  bad("loss.model", "gilbert");
  bad("loss.p", "1.5");
  bad("topology.rates", "0");
  bad("topology.buffers", "0");
  bad("topology.delays", "0.1,0.2");
  bad("timer_mode", "double");
  bad("retransmit", "some");
  bad("copy_echo", "maybe");
  bad("window", "0");
  bad("horizon", "-1");
  bad("initial_estimate", "0");
  bad("detect.divergence_factor", "1");
  bad("seed", "abc");
  CHECK_THROWS_AS(named_scenario("fig3", {{"no.such.key", "1"}}), ConfigError);
}

TEST_CASE("build_scenario reads the config") {
  const auto s = named_scenario("tsao_lee_fast", {{"algorithm.layer1", "mills"},
                                                  {"algorithm.layer2", "ignore_increase_exp2"},
                                                  {"algorithm.layer3", "clamped"},
                                                  {"algorithm.layer4", "rand_exp"},
                                                  {"algorithm.layer4.cap", "30"},
                                                  {"algorithm.layer5", "time_and_retries"},
                                                  {"timer_mode", "per_packet"},
                                                  {"retransmit", "all_unacked"}});
  CHECK(s.topology.node_count() == 4);
  CHECK(s.topology.links[0].rate_bps == 1e6);
  CHECK(s.topology.buffer_capacity[1] == 2u);
  CHECK_FALSE(s.topology.buffer_capacity[0].has_value());
  CHECK(s.sender.packet_size_bits == 8000);
  CHECK(s.sender.window_size == 4);
  CHECK(s.packet_count == 500);
  CHECK(std::holds_alternative<MillsPolicy>(s.algorithm.layer1));
  CHECK(policy_name(s.algorithm.layer2) == "ignore_increase_exp2");
  CHECK(std::holds_alternative<ClampedTimeout>(s.algorithm.layer3));
  CHECK(policy_name(s.algorithm.layer4) == "rand_exp");
  CHECK(s.algorithm.layer4.cap == 30.0);
  CHECK(std::holds_alternative<TotalTimeAndRetries>(s.algorithm.layer5));
  CHECK(s.sender.timer_mode == TimerMode::PerPacketTimer);
  CHECK(s.sender.retransmit_scope == RetransmitScope::AllUnacked);
  // Empty-network round trip: three serializations (1 Mb/s, 2 x 19.2 kb/s) and six 10 ms hops.
  CHECK(s.true_rtt == doctest::Approx(0.008 + 2 * 0.416667 + 0.06).epsilon(1e-9));

  auto infinite = named_scenario("fig3");
  CHECK(std::get<FixedRetries>(infinite.algorithm.layer5).r == 0xffffffffu);
}

TEST_CASE("fig3 examples") {
  const auto e = fig3_divergence(3);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == 3.0);
  CHECK(e[2] == 8.0);
  CHECK(e[3] == 20.5);
  CHECK(fig3_divergence(0) == std::vector<double>{1.0});
}

TEST_CASE("fig6 examples") {
  for (const char* policy : {"from_last", "ignore"}) {
    CAPTURE(policy);
    const auto r = fig6_false_convergence(policy, 100);
    CHECK(r.retransmissions == 100);
    CHECK(r.estimates.size() == 100);
    CHECK(std::all_of(r.estimates.begin(), r.estimates.end(), [](double e) { return e == 5.0; }));
    CHECK(r.run.receiver_copies == 200);
    CHECK(r.run.summary.verdict == Verdict::FalseConverged);
  }
  const auto first = fig6_false_convergence("from_first", 100);
  CHECK(first.estimates.back() == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(first.estimates[1] > 7.5);
  CHECK(first.retransmissions < 10);
  CHECK(first.run.summary.verdict == Verdict::Bounded);
  // Once k*E exceeds the delay the tail of the run is retransmission-free.
  const auto& trace = first.run.trace;
  const auto last_retx = std::find_if(trace.rbegin(), trace.rend(),
                                      [](const TraceRow& r) { return r.event == TraceEvent::Retransmit; });
  REQUIRE(last_retx != trace.rend());
  CHECK(last_retx->packet_id < 10);
  CHECK_THROWS_AS(fig6_false_convergence("from_copy", 10), std::invalid_argument);
}

TEST_CASE("tsao-lee examples") {
  const auto slow = tsao_lee(19200);
  CHECK(slow.completed);
  CHECK(slow.drops_per_node == std::vector<std::uint64_t>{0, 0, 0, 0});
  CHECK(slow.timeouts == 0);

  const auto fast = tsao_lee(1e6);
  CHECK(fast.drops_per_node.at(1) > 0);
  CHECK(fast.elapsed >= 10 * slow.elapsed);

  for (double rate : {19200.0, 1e6, 1e7}) {
    for (const char* buf : {"inf,1,1,inf", "inf,2,2,inf"}) {
      CAPTURE(rate);
      CAPTURE(buf);
      const auto w1 = tsao_lee(rate, {{"window", "1"}, {"topology.buffers", buf}, {"packets", "50"}});
      CHECK(std::all_of(w1.drops_per_node.begin(), w1.drops_per_node.end(), [](auto d) { return d == 0; }));
      CHECK(w1.completed);
    }
  }
}

TEST_CASE("loss threshold examples") {
  const auto pts = loss_threshold_sweep(4, {0.30, 0.05, 0.0}, {1, 2});
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].p == 0.0);
  CHECK(pts[5].p == 0.30);
  CHECK(pts[0].seed == 1);
  CHECK(pts[1].seed == 2);
  for (const auto& p : pts) {
    CAPTURE(p.p);
    CAPTURE(p.seed);
    CHECK(p.verdict == (p.p >= 0.3 ? Verdict::Diverged : Verdict::Bounded));
  }
  const auto clean = run_scenario(named_scenario("loss_sweep", {{"loss.p", "0"}}));
  CHECK(clean.summary.final_E == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(clean.summary.timeout_count == 0);
}

TEST_CASE("jth attempt examples") {
  CHECK(jth_attempt_matrix(2, 2) == CopyOutcome::Converges);
  CHECK(jth_attempt_matrix(2, 1) == CopyOutcome::Diverges);
  CHECK(jth_attempt_matrix(1, 2) == CopyOutcome::FalseConverges);
  CHECK_THROWS_AS(jth_attempt_matrix(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(jth_attempt_matrix(1, 0), std::invalid_argument);
  CHECK(std::string(to_string(CopyOutcome::Indeterminate)) == "Indeterminate");
}

TEST_CASE("classify examples") {
  CHECK(classify_algorithm(class_case_scenario(ClassCase::FromFirstEveryFirstLost, 1)) == AlgorithmClass::I);
  CHECK(classify_algorithm(class_case_scenario(ClassCase::IgnoreEveryFirstLost, 1)) == AlgorithmClass::II);
  CHECK(classify_algorithm(class_case_scenario(ClassCase::EarlyCopyMeasuredLater, 1)) == AlgorithmClass::III);
  CHECK_THROWS_AS(classify_algorithm(named_scenario("loss_sweep", {{"loss.p", "0"}, {"packets", "20"}})),
                  std::runtime_error);
}

TEST_CASE("runs are replay deterministic") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto s = named_scenario(name, {{"seed", "11"}});
    RunOptions o;
    o.log_events = true;
    const auto a = run_scenario(s, o);
    const auto b = run_scenario(s, o);
    CHECK(format_trace(a.trace) == format_trace(b.trace));
    CHECK(a.summary == b.summary);
    REQUIRE(a.event_log.size() == b.event_log.size());
    bool same = true;
    for (std::size_t i = 0; i < a.event_log.size(); ++i) {
      same = same && a.event_log[i].time == b.event_log[i].time && a.event_log[i].kind == b.event_log[i].kind &&
             a.event_log[i].sequence == b.event_log[i].sequence && a.event_log[i].payload == b.event_log[i].payload;
    }
    CHECK(same);
  }
}

TEST_CASE("driver bookkeeping across scenarios") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto s = named_scenario(name);
    const auto r = run_scenario(s);
    CHECK(r.conservation_held);
    CHECK(r.max_armed_timers <= 1);
    CHECK(count(r, TraceEvent::Send) + count(r, TraceEvent::Retransmit) == r.network_copies_sent);
    CHECK(count(r, TraceEvent::Timeout) == r.timeout_events);
    if (r.sim.queue_exhausted) CHECK(r.summary.duplicates_received == r.receiver_duplicates);
    std::set<PacketId> acked;
    for (const auto& row : r.trace)
      if (row.event == TraceEvent::Ack) CHECK(acked.insert(row.packet_id).second);
  }
}

TEST_CASE("ack loss and disconnection show up in the trace") {
  const auto lossy = run_scenario(named_scenario("loss_sweep", {{"loss.p", "0"}, {"loss.ack_p", "0.1"}}));
  const auto lost_acks = std::count_if(lossy.trace.begin(), lossy.trace.end(), [](const TraceRow& r) {
    return r.event == TraceEvent::Drop && r.copy == 0;
  });
  CHECK(lost_acks > 0);
  REQUIRE(lossy.sim.queue_exhausted);
  CHECK(lossy.summary.duplicates_received == lossy.receiver_duplicates);

  const auto dead = run_scenario(named_scenario("loss_sweep", {{"loss.p", "1"}, {"algorithm.layer5.r", "10"}}));
  CHECK(dead.disconnected);
  CHECK(count(dead, TraceEvent::Disconnect) == 1);
  CHECK(count(dead, TraceEvent::Retransmit) == 10);
  CHECK(count(dead, TraceEvent::Timeout) == 11);
  CHECK(dead.trace.back().event == TraceEvent::Disconnect);
}

TEST_CASE("sweep driver") {
  auto base = default_config("loss_sweep");
  const auto rows = sweep(base, "p", {0.3, 0.05, 0.2});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].param == 0.05);
  CHECK(rows[2].param == 0.3);
  CHECK(rows[2].summary.verdict == Verdict::Diverged);

  const auto csv = format_sweep_csv(rows);
  CHECK(csv.rfind("param,verdict,final_e,throughput,duplicates\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  CHECK(sweep(base, "k", {4}).size() == 1);
  CHECK(resolve_axis(base, "p") == "loss.p");
  CHECK(resolve_axis(base, "k") == "algorithm.layer3.k");
  CHECK(resolve_axis(base, "window") == "window");
  CHECK_THROWS_AS(resolve_axis(base, "q"), ConfigError);
  CHECK_THROWS_AS(sweep(base, "q", {1}), ConfigError);
}

TEST_CASE("policy catalog lists five layers") {
  const auto text = policy_catalog();
  CHECK(text.find("layer2: from_first from_last from_copy ignore ignore_increase_linear ignore_increase_parabolic "
                  "ignore_increase_exp ignore_increase_exp2\n") != std::string::npos);
  CHECK(text.find("layer4: none exp rand_exp linear\n") != std::string::npos);
  int layers = 0;
  std::size_t pos = 0;
  while ((pos = text.find("\nlayer", pos)) != std::string::npos) ++layers, ++pos;
  CHECK(text.rfind("layer1: ", 0) == 0);
  CHECK(layers + 1 == 5);
}
