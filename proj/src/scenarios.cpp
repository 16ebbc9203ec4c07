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

#include "rtolab/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rtolab/network.hpp"

namespace rtolab {
namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

ConfigMap base_config() {
  return {
      {"scenario", ""},
      {"seed", "1"},
      {"horizon", "10000000"},
      {"ticks_per_second", "1000000"},
      {"packets", "100"},
      {"packet_size_bytes", "0"},
      {"true_rtt", "auto"},
      {"topology.rates", "19200"},
      {"topology.delays", "0.5"},
      {"topology.buffers", "inf"},
      {"window", "1"},
      {"timer_mode", "single"},
      {"retransmit", "timed_out_only"},
      {"copy_echo", "false"},
      {"initial_estimate", "1"},
      {"initial_variance", "0"},
      {"sample_floor", "tick"},
      {"loss.model", "none"},
      {"loss.p", "0"},
      {"loss.copy", "1"},
      {"loss.ack_p", "0"},
      {"algorithm.layer1", "ewma"},
      {"algorithm.layer1.alpha", "0.5"},
      {"algorithm.layer1.n", "3"},
      {"algorithm.layer1.alpha1", "0.9375"},
      {"algorithm.layer1.alpha2", "0.75"},
      {"algorithm.layer1.beta", "0.75"},
      {"algorithm.layer2", "from_first"},
      {"algorithm.layer2.j", "1"},
      {"algorithm.layer2.delta", "1"},
      {"algorithm.layer2.delta0", "1"},
      {"algorithm.layer2.second_delta", "1"},
      {"algorithm.layer2.c", "2"},
      {"algorithm.layer2.c0", "2"},
      {"algorithm.layer2.dc", "0.5"},
      {"algorithm.layer3", "scale"},
      {"algorithm.layer3.k", "4"},
      {"algorithm.layer3.t_min", "0.001"},
      {"algorithm.layer3.t_max", "60"},
      {"algorithm.layer4", "none"},
      {"algorithm.layer4.b", "2"},
      {"algorithm.layer4.t_min", "tick"},
      {"algorithm.layer4.dt", "1"},
      {"algorithm.layer4.cap", "none"},
      {"algorithm.layer5", "fixed_retries"},
      {"algorithm.layer5.r", "inf"},
      {"algorithm.layer5.base_r", "10"},
      {"algorithm.layer5.g", "inf"},
      {"detect.divergence_factor", "100"},
      {"detect.fc_epsilon", "0.2"},
      {"detect.fc_retrans_rate", "0.5"},
      {"detect.fc_window", "10"},
      {"detect.class_epsilon", "auto"},
  };
}

const Overrides kFig3 = {
    {"ticks_per_second", "1048576"},
    {"horizon", "1000000000"},
    {"packets", "12"},
    {"true_rtt", "1"},
    {"loss.model", "every_first_copy_lost"},
};

const Overrides kFig6 = {
    {"packets", "1000"},
    {"topology.delays", "7.5"},
    {"initial_estimate", "5"},
    {"algorithm.layer3.k", "2"},
};

const Overrides kTsaoLee = {
    {"packets", "500"},
    {"packet_size_bytes", "1000"},
    {"topology.rates", "19200,19200,19200"},
    {"topology.delays", "0.01"},
    {"topology.buffers", "inf,2,2,inf"},
    {"window", "4"},
    {"loss.model", "buffer_overflow_only"},
};

const Overrides kLossSweep = {
    {"packets", "1000"},
    {"horizon", "1000000"},
    {"loss.model", "bernoulli"},
    {"loss.p", "0.2"},
};

const Overrides kJthMatrix = {
    {"packets", "100"},
    {"topology.delays", "7.5"},
    {"initial_estimate", "5"},
    {"algorithm.layer3.k", "2"},
    {"loss.model", "forced_copy"},
    {"loss.copy", "2"},
    {"algorithm.layer2", "from_copy"},
    {"algorithm.layer2.j", "2"},
};

const Overrides kClassify = {
    {"packets", "10"},
    {"loss.model", "every_first_copy_lost"},
};

const std::map<std::string, std::vector<const Overrides*>, std::less<>>& scenario_table() {
  static const Overrides fromlast = {{"algorithm.layer2", "from_last"}};
  static const Overrides ignore = {{"algorithm.layer2", "ignore"}};
  static const Overrides fast = {{"topology.rates", "1000000,19200,19200"}};
  static const std::map<std::string, std::vector<const Overrides*>, std::less<>> table = {
      {"fig3", {&kFig3}},
      {"fig6_fromlast", {&kFig6, &fromlast}},
      {"fig6_ignore", {&kFig6, &ignore}},
      {"tsao_lee_slow", {&kTsaoLee}},
      {"tsao_lee_fast", {&kTsaoLee, &fast}},
      {"loss_sweep", {&kLossSweep}},
      {"jth_matrix", {&kJthMatrix}},
      {"classify", {&kClassify}},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Value parsing

double parse_number(const std::string& key, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v))
    throw ConfigError("config key '" + key + "' expects a number, got '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    const auto b = item.find_last_not_of(' ');
    out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
  }
  return out;
}

double get_num(const ConfigMap& c, const std::string& key) { return parse_number(key, config_string(c, key)); }

double positive(const ConfigMap& c, const std::string& key) {
  const double v = get_num(c, key);
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "' must be positive");
  return v;
}

std::uint32_t count_or_inf(const ConfigMap& c, const std::string& key) {
  const double v = get_num(c, key);
  if (std::isinf(v) && v > 0) return std::numeric_limits<std::uint32_t>::max();
  if (v < 0 || v != std::floor(v) || v >= 4294967295.0)
    throw ConfigError("config key '" + key + "' expects a nonnegative integer or inf");
  return static_cast<std::uint32_t>(v);
}

std::uint64_t whole(const ConfigMap& c, const std::string& key, std::uint64_t min) {
  const long long v = config_int(c, key);
  if (v < static_cast<long long>(min))
    throw ConfigError("config key '" + key + "' must be >= " + std::to_string(min));
  return static_cast<std::uint64_t>(v);
}

template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Layer1Policy parse_layer1(const ConfigMap& c) {
  const std::string& name = config_string(c, "algorithm.layer1");
  if (name == "ewma") return EwmaPolicy{get_num(c, "algorithm.layer1.alpha")};
  if (name == "ewma_shift")
    return EwmaShiftPolicy{static_cast<unsigned>(whole(c, "algorithm.layer1.n", 1))};
  if (name == "mills")
    return MillsPolicy{get_num(c, "algorithm.layer1.alpha1"), get_num(c, "algorithm.layer1.alpha2")};
  if (name == "edge") return EdgePolicy{get_num(c, "algorithm.layer1.alpha"), get_num(c, "algorithm.layer1.beta")};
  throw ConfigError("unknown layer1 policy '" + name + "'");
}

Layer2Policy parse_layer2(const ConfigMap& c) {
  const std::string& name = config_string(c, "algorithm.layer2");
  if (name == "from_first") return FromFirst{};
  if (name == "from_last") return FromLast{};
  if (name == "from_copy") return FromCopy{static_cast<unsigned>(whole(c, "algorithm.layer2.j", 1))};
  if (name == "ignore") return Ignore{};
  if (name == "ignore_increase_linear") return IgnoreAndIncrease{LinearIncrease{get_num(c, "algorithm.layer2.delta")}};
  if (name == "ignore_increase_parabolic")
    return IgnoreAndIncrease{
        ParabolicIncrease{get_num(c, "algorithm.layer2.delta0"), get_num(c, "algorithm.layer2.second_delta")}};
  if (name == "ignore_increase_exp") return IgnoreAndIncrease{ExponentialIncrease{get_num(c, "algorithm.layer2.c")}};
  if (name == "ignore_increase_exp2")
    return IgnoreAndIncrease{
        SecondOrderExponentialIncrease{get_num(c, "algorithm.layer2.c0"), get_num(c, "algorithm.layer2.dc")}};
  throw ConfigError("unknown layer2 policy '" + name + "'");
}

Layer3Policy parse_layer3(const ConfigMap& c) {
  const std::string& name = config_string(c, "algorithm.layer3");
  const double k = get_num(c, "algorithm.layer3.k");
  if (name == "scale") return ScaleTimeout{k};
  if (name == "mean_plus_dev") return MeanPlusDeviationTimeout{k};
  if (name == "clamped")
    return ClampedTimeout{k, get_num(c, "algorithm.layer3.t_min"), get_num(c, "algorithm.layer3.t_max")};
  throw ConfigError("unknown layer3 policy '" + name + "'");
}

Layer4Policy parse_layer4(const ConfigMap& c, double tick) {
  const std::string& name = config_string(c, "algorithm.layer4");
  Layer4Policy p;
  if (name == "none") {
    p.rule = NoBackoff{};
  } else if (name == "exp") {
    p.rule = ExponentialBackoff{get_num(c, "algorithm.layer4.b")};
  } else if (name == "rand_exp") {
    const std::string& t = config_string(c, "algorithm.layer4.t_min");
    p.rule = RandomExponentialBackoff{get_num(c, "algorithm.layer4.b"),
                                      t == "tick" ? tick : parse_number("algorithm.layer4.t_min", t)};
  } else if (name == "linear") {
    p.rule = LinearBackoff{get_num(c, "algorithm.layer4.dt")};
  } else {
    throw ConfigError("unknown layer4 policy '" + name + "'");
  }
  if (const std::string& cap = config_string(c, "algorithm.layer4.cap"); cap != "none")
    p.cap = parse_number("algorithm.layer4.cap", cap);
  return p;
}

Layer5Policy parse_layer5(const ConfigMap& c) {
  const std::string& name = config_string(c, "algorithm.layer5");
  if (name == "fixed_retries") return FixedRetries{count_or_inf(c, "algorithm.layer5.r")};
  if (name == "growing_retries") return GrowingRetries{count_or_inf(c, "algorithm.layer5.base_r"), {}};
  if (name == "time_and_retries")
    return TotalTimeAndRetries{get_num(c, "algorithm.layer5.g"), count_or_inf(c, "algorithm.layer5.r")};
  throw ConfigError("unknown layer5 policy '" + name + "'");
}

LossModel parse_loss(const ConfigMap& c) {
  LossModel m;
  const std::string& name = config_string(c, "loss.model");
  if (name == "none") {
    m.kind = LossKind::None;
  } else if (name == "bernoulli") {
    m.kind = LossKind::Bernoulli;
  } else if (name == "every_first_copy_lost") {
    m.kind = LossKind::EveryFirstCopyLost;
  } else if (name == "forced_copy") {
    m.kind = LossKind::ForcedCopy;
  } else if (name == "buffer_overflow_only") {
    m.kind = LossKind::BufferOverflowOnly;
  } else {
    throw ConfigError("unknown loss model '" + name + "'");
  }
  m.p = get_num(c, "loss.p");
  m.ack_p = get_num(c, "loss.ack_p");
  if (!(m.p >= 0.0 && m.p <= 1.0)) throw ConfigError("loss.p must be in [0, 1]");
  if (!(m.ack_p >= 0.0 && m.ack_p <= 1.0)) throw ConfigError("loss.ack_p must be in [0, 1]");
  m.delivered_copy = static_cast<std::uint32_t>(whole(c, "loss.copy", 1));
  return m;
}

Topology parse_topology(const ConfigMap& c, const TickScale& scale) {
  const auto rates = split_list(config_string(c, "topology.rates"));
  const auto delays = split_list(config_string(c, "topology.delays"));
  const auto buffers = split_list(config_string(c, "topology.buffers"));
  if (rates.empty()) throw ConfigError("topology.rates is empty");
  const std::size_t links = rates.size();
  if (delays.size() != 1 && delays.size() != links)
    throw ConfigError("topology.delays needs one value or one per link");
  if (buffers.size() != 1 && buffers.size() != links + 1)
    throw ConfigError("topology.buffers needs one value or one per node");

  Topology t;
  for (std::size_t i = 0; i < links; ++i) {
    const double rate = parse_number("topology.rates", rates[i]);
    const double delay = parse_number("topology.delays", delays.size() == 1 ? delays[0] : delays[i]);
    if (!(rate > 0.0)) throw ConfigError("topology.rates must be positive");
    if (!(delay >= 0.0)) throw ConfigError("topology.delays must be nonnegative");
    t.links.push_back(Link{rate, scale.from_seconds(delay)});
  }
  for (std::size_t i = 0; i <= links; ++i) {
    const std::string& b = buffers.size() == 1 ? buffers[0] : buffers[i];
    if (b == "inf") {
      t.buffer_capacity.emplace_back(std::nullopt);
      continue;
    }
    const double v = parse_number("topology.buffers", b);
    if (!(v >= 1.0) || v != std::floor(v) || v > 4294967295.0)
      throw ConfigError("topology.buffers entries must be positive integers or inf");
    t.buffer_capacity.emplace_back(static_cast<std::uint32_t>(v));
  }
  return t;
}

/// Round trip through an empty chain: every link serializes and propagates
/// the packet once, the ack only propagates.
double empty_network_rtt(const Topology& t, std::uint64_t size_bits, const TickScale& scale) {
  SimTime total;
  for (const auto& l : t.links) total = total + serialization_time(l, size_bits, scale) + l.propagation + l.propagation;
  return scale.to_seconds(total);
}

// ---------------------------------------------------------------------------
// Driver

class Driver {
 public:
  Driver(const Scenario& s, const RunOptions& options)
      : s_(s),
        scale_(s.ticks_per_second),
        loss_rng_(Rng::stream(s.seed, "loss")),
        ack_rng_(Rng::stream(s.seed, "ack_loss")),
        receiver_(s.sender.copy_echo_enabled),
        sender_(s.algorithm, s.sender, RttEstimate::initial(s.initial_estimate, s.initial_variance), scale_,
                Rng::stream(s.seed, "backoff")),
        network_(engine_, s.topology, scale_, hooks()) {
    engine_.set_logging(options.log_events);
    engine_.set_step_hook([this](SimTime now) { after_event(now); });
  }

  RunResult run() {
    pump();
    after_event(engine_.now());
    const SimTime horizon = scale_.from_seconds(s_.horizon);
    result_.sim = engine_.run_until(horizon);
    if (!result_.sim.queue_exhausted) after_event(result_.sim.clock);
    if (saw_completion_) result_.waiting_with_timer = waiting_at_completion_;

    SummaryOptions opts = s_.detectors;
    opts.true_rtt = s_.true_rtt;
    opts.node_count = s_.topology.node_count();
    opts.horizon = s_.horizon;
    result_.summary = summarize(result_.trace, opts);
    result_.event_log = engine_.log();
    result_.receiver_copies = receiver_.copies_received();
    result_.receiver_duplicates = receiver_.duplicates_received();
    result_.network_copies_sent = network_.copies_sent();
    result_.network_drops = network_.copies_dropped();
    result_.timeout_events = sender_.state().timeout_event_count;
    result_.disconnected = sender_.state().disconnected;
    result_.completed = sender_.state().packets_delivered == s_.packet_count;
    return std::move(result_);
  }

 private:
  ChainNetwork::Hooks hooks() {
    ChainNetwork::Hooks h;
    h.ingress_loss = [this](const Packet& p) { return ingress_lost(p); };
    if (s_.loss.ack_p > 0.0) h.ack_loss = [this](const AckPacket&) { return ack_rng_.bernoulli(s_.loss.ack_p); };
    h.on_drop = [this](const Packet& p, std::size_t node) {
      row(TraceEvent::Drop, p.id, p.copy, 0.0, node);
    };
    h.on_ack_drop = [this](const AckPacket& a) {
      row(TraceEvent::Drop, a.cumulative_ack, 0, 0.0, s_.topology.node_count() - 1);
    };
    h.on_deliver = [this](const Packet& p) { network_.send_ack(receiver_.on_arrival(p)); };
    h.on_ack = [this](const AckPacket& a) {
      apply(sender_.on_ack(a, engine_.now()));
      pump();
    };
    return h;
  }

  bool ingress_lost(const Packet& p) {
    switch (s_.loss.kind) {
      case LossKind::None:
      case LossKind::BufferOverflowOnly: return false;
      case LossKind::Bernoulli: return loss_rng_.bernoulli(s_.loss.p);
      case LossKind::EveryFirstCopyLost: return p.copy == 1;
      case LossKind::ForcedCopy: return p.copy != s_.loss.delivered_copy;
    }
    return false;
  }

  void row(TraceEvent ev, PacketId id, std::uint32_t copy, double interval, std::uint64_t retry) {
    const RttEstimate& e = sender_.state().estimate;
    result_.trace.push_back(TraceRow{quantize_trace_time(scale_.to_seconds(engine_.now())), ev, id, copy, e.mean,
                                     e.variance, interval, retry});
  }

  void pump() {
    while (sender_.can_send()) {
      const auto a = sender_.on_send(engine_.now());
      if (a.transmit.empty()) break;
      apply(a);
    }
  }

  std::uint32_t retry_of(PacketId id) const {
    const PacketId key = s_.sender.timer_mode == TimerMode::SingleTimer ? kConnectionTimer : id;
    auto it = sender_.timers().find(key);
    return it == sender_.timers().end() ? 0 : it->second.retry_count;
  }

  void apply(const SenderActions& a) {
    if (!a.acked.empty() || a.disconnected) completion_pending_ = true;
    if (a.timeout_fired) {
      std::uint32_t copies = 0;
      if (auto it = sender_.state().outstanding.find(a.timed_out_packet); it != sender_.state().outstanding.end())
        copies = static_cast<std::uint32_t>(it->second.record.copies());
      for (const auto& p : a.transmit)
        if (p.id == a.timed_out_packet) --copies;
      row(TraceEvent::Timeout, a.timed_out_packet, copies, a.expired_interval, a.retry_count_at_expiry);
      if (a.disconnected) row(TraceEvent::Disconnect, a.timed_out_packet, copies, 0.0, a.retry_count_at_expiry);
    }
    for (const auto& ack : a.acked) {
      result_.trace.push_back(TraceRow{quantize_trace_time(scale_.to_seconds(engine_.now())), TraceEvent::Ack,
                                       ack.packet_id, ack.copies, ack.before.mean, ack.before.variance,
                                       first_timeout(ack.before, s_.algorithm.layer3), 0});
      if (ack.action != SampleAction::Ignored) {
        result_.trace.push_back(TraceRow{quantize_trace_time(scale_.to_seconds(engine_.now())),
                                         TraceEvent::EstimateUpdate, ack.packet_id, ack.copies, ack.after.mean,
                                         ack.after.variance, first_timeout(ack.after, s_.algorithm.layer3), 0});
      }
    }
    for (PacketId key : a.disarm) {
      if (auto it = timers_.find(key); it != timers_.end()) {
        engine_.cancel(it->second);
        timers_.erase(it);
      }
    }
    for (const auto& arm : a.arm) {
      if (auto it = timers_.find(arm.key); it != timers_.end()) engine_.cancel(it->second);
      const PacketId key = arm.key;
      timers_[key] = engine_.schedule(arm.deadline, EventKind::TimerExpiry, key, [this, key] {
        timers_.erase(key);
        apply(sender_.on_timeout(key, engine_.now()));
        pump();
      });
    }
    for (const auto& p : a.transmit) {
      const bool first = p.copy == 1;
      row(first ? TraceEvent::Send : TraceEvent::Retransmit, p.id, p.copy, sender_.current_interval(p.id),
          first ? 0 : retry_of(p.id));
      network_.send(p);
    }
  }

  void after_event(SimTime now) {
    if (last_waiting_) result_.waiting_with_timer += scale_.to_seconds(now - last_time_);
    last_time_ = now;
    if (completion_pending_) {
      completion_pending_ = false;
      saw_completion_ = true;
      waiting_at_completion_ = result_.waiting_with_timer;
    }
    last_waiting_ = sender_.armed_timers() > 0 && network_.source_idle();
    result_.max_armed_timers = std::max(result_.max_armed_timers, sender_.armed_timers());
    if (network_.copies_sent() !=
        network_.copies_delivered() + network_.copies_dropped() + network_.copies_in_network())
      result_.conservation_held = false;
  }

  const Scenario& s_;
  TickScale scale_;
  Rng loss_rng_;
  Rng ack_rng_;
  Engine engine_;
  Receiver receiver_;
  Sender sender_;
  ChainNetwork network_;
  std::map<PacketId, EventHandle> timers_;
  RunResult result_;
  SimTime last_time_;
  bool last_waiting_ = false;
  bool completion_pending_ = false;
  bool saw_completion_ = false;
  double waiting_at_completion_ = 0.0;
};

/// Runs f(i) for i in [0, n) on a small worker pool.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, n); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ConfigMap with(std::string_view name, const ConfigMap& overrides, const Overrides& extra = {}) {
  ConfigMap c = default_config(name);
  merge_config(c, overrides);
  for (const auto& [k, v] : extra) c[k] = v;
  return c;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"fig3",          "fig6_fromlast", "fig6_ignore", "tsao_lee_slow",
                                                 "tsao_lee_fast", "loss_sweep",    "jth_matrix",  "classify"};
  return names;
}

ConfigMap default_config(std::string_view name) {
  const auto& table = scenario_table();
  auto it = table.find(name);
  if (it == table.end()) throw UnknownScenario(std::string(name));
  ConfigMap c = base_config();
  c["scenario"] = std::string(name);
  for (const Overrides* layer : it->second)
    for (const auto& [k, v] : *layer) c.at(k) = v;
  return c;
}

ConfigMap resolve_config(const ConfigMap& config) {
  auto it = config.find("scenario");
  if (it == config.end() || it->second.empty()) throw ConfigError("config does not name a scenario");
  ConfigMap c = default_config(it->second);
  merge_config(c, config);
  return c;
}

Scenario build_scenario(const ConfigMap& config) {
  const ConfigMap c = resolve_config(config);
  Scenario s;
  s.name = config_string(c, "scenario");
  s.seed = whole(c, "seed", 0);
  s.horizon = positive(c, "horizon");
  s.ticks_per_second = static_cast<std::int64_t>(whole(c, "ticks_per_second", 1));
  const TickScale scale(s.ticks_per_second);

  s.topology = parse_topology(c, scale);
  guarded("topology", [&] {
    s.topology.validate();
    return 0;
  });
  s.loss = parse_loss(c);

  s.algorithm.layer1 = parse_layer1(c);
  s.algorithm.layer2 = parse_layer2(c);
  s.algorithm.layer3 = parse_layer3(c);
  s.algorithm.layer4 = parse_layer4(c, scale.tick_seconds());
  s.algorithm.layer5 = parse_layer5(c);
  guarded("algorithm", [&] {
    s.algorithm.validate();
    return 0;
  });

  s.packet_count = whole(c, "packets", 1);
  s.sender.packet_limit = s.packet_count;
  s.sender.packet_size_bits = whole(c, "packet_size_bytes", 0) * 8;
  s.sender.window_size = static_cast<std::uint32_t>(whole(c, "window", 1));
  const std::string& mode = config_string(c, "timer_mode");
  if (mode == "single") {
    s.sender.timer_mode = TimerMode::SingleTimer;
  } else if (mode == "per_packet") {
    s.sender.timer_mode = TimerMode::PerPacketTimer;
  } else {
    throw ConfigError("timer_mode must be single or per_packet, got '" + mode + "'");
  }
  const std::string& scope = config_string(c, "retransmit");
  if (scope == "timed_out_only") {
    s.sender.retransmit_scope = RetransmitScope::TimedOutOnly;
  } else if (scope == "all_unacked") {
    s.sender.retransmit_scope = RetransmitScope::AllUnacked;
  } else {
    throw ConfigError("retransmit must be timed_out_only or all_unacked, got '" + scope + "'");
  }
  s.sender.copy_echo_enabled = config_bool(c, "copy_echo");
  if (const std::string& f = config_string(c, "sample_floor"); f != "tick") {
    s.sender.sample_floor = parse_number("sample_floor", f);
    if (!(*s.sender.sample_floor > 0.0)) throw ConfigError("sample_floor must be positive");
  }

  s.initial_estimate = positive(c, "initial_estimate");
  s.initial_variance = get_num(c, "initial_variance");
  if (!(s.initial_variance >= 0.0)) throw ConfigError("initial_variance must be nonnegative");

  if (const std::string& t = config_string(c, "true_rtt"); t == "auto") {
    s.true_rtt = empty_network_rtt(s.topology, s.sender.packet_size_bits, scale);
    if (!(s.true_rtt > 0.0)) throw ConfigError("true_rtt = auto needs a path with nonzero delay");
  } else {
    s.true_rtt = positive(c, "true_rtt");
  }

  s.detectors.divergence_factor = get_num(c, "detect.divergence_factor");
  if (!(s.detectors.divergence_factor > 1.0)) throw ConfigError("detect.divergence_factor must be > 1");
  s.detectors.false_convergence_epsilon = get_num(c, "detect.fc_epsilon");
  s.detectors.false_convergence_retrans_rate = get_num(c, "detect.fc_retrans_rate");
  s.detectors.false_convergence_window = whole(c, "detect.fc_window", 10);
  if (const std::string& e = config_string(c, "detect.class_epsilon"); e != "auto")
    s.detectors.class_epsilon = parse_number("detect.class_epsilon", e);
  return s;
}

Scenario named_scenario(std::string_view name, const ConfigMap& overrides) {
  return build_scenario(with(name, overrides));
}

std::string policy_catalog() {
  return "layer1: ewma ewma_shift mills edge\n"
         "  ewma: alpha\n"
         "  ewma_shift: n\n"
         "  mills: alpha1 alpha2\n"
         "  edge: alpha beta\n"
         "layer2: from_first from_last from_copy ignore ignore_increase_linear ignore_increase_parabolic "
         "ignore_increase_exp ignore_increase_exp2\n"
         "  from_copy: j\n"
         "  ignore_increase_linear: delta\n"
         "  ignore_increase_parabolic: delta0 second_delta\n"
         "  ignore_increase_exp: c\n"
         "  ignore_increase_exp2: c0 dc\n"
         "layer3: scale mean_plus_dev clamped\n"
         "  scale: k\n"
         "  mean_plus_dev: k\n"
         "  clamped: k t_min t_max\n"
         "layer4: none exp rand_exp linear\n"
         "  exp: b cap\n"
         "  rand_exp: b t_min cap\n"
         "  linear: dt cap\n"
         "layer5: fixed_retries growing_retries time_and_retries\n"
         "  fixed_retries: r\n"
         "  growing_retries: base_r\n"
         "  time_and_retries: g r\n";
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  Driver d(scenario, options);
  return d.run();
}

// ---------------------------------------------------------------------------

std::vector<double> fig3_divergence(unsigned i_max) {
  std::vector<double> out{1.0};
  if (i_max == 0) return out;
  const Scenario s = named_scenario("fig3", {{"packets", std::to_string(i_max)}});
  out.front() = s.initial_estimate;
  const RunResult r = run_scenario(s);
  for (const auto& p : ack_trajectory(r.trace))
    if (p.copies > 1) out.push_back(p.e_after);
  return out;
}

FalseConvergenceRun fig6_false_convergence(std::string_view policy, std::uint64_t packets) {
  ConfigMap o{{"packets", std::to_string(packets)}};
  if (policy == "from_last") {
    o["algorithm.layer2"] = "from_last";
  } else if (policy == "ignore") {
    o["algorithm.layer2"] = "ignore";
  } else if (policy == "from_first") {
    o["algorithm.layer2"] = "from_first";
  } else {
    throw std::invalid_argument("fig6_false_convergence: unsupported policy '" + std::string(policy) + "'");
  }
  FalseConvergenceRun out;
  out.run = run_scenario(named_scenario("fig6_fromlast", o));
  for (const auto& p : ack_trajectory(out.run.trace)) out.estimates.push_back(p.e_after);
  out.retransmissions = static_cast<std::uint64_t>(std::count_if(
      out.run.trace.begin(), out.run.trace.end(), [](const TraceRow& r) { return r.event == TraceEvent::Retransmit; }));
  return out;
}

TsaoLeeRun tsao_lee(double ingress_rate_bps, const ConfigMap& overrides) {
  ConfigMap c = with("tsao_lee_slow", overrides);
  auto rates = split_list(c.at("topology.rates"));
  rates.at(0) = format_double(ingress_rate_bps);
  std::string joined;
  for (std::size_t i = 0; i < rates.size(); ++i) joined += (i ? "," : "") + rates[i];
  c["topology.rates"] = joined;

  TsaoLeeRun out;
  out.run = run_scenario(build_scenario(c));
  out.elapsed = out.run.summary.elapsed;
  out.drops_per_node = out.run.summary.drop_count_per_node;
  out.timeouts = out.run.summary.timeout_count;
  out.waiting_fraction = out.elapsed > 0.0 ? out.run.waiting_with_timer / out.elapsed : 0.0;
  out.completed = out.run.completed;
  return out;
}

std::vector<SweepPoint> loss_threshold_sweep(double k, const std::vector<double>& p_values,
                                             const std::vector<std::uint64_t>& seeds, const ConfigMap& overrides) {
  std::vector<Scenario> jobs;
  for (double p : p_values) {
    for (std::uint64_t seed : seeds) {
      jobs.push_back(build_scenario(with("loss_sweep", overrides,
                                         {{"algorithm.layer3.k", format_double(k)},
                                          {"loss.p", format_double(p)},
                                          {"seed", std::to_string(seed)}})));
    }
  }
  std::vector<SweepPoint> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const RunResult r = run_scenario(jobs[i]);
    out[i] = SweepPoint{jobs[i].loss.p, jobs[i].seed, r.summary.verdict, r.summary.max_E};
  });
  std::stable_sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.p != b.p ? a.p < b.p : a.seed < b.seed;
  });
  return out;
}

const char* to_string(CopyOutcome o) {
  switch (o) {
    case CopyOutcome::Converges: return "Converges";
    case CopyOutcome::Diverges: return "Diverges";
    case CopyOutcome::FalseConverges: return "FalseConverges";
    case CopyOutcome::Indeterminate: return "Indeterminate";
  }
  return "?";
}

CopyOutcome jth_attempt_matrix(unsigned i, unsigned j, const ConfigMap& overrides) {
  if (i < 1 || j < 1) throw std::invalid_argument("jth_attempt_matrix: copy indices start at 1");
  const Scenario s = build_scenario(
      with("jth_matrix", overrides, {{"loss.copy", std::to_string(i)}, {"algorithm.layer2.j", std::to_string(j)}}));
  const RunResult r = run_scenario(s);
  switch (r.summary.verdict) {
    case Verdict::Diverged: return CopyOutcome::Diverges;
    case Verdict::FalseConverged: return CopyOutcome::FalseConverges;
    case Verdict::Bounded: break;
  }
  if (std::abs(r.summary.final_E - s.true_rtt) / s.true_rtt < 0.05) return CopyOutcome::Converges;
  return CopyOutcome::Indeterminate;
}

AlgorithmClass classify_algorithm(const Scenario& scenario) {
  const RunResult r = run_scenario(scenario);
  const auto cls = classify_change(mean_multi_copy_change(ack_trajectory(r.trace)),
                                   scenario.detectors.class_epsilon.value_or(0.01 * scenario.true_rtt));
  if (!cls) throw std::runtime_error("classify_algorithm: the run produced no multi-copy acknowledgments");
  return *cls;
}

Scenario class_case_scenario(ClassCase which, std::uint64_t seed) {
  ConfigMap o{{"seed", std::to_string(seed)}};
  switch (which) {
    case ClassCase::FromFirstEveryFirstLost: break;
    case ClassCase::IgnoreEveryFirstLost: o["algorithm.layer2"] = "ignore"; break;
    case ClassCase::EarlyCopyMeasuredLater:
      o["topology.delays"] = "7.5";
      o["initial_estimate"] = "7.4";
      o["algorithm.layer3.k"] = "2";
      o["loss.model"] = "forced_copy";
      o["loss.copy"] = "1";
      o["algorithm.layer2"] = "from_copy";
      o["algorithm.layer2.j"] = "2";
      break;
  }
  return named_scenario("classify", o);
}

std::string resolve_axis(const ConfigMap& config, std::string_view axis) {
  std::string key(axis);
  if (axis == "p") key = "loss.p";
  if (axis == "k") key = "algorithm.layer3.k";
  if (!config.contains(key) || key == "scenario") throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
  return key;
}

std::vector<SweepRow> sweep(const ConfigMap& base, std::string_view axis, const std::vector<double>& values) {
  const ConfigMap resolved = resolve_config(base);
  const std::string key = resolve_axis(resolved, axis);
  std::vector<Scenario> jobs;
  for (double v : values) {
    ConfigMap c = resolved;
    c[key] = format_double(v);
    jobs.push_back(build_scenario(c));
  }
  std::vector<SweepRow> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { out[i] = SweepRow{values[i], run_scenario(jobs[i]).summary}; });
  std::stable_sort(out.begin(), out.end(), [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
  return out;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,verdict,final_e,throughput,duplicates\n";
  for (const auto& r : rows) {
    out += format_double(r.param) + "," + to_string(r.summary.verdict) + "," + format_double(r.summary.final_E) + "," +
           format_double(r.summary.throughput) + "," + std::to_string(r.summary.duplicates_received) + "\n";
  }
  return out;
}

}  // namespace rtolab
