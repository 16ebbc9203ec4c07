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

// Window-based, cumulative-ack transport endpoints. The sender is a state
// machine: each entry point takes the current time and returns the actions
// the caller must carry out (copies to hand to the network, timers to arm
// or cancel). It never touches the simulator directly.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rtolab/network.hpp"
#include "rtolab/rng.hpp"
#include "rtolab/rtt_estimation.hpp"
#include "rtolab/timeout_policy.hpp"

namespace rtolab {

/// One procedure per layer. Any combination is valid.
struct TimeoutAlgorithm {
  Layer1Policy layer1 = EwmaPolicy{0.5};
  Layer2Policy layer2 = FromFirst{};
  Layer3Policy layer3 = ScaleTimeout{4.0};
  Layer4Policy layer4{};
  Layer5Policy layer5 = FixedRetries{10};

  void validate() const;
};

enum class TimerMode { SingleTimer, PerPacketTimer };
enum class RetransmitScope { TimedOutOnly, AllUnacked };

struct SenderOptions {
  std::uint32_t window_size = 1;
  TimerMode timer_mode = TimerMode::SingleTimer;
  RetransmitScope retransmit_scope = RetransmitScope::TimedOutOnly;
  bool copy_echo_enabled = false;
  std::uint64_t packet_size_bits = 0;
  /// Stop offering new packets after this many; nullopt is unlimited.
  std::optional<std::uint64_t> packet_limit;
  /// Floor for nonpositive samples; nullopt means one tick.
  std::optional<double> sample_floor;
};

/// Timer keys: the connection timer in single-timer mode, otherwise the id
/// of the packet owning the timer.
inline constexpr PacketId kConnectionTimer = 0;

struct TimerArm {
  PacketId key = kConnectionTimer;
  PacketId owner = 0;  ///< packet whose loss the timer detects
  SimTime deadline;
  double interval = 0.0;
  std::uint32_t retry_count = 0;
};

enum class SampleAction { Layer1Update, Layer2Update, Ignored, Increased };

/// What happened to the estimate for one newly acknowledged packet.
struct AckedPacket {
  PacketId packet_id = 0;
  std::uint32_t copies = 1;
  std::optional<std::uint32_t> known_copy;  ///< from a trusted echo
  RttEstimate before;
  RttEstimate after;
  SampleAction action = SampleAction::Layer1Update;
  std::optional<double> sample;
};

struct SenderActions {
  std::vector<Packet> transmit;
  std::vector<TimerArm> arm;  ///< replaces any timer with the same key
  std::vector<PacketId> disarm;
  std::vector<AckedPacket> acked;
  bool timeout_fired = false;   ///< this call handled a timer expiry
  PacketId timed_out_packet = 0;
  double expired_interval = 0.0;
  std::uint32_t retry_count_at_expiry = 0;
  bool disconnected = false;
};

struct OutstandingPacket {
  TransmissionRecord record;
  RetryState retry;  ///< per-packet timer mode only
};

struct ConnectionState {
  RttEstimate estimate;
  RetryState retry;  ///< single-timer mode
  std::uint32_t window_size = 1;
  PacketId next_packet_id = 1;
  std::map<PacketId, OutstandingPacket> outstanding;
  TimerMode timer_mode = TimerMode::SingleTimer;
  RetransmitScope retransmit_scope = RetransmitScope::TimedOutOnly;
  bool copy_echo_enabled = false;
  std::uint64_t timeout_event_count = 0;
  std::uint64_t packets_delivered = 0;
  std::optional<IncreaseScheme> increase_state;
  bool disconnected = false;
};

class Sender {
 public:
  Sender(TimeoutAlgorithm algorithm, SenderOptions options, RttEstimate initial, TickScale scale,
         Rng backoff_rng);

  bool can_send() const;
  /// Sends one new packet. Returns no actions when the window is full, the
  /// packet limit is reached, or the connection is down.
  SenderActions on_send(SimTime now);
  /// Stale and duplicate acks are no-ops.
  SenderActions on_ack(const AckPacket& ack, SimTime now);
  /// Expiry of the timer `key`. Spurious expiries (no such timer, or one
  /// whose deadline is not `now`) return no actions.
  SenderActions on_timeout(PacketId key, SimTime now);

  const ConnectionState& state() const { return state_; }
  const TimeoutAlgorithm& algorithm() const { return algorithm_; }
  std::size_t armed_timers() const { return timers_.size(); }
  const std::map<PacketId, TimerArm>& timers() const { return timers_; }
  /// Interval of the timer covering `packet`, or 0 if none is armed.
  double current_interval(PacketId packet) const;

 private:
  TimerArm arm_fresh(PacketId key, PacketId owner, SimTime now, RetryState& retry);
  SimTime interval_ticks(double seconds) const;
  void retransmit(PacketId id, SimTime now, SenderActions& out);
  AckedPacket absorb_ack(OutstandingPacket& pkt, const AckPacket& ack, bool echo_trusted, SimTime now);

  TimeoutAlgorithm algorithm_;
  SenderOptions options_;
  TickScale scale_;
  Rng rng_;
  double sample_floor_;
  ConnectionState state_;
  std::map<PacketId, TimerArm> timers_;
};

/// Infinite receive buffer; acks every arriving copy, duplicates included.
class Receiver {
 public:
  explicit Receiver(bool echo_copies = false) : echo_copies_(echo_copies) {}

  AckPacket on_arrival(const Packet& packet);

  PacketId cumulative() const { return next_expected_ - 1; }
  std::uint64_t copies_received() const { return copies_received_; }
  std::uint64_t distinct_received() const { return distinct_; }
  std::uint64_t duplicates_received() const { return copies_received_ - distinct_; }

 private:
  bool echo_copies_;
  PacketId next_expected_ = 1;
  std::set<PacketId> out_of_order_;
  std::uint64_t copies_received_ = 0;
  std::uint64_t distinct_ = 0;
};

}  // namespace rtolab
