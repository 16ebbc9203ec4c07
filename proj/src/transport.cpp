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

#include "rtolab/transport.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rtolab {

void TimeoutAlgorithm::validate() const {
  rtolab::validate(layer1);
  rtolab::validate(layer2);
  rtolab::validate(layer3);
  rtolab::validate(layer4);
  rtolab::validate(layer5);
}

Sender::Sender(TimeoutAlgorithm algorithm, SenderOptions options, RttEstimate initial, TickScale scale,
               Rng backoff_rng)
    : algorithm_(std::move(algorithm)), options_(options), scale_(scale), rng_(std::move(backoff_rng)) {
  algorithm_.validate();
  if (options_.window_size < 1) throw std::invalid_argument("window size must be >= 1");
  if (!(initial.mean > 0.0)) throw std::invalid_argument("initial estimate must be positive");
  sample_floor_ = options_.sample_floor.value_or(scale_.tick_seconds());
  if (!(sample_floor_ > 0.0)) throw std::invalid_argument("sample floor must be positive");

  state_.estimate = initial;
  state_.window_size = options_.window_size;
  state_.timer_mode = options_.timer_mode;
  state_.retransmit_scope = options_.retransmit_scope;
  state_.copy_echo_enabled = options_.copy_echo_enabled;
  if (const auto* inc = std::get_if<IgnoreAndIncrease>(&algorithm_.layer2))
    state_.increase_state = make_increase_scheme(inc->scheme);
}

bool Sender::can_send() const {
  if (state_.disconnected) return false;
  if (state_.outstanding.size() >= state_.window_size) return false;
  if (options_.packet_limit && static_cast<std::uint64_t>(state_.next_packet_id) > *options_.packet_limit)
    return false;
  return true;
}

SimTime Sender::interval_ticks(double seconds) const {
  return std::max(SimTime{1}, scale_.from_seconds(seconds));
}

TimerArm Sender::arm_fresh(PacketId key, PacketId owner, SimTime now, RetryState& retry) {
  const double t0 = first_timeout(state_.estimate, algorithm_.layer3);
  retry.reset(t0);
  retry.packets_delivered = state_.packets_delivered;
  TimerArm arm{key, owner, now + interval_ticks(t0), t0, 0};
  timers_[key] = arm;
  return arm;
}

double Sender::current_interval(PacketId packet) const {
  const PacketId key = state_.timer_mode == TimerMode::SingleTimer ? kConnectionTimer : packet;
  auto it = timers_.find(key);
  return it == timers_.end() ? 0.0 : it->second.interval;
}

SenderActions Sender::on_send(SimTime now) {
  SenderActions out;
  if (!can_send()) return out;
  const PacketId id = state_.next_packet_id++;
  OutstandingPacket pkt;
  pkt.record.packet_id = id;
  pkt.record.add_copy(now);
  out.transmit.push_back(Packet{id, 1, options_.packet_size_bits});

  if (state_.timer_mode == TimerMode::SingleTimer) {
    if (!timers_.contains(kConnectionTimer))
      out.arm.push_back(arm_fresh(kConnectionTimer, id, now, state_.retry));
  } else {
    out.arm.push_back(arm_fresh(id, id, now, pkt.retry));
  }
  state_.outstanding.emplace(id, std::move(pkt));
  return out;
}

AckedPacket Sender::absorb_ack(OutstandingPacket& pkt, const AckPacket& ack, bool echo_trusted,
                               SimTime now) {
  TransmissionRecord& rec = pkt.record;
  rec.first_ack_time = now;
  AckedPacket a;
  a.packet_id = rec.packet_id;
  a.copies = static_cast<std::uint32_t>(rec.copies());
  a.before = state_.estimate;

  const Layer1Policy& l1 = algorithm_.layer1;
  if (echo_trusted && ack.echo->copy >= 1 && ack.echo->copy <= a.copies) {
    // The copy is known, so the sample is exact whatever layer 2 says.
    a.known_copy = ack.echo->copy;
    a.sample = extract_sample(rec, now, FromCopy{ack.echo->copy}, scale_, sample_floor_);
    state_.estimate = apply_sample(state_.estimate, *a.sample, l1);
    a.action = a.copies == 1 ? SampleAction::Layer1Update : SampleAction::Layer2Update;
  } else if (a.copies == 1) {
    a.sample = extract_sample(rec, now, FromFirst{}, scale_, sample_floor_);
    state_.estimate = apply_sample(state_.estimate, *a.sample, l1);
    a.action = SampleAction::Layer1Update;
  } else if (std::holds_alternative<IgnoreAndIncrease>(algorithm_.layer2)) {
    auto inc = increase_estimate(state_.estimate, *state_.increase_state);
    state_.estimate = inc.estimate;
    state_.increase_state = std::move(inc.scheme);
    a.action = SampleAction::Increased;
  } else if (auto s = extract_sample(rec, now, algorithm_.layer2, scale_, sample_floor_)) {
    a.sample = s;
    state_.estimate = apply_sample(state_.estimate, *s, l1);
    a.action = SampleAction::Layer2Update;
  } else {
    a.action = SampleAction::Ignored;
  }
  a.after = state_.estimate;
  return a;
}

SenderActions Sender::on_ack(const AckPacket& ack, SimTime now) {
  SenderActions out;
  if (state_.disconnected) return out;
  auto end = state_.outstanding.upper_bound(ack.cumulative_ack);
  const auto newly = std::distance(state_.outstanding.begin(), end);
  if (newly == 0) return out;

  const bool echo_trusted = state_.copy_echo_enabled && ack.echo && newly == 1 &&
                            ack.echo->packet_id == state_.outstanding.begin()->first;

  for (auto it = state_.outstanding.begin(); it != end;) {
    out.acked.push_back(absorb_ack(it->second, ack, echo_trusted, now));
    ++state_.packets_delivered;
    if (state_.timer_mode == TimerMode::PerPacketTimer && timers_.erase(it->first) > 0)
      out.disarm.push_back(it->first);
    it = state_.outstanding.erase(it);
  }

  if (state_.timer_mode == TimerMode::SingleTimer) {
    auto t = timers_.find(kConnectionTimer);
    if (t != timers_.end() && t->second.owner <= ack.cumulative_ack) {
      if (state_.outstanding.empty()) {
        timers_.erase(t);
        state_.retry = RetryState{};
        out.disarm.push_back(kConnectionTimer);
      } else {
        out.arm.push_back(
            arm_fresh(kConnectionTimer, state_.outstanding.begin()->first, now, state_.retry));
      }
    }
  }
  return out;
}

void Sender::retransmit(PacketId id, SimTime now, SenderActions& out) {
  auto it = state_.outstanding.find(id);
  if (it == state_.outstanding.end()) return;
  TransmissionRecord& rec = it->second.record;
  if (rec.copy_send_times.back() == now) return;
  rec.add_copy(now);
  out.transmit.push_back(Packet{id, static_cast<std::uint32_t>(rec.copies()), options_.packet_size_bits});
}

SenderActions Sender::on_timeout(PacketId key, SimTime now) {
  SenderActions out;
  auto t = timers_.find(key);
  if (state_.disconnected || t == timers_.end() || t->second.deadline != now) return out;
  TimerArm& timer = t->second;
  auto owner = state_.outstanding.find(timer.owner);
  if (owner == state_.outstanding.end()) {
    timers_.erase(t);
    return out;
  }
  RetryState& retry =
      state_.timer_mode == TimerMode::SingleTimer ? state_.retry : owner->second.retry;

  ++state_.timeout_event_count;
  out.timeout_fired = true;
  out.timed_out_packet = timer.owner;
  out.expired_interval = timer.interval;
  out.retry_count_at_expiry = retry.retry_count;
  retry.packets_delivered = state_.packets_delivered;

  if (disconnect_decision(retry, algorithm_.layer5)) {
    state_.disconnected = true;
    out.disconnected = true;
    for (const auto& [k, _] : timers_) out.disarm.push_back(k);
    timers_.clear();
    return out;
  }

  if (state_.retransmit_scope == RetransmitScope::TimedOutOnly) {
    retransmit(timer.owner, now, out);
  } else {
    for (const auto& [id, _] : state_.outstanding) retransmit(id, now, out);
  }

  ++retry.retry_count;
  const double next = backoff_interval(retry, retry.interval_history.front(), algorithm_.layer4, rng_);
  retry.push_interval(next);
  timer.deadline = now + interval_ticks(next);
  timer.interval = next;
  timer.retry_count = retry.retry_count;
  out.arm.push_back(timer);
  return out;
}

AckPacket Receiver::on_arrival(const Packet& packet) {
  ++copies_received_;
  const bool fresh = packet.id >= next_expected_ && !out_of_order_.contains(packet.id);
  if (fresh) {
    ++distinct_;
    if (packet.id == next_expected_) {
      ++next_expected_;
      while (!out_of_order_.empty() && *out_of_order_.begin() == next_expected_) {
        out_of_order_.erase(out_of_order_.begin());
        ++next_expected_;
      }
    } else {
      out_of_order_.insert(packet.id);
    }
  }
  AckPacket ack{cumulative(), std::nullopt};
  if (echo_copies_) ack.echo = CopyEcho{packet.id, packet.copy};
  return ack;
}

}  // namespace rtolab
