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

#include "rtolab/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rtolab {

TickScale::TickScale(std::int64_t ticks_per_second) : ticks_per_second_(ticks_per_second) {
  if (ticks_per_second <= 0) throw std::invalid_argument("ticks_per_second must be positive");
}

SimTime TickScale::from_seconds(double seconds) const {
  if (!(seconds >= 0.0)) throw std::invalid_argument("time must be nonnegative");
  const double ticks = std::nearbyint(seconds * static_cast<double>(ticks_per_second_));
  if (ticks >= static_cast<double>(SimTime::never().ticks)) return SimTime::never();
  return SimTime{static_cast<std::int64_t>(ticks)};
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PacketArrival: return "PacketArrival";
    case EventKind::TransmissionComplete: return "TransmissionComplete";
    case EventKind::TimerExpiry: return "TimerExpiry";
    case EventKind::AckArrival: return "AckArrival";
  }
  return "?";
}

EventHandle Engine::schedule(SimTime at, EventKind kind, std::int64_t payload, Handler handler) {
  if (at < now_)
    throw std::logic_error("cannot schedule an event in the past (t=" + std::to_string(at.ticks) +
                           " < now=" + std::to_string(now_.ticks) + ")");
  const std::uint64_t seq = next_sequence_++;
  queue_.emplace(Key{at.ticks, seq}, Entry{SimEvent{at, seq, kind, payload}, std::move(handler)});
  return EventHandle{at, seq};
}

bool Engine::cancel(const EventHandle& handle) {
  return queue_.erase(Key{handle.time.ticks, handle.sequence}) > 0;
}

SimStats Engine::run_until(SimTime deadline) {
  SimStats stats;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    if (it->second.event.time > deadline) break;
    Entry entry = std::move(it->second);
    queue_.erase(it);
    now_ = entry.event.time;
    if (logging_) log_.push_back(entry.event);
    if (entry.handler) entry.handler();
    ++stats.events_processed;
    if (step_hook_) step_hook_(now_);
  }
  if (!queue_.empty() && now_ < deadline) now_ = deadline;
  stats.clock = now_;
  stats.queue_exhausted = queue_.empty();
  return stats;
}

std::size_t Engine::pending(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      queue_.begin(), queue_.end(), [kind](const auto& kv) { return kv.second.event.kind == kind; }));
}

SimTime serialization_time(const Link& link, std::uint64_t size_bits, const TickScale& scale) {
  if (size_bits == 0) return SimTime::zero();
  const double exact = static_cast<double>(size_bits) * static_cast<double>(scale.ticks_per_second()) /
                       link.rate_bps;
  const double nearest = std::nearbyint(exact);
  // Treat representation noise around an integer as that integer.
  const double ticks = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact);
  return SimTime{static_cast<std::int64_t>(ticks)};
}

LinkState::LinkState(Link link) : link_(link) {
  if (!(link.rate_bps > 0.0)) throw std::invalid_argument("link rate must be positive");
  if (link.propagation < SimTime::zero()) throw std::invalid_argument("propagation delay must be >= 0");
}

SimTime LinkState::transmit(std::uint64_t size_bits, SimTime at, const TickScale& scale) {
  if (busy(at)) throw std::logic_error("transmit on a busy link");
  busy_until_ = at + serialization_time(link_, size_bits, scale);
  return busy_until_ + link_.propagation;
}

NodeBuffer::NodeBuffer(std::optional<std::uint32_t> capacity) : capacity_(capacity) {
  if (capacity_ && *capacity_ == 0) throw std::invalid_argument("buffer capacity must be positive");
}

Admission NodeBuffer::enqueue_or_drop() {
  if (capacity_ && occupancy_ >= *capacity_) {
    ++drops_;
    return Admission::Dropped;
  }
  ++occupancy_;
  return Admission::Enqueued;
}

void NodeBuffer::release() {
  if (occupancy_ == 0) throw std::logic_error("release on an empty buffer");
  --occupancy_;
}

void Topology::validate() const {
  if (node_count() < 2) throw std::invalid_argument("topology needs at least 2 nodes");
  if (links.size() != node_count() - 1)
    throw std::invalid_argument("a chain of n nodes needs exactly n-1 links");
  for (const auto& l : links) {
    if (!(l.rate_bps > 0.0)) throw std::invalid_argument("link rate must be positive");
    if (l.propagation < SimTime::zero()) throw std::invalid_argument("propagation delay must be >= 0");
  }
  for (const auto& c : buffer_capacity)
    if (c && *c == 0) throw std::invalid_argument("buffer capacity must be positive");
}

}  // namespace rtolab
