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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rtolab/sim_time.hpp"

namespace rtolab {

enum class EventKind { PacketArrival, TransmissionComplete, TimerExpiry, AckArrival };

const char* to_string(EventKind kind);

struct SimEvent {
  SimTime time;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::PacketArrival;
  std::int64_t payload = 0;  ///< packet or timer identity, for logs only
};

struct EventHandle {
  SimTime time;
  std::uint64_t sequence = 0;
};

struct SimStats {
  std::uint64_t events_processed = 0;
  SimTime clock;
  bool queue_exhausted = false;
};

/// Single-threaded discrete-event loop. Events at equal times run in
/// insertion order.
class Engine {
 public:
  using Handler = std::function<void()>;

  SimTime now() const { return now_; }

  /// Throws std::logic_error for a time before now().
  EventHandle schedule(SimTime at, EventKind kind, std::int64_t payload, Handler handler);
  /// Returns false when the event already ran or was cancelled.
  bool cancel(const EventHandle& handle);

  /// Processes every event with time <= deadline. The clock ends at the last
  /// processed event, or at the deadline when later events are still queued.
  SimStats run_until(SimTime deadline);

  std::size_t pending() const { return queue_.size(); }
  std::size_t pending(EventKind kind) const;

  void set_logging(bool on) { logging_ = on; }
  const std::vector<SimEvent>& log() const { return log_; }

  /// Called after every processed event.
  void set_step_hook(std::function<void(SimTime)> hook) { step_hook_ = std::move(hook); }

 private:
  struct Entry {
    SimEvent event;
    Handler handler;
  };
  using Key = std::pair<std::int64_t, std::uint64_t>;

  std::map<Key, Entry> queue_;
  SimTime now_;
  std::uint64_t next_sequence_ = 0;
  bool logging_ = false;
  std::vector<SimEvent> log_;
  std::function<void(SimTime)> step_hook_;
};

struct Link {
  double rate_bps = 19200.0;
  SimTime propagation;
};

/// Serialization time rounded up to a whole tick, so nothing ever arrives
/// early.
SimTime serialization_time(const Link& link, std::uint64_t size_bits, const TickScale& scale);

class LinkState {
 public:
  explicit LinkState(Link link);

  const Link& link() const { return link_; }
  bool busy(SimTime at) const { return at < busy_until_; }
  SimTime busy_until() const { return busy_until_; }

  /// Starts a transmission and returns the arrival time at the far end.
  /// Throws std::logic_error if the link is still serializing.
  SimTime transmit(std::uint64_t size_bits, SimTime at, const TickScale& scale);

 private:
  Link link_;
  SimTime busy_until_;
};

enum class Admission { Enqueued, Dropped };

/// Drop-tail buffer counting packets. No capacity means unbounded.
class NodeBuffer {
 public:
  explicit NodeBuffer(std::optional<std::uint32_t> capacity = std::nullopt);

  Admission enqueue_or_drop();
  /// Frees one slot; throws if the buffer is empty.
  void release();

  std::optional<std::uint32_t> capacity() const { return capacity_; }
  std::uint32_t occupancy() const { return occupancy_; }
  std::uint64_t drops() const { return drops_; }

 private:
  std::optional<std::uint32_t> capacity_;
  std::uint32_t occupancy_ = 0;
  std::uint64_t drops_ = 0;
};

/// Serial chain: node i connects to node i+1 by links[i].
struct Topology {
  std::vector<Link> links;
  std::vector<std::optional<std::uint32_t>> buffer_capacity;  ///< one per node

  std::size_t node_count() const { return buffer_capacity.size(); }
  /// Throws std::invalid_argument unless there are >= 2 nodes, exactly
  /// node_count()-1 links, positive rates and positive capacities.
  void validate() const;
};

}  // namespace rtolab
