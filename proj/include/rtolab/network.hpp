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
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "rtolab/rtt_estimation.hpp"
#include "rtolab/sim_core.hpp"

namespace rtolab {

/// One copy of a data packet on the wire.
struct Packet {
  PacketId id = 0;
  std::uint32_t copy = 1;
  std::uint64_t size_bits = 0;
};

struct CopyEcho {
  PacketId packet_id = 0;
  std::uint32_t copy = 0;
};

/// Cumulative acknowledgment: covers every packet id <= cumulative_ack.
/// The echo names the copy whose arrival triggered this ack, when the
/// connection carries copy numbers.
struct AckPacket {
  PacketId cumulative_ack = 0;
  std::optional<CopyEcho> echo;
};

/// Store-and-forward serial chain. Data flows from node 0 to the last node;
/// acks return with zero size, bypassing the buffers, after the summed
/// propagation delay of the chain.
class ChainNetwork {
 public:
  struct Hooks {
    std::function<bool(const Packet&)> ingress_loss;  ///< true drops the copy at node 0
    std::function<bool(const AckPacket&)> ack_loss;
    std::function<void(const Packet&, std::size_t node)> on_drop;
    std::function<void(const Packet&)> on_deliver;
    std::function<void(const AckPacket&)> on_ack;
    std::function<void(const AckPacket&)> on_ack_drop;
  };

  ChainNetwork(Engine& engine, Topology topology, TickScale scale, Hooks hooks);
  ChainNetwork(const ChainNetwork&) = delete;
  ChainNetwork& operator=(const ChainNetwork&) = delete;

  /// Hands a copy to node 0 at engine.now().
  void send(const Packet& packet);
  /// Sends an ack from the last node at engine.now().
  void send_ack(const AckPacket& ack);

  /// Node 0 is neither serializing nor holding queued copies.
  bool source_idle() const;

  const Topology& topology() const { return topology_; }
  const NodeBuffer& buffer(std::size_t node) const { return nodes_.at(node).buffer; }
  std::vector<std::uint64_t> drops_per_node() const;

  std::uint64_t copies_sent() const { return sent_; }
  std::uint64_t copies_delivered() const { return delivered_; }
  std::uint64_t copies_dropped() const { return dropped_; }
  /// Copies held in buffers or propagating, counted directly.
  std::uint64_t copies_in_network() const;

 private:
  struct Node {
    NodeBuffer buffer;
    std::deque<Packet> waiting;
    bool serializing = false;
    std::optional<LinkState> out;
  };

  void arrive(std::size_t node, const Packet& packet);
  void try_start(std::size_t node);

  Engine& engine_;
  Topology topology_;
  TickScale scale_;
  Hooks hooks_;
  std::vector<Node> nodes_;
  SimTime ack_delay_;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t propagating_ = 0;
  std::vector<std::uint64_t> drops_;
};

}  // namespace rtolab
