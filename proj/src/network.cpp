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

#include "rtolab/network.hpp"

#include <utility>

namespace rtolab {

ChainNetwork::ChainNetwork(Engine& engine, Topology topology, TickScale scale, Hooks hooks)
    : engine_(engine), topology_(std::move(topology)), scale_(scale), hooks_(std::move(hooks)) {
  topology_.validate();
  nodes_.reserve(topology_.node_count());
  for (std::size_t i = 0; i < topology_.node_count(); ++i) {
    Node n{NodeBuffer(topology_.buffer_capacity[i]), {}, false, std::nullopt};
    if (i + 1 < topology_.node_count()) n.out.emplace(topology_.links[i]);
    nodes_.push_back(std::move(n));
  }
  for (const auto& l : topology_.links) ack_delay_ += l.propagation;
  drops_.assign(topology_.node_count(), 0);
}

void ChainNetwork::send(const Packet& packet) {
  ++sent_;
  if (hooks_.ingress_loss && hooks_.ingress_loss(packet)) {
    ++dropped_;
    ++drops_[0];
    if (hooks_.on_drop) hooks_.on_drop(packet, 0);
    return;
  }
  arrive(0, packet);
}

void ChainNetwork::send_ack(const AckPacket& ack) {
  if (hooks_.ack_loss && hooks_.ack_loss(ack)) {
    if (hooks_.on_ack_drop) hooks_.on_ack_drop(ack);
    return;
  }
  engine_.schedule(engine_.now() + ack_delay_, EventKind::AckArrival, ack.cumulative_ack, [this, ack] {
    if (hooks_.on_ack) hooks_.on_ack(ack);
  });
}

void ChainNetwork::arrive(std::size_t node, const Packet& packet) {
  if (node + 1 == nodes_.size()) {
    ++delivered_;
    if (hooks_.on_deliver) hooks_.on_deliver(packet);
    return;
  }
  Node& n = nodes_[node];
  if (n.buffer.enqueue_or_drop() == Admission::Dropped) {
    ++dropped_;
    ++drops_[node];
    if (hooks_.on_drop) hooks_.on_drop(packet, node);
    return;
  }
  n.waiting.push_back(packet);
  try_start(node);
}

void ChainNetwork::try_start(std::size_t node) {
  Node& n = nodes_[node];
  if (n.serializing || n.waiting.empty()) return;
  const Packet packet = n.waiting.front();
  n.waiting.pop_front();
  n.serializing = true;
  const SimTime arrival = n.out->transmit(packet.size_bits, engine_.now(), scale_);
  engine_.schedule(n.out->busy_until(), EventKind::TransmissionComplete, packet.id, [this, node] {
    Node& self = nodes_[node];
    self.serializing = false;
    self.buffer.release();
    ++propagating_;
    try_start(node);
  });
  engine_.schedule(arrival, EventKind::PacketArrival, packet.id, [this, node, packet] {
    --propagating_;
    arrive(node + 1, packet);
  });
}

bool ChainNetwork::source_idle() const {
  const Node& n = nodes_.front();
  return !n.serializing && n.waiting.empty();
}

std::vector<std::uint64_t> ChainNetwork::drops_per_node() const { return drops_; }

std::uint64_t ChainNetwork::copies_in_network() const {
  std::uint64_t held = propagating_;
  for (const auto& n : nodes_) held += n.buffer.occupancy();
  return held;
}

}  // namespace rtolab
