#include "dve/actors/dispatcher.hpp"

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

DispatcherActor::DispatcherActor(NodeId self, NodeId script, const PartitionMap& map, Network& network,
                                 MessageSizes sizes)
    : self_(self), script_(script), map_(map), network_(network), sizes_(sizes) {
  for (const auto& [partition, node] : map_.owners()) physics_.emplace(node, partition);
}

std::vector<Outgoing> DispatcherActor::dispatcher_relay(const Message& in) const {
  std::vector<Outgoing> out;
  auto forward = [&](NodeId to, Message m) {
    if (!network_.find_link(self_, to)) {
      throw Error(ErrorCode::UnroutableMessage,
                  fmt::format("no route to node {} for {}", to.value, to_string(in.kind)));
    }
    out.push_back(Outgoing{to, std::move(m)});
  };

  auto located = [&](const PropertyUpdate& u) -> const Vec3& {
    const Vec3* pos = position_in(u);
    if (pos == nullptr) {
      throw Error(ErrorCode::UnroutableMessage, fmt::format("entity {} has no position", u.entity.value));
    }
    return *pos;
  };

  switch (in.kind) {
    case MessageKind::create: {
      const Vec3& pos = located(payload_as<CreatePayload>(in).update);
      const NodeId owner = map_.node_of(map_.owner_of(Vec2{pos.x, pos.y}));
      for (const auto& [node, partition] : physics_) {
        Message m = in;
        m.destination = node;
        m.carries_entity = in.carries_entity && node == owner;
        forward(node, std::move(m));
      }
      break;
    }
    case MessageKind::update: {
      const auto& batch = payload_as<UpdateBatch>(in);
      if (in.origin != script_) forward(script_, in);
      for (const auto& [node, partition] : physics_) {
        if (node == in.origin) continue;
        UpdateBatch mine;
        for (const auto& u : batch.updates) {
          const Vec3& pos = located(u);
          if (map_.in_interest(partition, Vec2{pos.x, pos.y})) mine.updates.push_back(u);
        }
        if (mine.updates.empty()) continue;
        Message m = in;
        m.destination = node;
        m.size_bytes = static_cast<std::uint32_t>(mine.updates.size()) * sizes_.update;
        m.payload = make_payload(std::move(mine));
        forward(node, std::move(m));
      }
      break;
    }
    case MessageKind::remove: {
      if (in.origin != script_) forward(script_, in);
      for (const auto& [node, partition] : physics_) {
        if (node != in.origin) forward(node, in);
      }
      break;
    }
    case MessageKind::migrate:
    case MessageKind::ack:
    case MessageKind::request:
    case MessageKind::response: {
      if (in.destination == self_ || (!is_physics(in.destination) && in.destination != script_)) {
        throw Error(ErrorCode::UnroutableMessage,
                    fmt::format("destination {} not in routing table", in.destination.value));
      }
      forward(in.destination, in);
      break;
    }
  }
  return out;
}

void DispatcherActor::on_message(const Message& msg) {
  for (auto& o : dispatcher_relay(msg)) {
    network_.send(self_, o.to, std::move(o.msg));
    ++relayed_;
  }
}

}  // namespace dve
