#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dve/actors/messages.hpp"
#include "dve/netsim/network.hpp"
#include "dve/partition/partition_map.hpp"

namespace dve {

struct Outgoing {
  NodeId to;
  Message msg;
};

/// Relays scene traffic between the script simulator and the physics
/// simulators. Routing:
///   create  -> every physics node (the owner's copy carries the entity)
///   update  -> the script node in full; each other physics node receives the
///              entries whose position lies in its partition's interest area
///   delete  -> script node and every other physics node
///   migrate, ack -> the message's destination node
/// Nothing is coalesced or reordered; each link sees the source's order.
class DispatcherActor {
 public:
  DispatcherActor(NodeId self, NodeId script, const PartitionMap& map, Network& network, MessageSizes sizes);

  /// Throws UnroutableMessage if a destination is not in the routing table.
  std::vector<Outgoing> dispatcher_relay(const Message& incoming) const;

  /// Relays and sends.
  void on_message(const Message& msg);

  std::uint64_t relayed() const { return relayed_; }

 private:
  bool is_physics(NodeId node) const { return physics_.contains(node); }

  NodeId self_;
  NodeId script_;
  const PartitionMap& map_;
  Network& network_;
  MessageSizes sizes_;
  std::map<NodeId, PartitionId> physics_;
  std::uint64_t relayed_ = 0;
};

}  // namespace dve
