#pragma once

#include <cstdint>
#include <vector>

#include "dve/actors/galton.hpp"
#include "dve/actors/messages.hpp"
#include "dve/engine/engine.hpp"
#include "dve/netsim/network.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve {

struct Dropper {
  std::uint16_t box = 0;
  std::uint16_t row = 0;
  std::uint16_t index = 0;
  int remaining = 0;
};

/// The script simulator: owns the droppers and creates balls on a fixed
/// period. Its schedule never depends on physics load.
class ScriptActor {
 public:
  ScriptActor(NodeId self, NodeId dispatcher, const GaltonGeometry& geometry, SimDuration period, Engine& engine,
              Network& network, NodeClock clock, MessageSizes sizes);

  /// Schedules dropper ticks at t0, t0 + period, ... until every dropper is empty.
  void start(SimTime t0);
  /// Cancels remaining drops.
  void stop() { running_ = false; }

  /// One creation per dropper that still has balls: applies each creation to
  /// the local replica and returns the create messages bound for the dispatcher.
  std::vector<Message> dropper_tick(SimTime now);

  void on_message(const Message& msg);

  const std::vector<Dropper>& droppers() const { return droppers_; }
  std::int64_t created() const { return created_; }
  const SceneReplica& replica() const { return replica_; }
  std::uint64_t msgs_sent() const { return msgs_sent_; }
  std::uint64_t msgs_recv() const { return msgs_recv_; }
  std::uint64_t unknown_entity_errors() const { return unknown_entity_; }

 private:
  void tick_and_reschedule();
  Stamp next_stamp();

  NodeId self_;
  NodeId dispatcher_;
  const GaltonGeometry& geometry_;
  SimDuration period_;
  Engine& engine_;
  Network& network_;
  NodeClock clock_;
  MessageSizes sizes_;
  SceneReplica replica_;
  std::vector<Dropper> droppers_;
  std::int64_t created_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t msgs_sent_ = 0;
  std::uint64_t msgs_recv_ = 0;
  std::uint64_t unknown_entity_ = 0;
  bool running_ = false;
};

}  // namespace dve
