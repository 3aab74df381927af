#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dve/actors/galton.hpp"
#include "dve/actors/messages.hpp"
#include "dve/engine/engine.hpp"
#include "dve/netsim/network.hpp"
#include "dve/partition/migration.hpp"
#include "dve/partition/partition_map.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve {

struct PhysicsParams {
  /// Work units per tick. Stepping one ball for one tick costs one unit.
  int capacity = 6000;
  /// Scene-size overhead: with N balls in the scene only
  /// capacity / (1 + N / contention_scale) units are left for stepping.
  /// Zero disables the overhead.
  double contention_scale = 40000.0;
  SimDuration tick = SimDuration::from_ms(100);
};

/// Ball-steps the simulator can afford this tick with `population` balls in its scene.
int effective_capacity(const PhysicsParams& params, std::size_t population);

struct TickReport {
  SimTime at;
  std::size_t active = 0;  // balls owned when the tick started
  std::size_t stepped = 0;
  std::size_t collected = 0;
  std::size_t discarded = 0;
  std::size_t migrated_out = 0;
  double load = 0.0;  // active / capacity
};

struct Collection {
  EntityId id;
  SimTime at;
  std::optional<int> bucket;  // nullopt: discarded
  double interval_s = 0.0;
};

/// A physics simulator responsible for one partition.
///
/// Each tick it steps at most effective_capacity() of its balls, round-robin
/// in id (creation) order starting where the previous tick stopped. A stepped
/// ball gains one tick of fall time; an unstepped ball makes no progress,
/// which is how overload turns into longer drop intervals.
class PhysicsActor {
 public:
  PhysicsActor(NodeId self, PartitionId partition, NodeId dispatcher, const GaltonGeometry& geometry,
               const PartitionMap& map, PhysicsParams params, Engine& engine, Network& network, NodeClock clock,
               MessageSizes sizes);

  /// Schedules ticks every params.tick starting at t0.
  void start(SimTime t0);
  void stop() { running_ = false; }

  TickReport physics_tick(SimTime now);
  /// Finishes a ball that has passed every level. Records the bucket (or the
  /// discard) and the creation-to-collection interval, and broadcasts the deletion.
  Collection collect_ball(Ball ball, SimTime now);

  void on_message(const Message& msg);

  /// Accept ownership of a ball directly (used by tests and by create delivery).
  void adopt(Ball ball);

  NodeId node() const { return self_; }
  PartitionId partition() const { return partition_; }
  const PhysicsParams& params() const { return params_; }
  std::size_t active_count() const { return owned_.size(); }
  std::size_t ghost_count() const { return ghosts_.size(); }
  bool owns(EntityId id) const { return owned_.contains(id.value); }
  const std::map<std::uint64_t, Ball>& owned() const { return owned_; }
  const MigrationTable& migrations() const { return migrations_; }
  const SceneReplica& replica() const { return replica_; }
  const std::vector<std::int64_t>& histogram() const { return histogram_; }
  std::int64_t collected() const { return collected_; }
  std::int64_t discarded() const { return discarded_; }
  const std::vector<Collection>& collections() const { return collections_; }
  std::uint64_t msgs_sent() const { return msgs_sent_; }
  std::uint64_t msgs_recv() const { return msgs_recv_; }
  std::uint64_t unknown_entity_errors() const { return unknown_entity_; }
  /// Ticks in which an owned ball sat outside this partition.
  std::uint64_t ownership_violations() const { return ownership_violations_; }
  double peak_load() const { return peak_load_; }
  std::uint64_t total_steps() const { return total_steps_; }

  /// Hook run after every tick (the harness uses it for audits and sampling).
  void set_tick_observer(std::function<void(const TickReport&)> obs) { observer_ = std::move(obs); }

 private:
  void tick_and_reschedule();
  Stamp next_stamp() { return Stamp{engine_.local_now(clock_), self_, next_seq_++}; }
  void send(Message msg);
  void queue_position(const Ball& ball);
  void flush_updates();
  void begin_migration(Ball ball, PartitionId to, SimTime now);
  void apply_remote(const PropertyUpdate& u);

  NodeId self_;
  PartitionId partition_;
  NodeId dispatcher_;
  const GaltonGeometry& geometry_;
  const PartitionMap& map_;
  PhysicsParams params_;
  Engine& engine_;
  Network& network_;
  NodeClock clock_;
  MessageSizes sizes_;
  SceneReplica replica_;

  std::map<std::uint64_t, Ball> owned_;
  std::unordered_map<std::uint64_t, Ball> ghosts_;
  MigrationTable migrations_;
  std::uint64_t cursor_ = 0;
  std::vector<PropertyUpdate> pending_updates_;

  std::vector<std::int64_t> histogram_;
  std::vector<Collection> collections_;
  std::int64_t collected_ = 0;
  std::int64_t discarded_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t msgs_sent_ = 0;
  std::uint64_t msgs_recv_ = 0;
  std::uint64_t unknown_entity_ = 0;
  std::uint64_t ownership_violations_ = 0;
  std::uint64_t total_steps_ = 0;
  double peak_load_ = 0.0;
  bool running_ = false;
  std::function<void(const TickReport&)> observer_;
};

}  // namespace dve
