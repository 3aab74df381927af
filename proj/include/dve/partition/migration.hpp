#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "dve/engine/sim_time.hpp"
#include "dve/partition/partition_map.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve {

enum class MigrationState { in_flight, applied };

struct MigrationRecord {
  std::uint64_t id = 0;
  EntityId entity;
  PartitionId from;
  PartitionId to;
  SimTime initiated_at;
  std::optional<SimTime> completed_at;
  MigrationState state = MigrationState::in_flight;
};

struct MigrationAck {
  EntityId entity;
  std::uint64_t migration_id = 0;
};

/// Migrations initiated by one partition. While a record is in flight the
/// entity is a ghost on the sender: not simulated, held until the receiver
/// acknowledges the transfer.
class MigrationTable {
 public:
  /// Throws AlreadyMigrating if the entity already has an in-flight record.
  const MigrationRecord& begin(EntityId entity, PartitionId from, PartitionId to, SimTime now);
  /// Marks the record applied and removes the ghost. Throws UnknownMigration
  /// for acks that match no in-flight record (including duplicates).
  MigrationRecord complete(const MigrationAck& ack, SimTime now);

  bool in_flight(EntityId entity) const { return open_.contains(entity.value); }
  std::size_t in_flight_count() const { return open_.size(); }
  std::uint64_t started() const { return next_id_; }
  std::uint64_t completed() const { return completed_; }
  /// Sum over completed migrations of completed_at - initiated_at.
  SimDuration total_handoff() const { return total_handoff_; }

 private:
  std::unordered_map<std::uint64_t, MigrationRecord> open_;
  std::uint64_t next_id_ = 0;
  std::uint64_t completed_ = 0;
  SimDuration total_handoff_;
};

}  // namespace dve
