#include "dve/partition/migration.hpp"

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

const MigrationRecord& MigrationTable::begin(EntityId entity, PartitionId from, PartitionId to, SimTime now) {
  if (open_.contains(entity.value)) {
    throw Error(ErrorCode::AlreadyMigrating, fmt::format("entity {} already in flight", entity.value));
  }
  MigrationRecord rec{next_id_++, entity, from, to, now, std::nullopt, MigrationState::in_flight};
  return open_.emplace(entity.value, rec).first->second;
}

MigrationRecord MigrationTable::complete(const MigrationAck& ack, SimTime now) {
  auto it = open_.find(ack.entity.value);
  if (it == open_.end() || it->second.id != ack.migration_id) {
    throw Error(ErrorCode::UnknownMigration,
                fmt::format("no in-flight migration {} for entity {}", ack.migration_id, ack.entity.value));
  }
  MigrationRecord rec = it->second;
  open_.erase(it);
  rec.completed_at = now;
  rec.state = MigrationState::applied;
  ++completed_;
  total_handoff_ += now - rec.initiated_at;
  return rec;
}

}  // namespace dve
