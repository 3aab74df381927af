#pragma once

#include <any>
#include <memory>
#include <vector>

#include "dve/actors/galton.hpp"
#include "dve/netsim/network.hpp"
#include "dve/partition/migration.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve {

struct CreatePayload {
  Ball ball;
  PropertyUpdate update;
};

struct UpdateBatch {
  std::vector<PropertyUpdate> updates;
};

struct RemovePayload {
  PropertyUpdate update;
};

struct MigratePayload {
  Ball ball;
  std::uint64_t migration_id = 0;
  PartitionId from;
  PartitionId to;
  NodeId sender;
};

struct AckPayload {
  MigrationAck ack;
};

/// Payloads are shared immutably so relaying to several subscribers never copies them.
template <typename T>
std::any make_payload(T value) {
  return std::make_shared<const T>(std::move(value));
}

template <typename T>
const T& payload_as(const Message& msg) {
  return *std::any_cast<const std::shared_ptr<const T>&>(msg.payload);
}

/// Position carried by a set-update, if it has one.
inline const Vec3* position_in(const PropertyUpdate& u) {
  for (const auto& [p, v] : u.values) {
    if (p == Property::position) return std::get_if<Vec3>(&v);
  }
  return nullptr;
}

}  // namespace dve
