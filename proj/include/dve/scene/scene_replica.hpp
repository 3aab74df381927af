#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "dve/engine/sim_time.hpp"

namespace dve {

struct EntityId {
  std::uint64_t value = 0;
  constexpr auto operator<=>(const EntityId&) const = default;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

enum class Property : std::uint8_t { existence = 0, position, velocity, tag };
inline constexpr std::size_t kPropertyCount = 4;

/// monostate marks an unset register.
using PropertyValue = std::variant<std::monostate, bool, std::int64_t, double, Vec3>;

/// Lexicographic (ts, origin, seq): a strict total order over all updates
/// issued in a run, since seq is unique per origin.
struct Stamp {
  Timestamp ts;
  NodeId origin;
  std::uint64_t seq = 0;
  constexpr auto operator<=>(const Stamp&) const = default;
};

enum class UpdateKind : std::uint8_t { create, set, remove };

struct PropertyUpdate {
  EntityId entity;
  UpdateKind kind = UpdateKind::set;
  std::vector<std::pair<Property, PropertyValue>> values;
  Stamp stamp;
};

enum class ApplyResult { accepted, superseded };

struct SceneDigest {
  std::uint64_t value = 0;
  std::size_t live_entities = 0;
  bool operator==(const SceneDigest&) const = default;
};

/// One node's copy of the shared scene.
///
/// Each (entity, property) is a last-writer-wins register keyed by Stamp.
/// A create writes every register of the entity (absent properties become
/// unset) and a remove writes every register as unset with existence=false,
/// so the final state is a pure function of the set of updates applied and
/// deletions act as tombstones that outrank older writes.
class SceneReplica {
 public:
  explicit SceneReplica(NodeId node = {}) : node_(node) {}

  /// Throws UnknownEntity for a non-create update on an entity with no record.
  ApplyResult apply_update(const PropertyUpdate& u);

  /// Local creation. Throws DuplicateCreate if the entity is currently live.
  ApplyResult create_entity(EntityId id, std::vector<std::pair<Property, PropertyValue>> initial, Stamp stamp);
  /// Local deletion. Throws UnknownEntity if the entity was never seen.
  ApplyResult delete_entity(EntityId id, Stamp stamp);

  bool is_live(EntityId id) const;
  bool is_known(EntityId id) const { return entities_.contains(id.value); }
  std::optional<PropertyValue> get(EntityId id, Property p) const;
  std::optional<Stamp> stamp_of(EntityId id, Property p) const;
  std::size_t live_count() const { return live_count_; }
  std::size_t known_count() const { return entities_.size(); }
  NodeId node() const { return node_; }

  /// Order-independent hash of the visible state: live entities and their
  /// set properties, canonically ordered by entity id then property.
  SceneDigest digest() const;

 private:
  struct Register {
    PropertyValue value;
    std::optional<Stamp> stamp;
  };
  using Record = std::array<Register, kPropertyCount>;

  static bool write(Register& reg, const PropertyValue& value, const Stamp& stamp);
  static bool live(const Record& r);

  NodeId node_;
  std::unordered_map<std::uint64_t, Record> entities_;
  std::size_t live_count_ = 0;
};

}  // namespace dve
