#include "dve/scene/scene_replica.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dve/engine/random_stream.hpp"
#include "dve/error.hpp"

namespace dve {

namespace {

constexpr std::size_t idx(Property p) { return static_cast<std::size_t>(p); }

void hash_value(Fnv1a& h, const PropertyValue& v) {
  h.add(static_cast<std::uint64_t>(v.index()));
  std::visit(
      [&h](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          h.add(static_cast<std::uint64_t>(x));
        } else if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>) {
          h.add(x);
        } else if constexpr (std::is_same_v<T, Vec3>) {
          h.add(x.x);
          h.add(x.y);
          h.add(x.z);
        }
      },
      v);
}

}  // namespace

bool SceneReplica::write(Register& reg, const PropertyValue& value, const Stamp& stamp) {
  if (reg.stamp && !(*reg.stamp < stamp)) return false;
  reg.value = value;
  reg.stamp = stamp;
  return true;
}

bool SceneReplica::live(const Record& r) {
  const auto* b = std::get_if<bool>(&r[idx(Property::existence)].value);
  return b != nullptr && *b;
}

ApplyResult SceneReplica::apply_update(const PropertyUpdate& u) {
  auto it = entities_.find(u.entity.value);
  if (it == entities_.end()) {
    if (u.kind != UpdateKind::create) {
      throw Error(ErrorCode::UnknownEntity, fmt::format("entity {} on node {}", u.entity.value, node_.value));
    }
    it = entities_.emplace(u.entity.value, Record{}).first;
  }
  Record& rec = it->second;
  const bool was_live = live(rec);
  bool changed = false;

  switch (u.kind) {
    case UpdateKind::create: {
      std::array<PropertyValue, kPropertyCount> next{};
      for (const auto& [p, v] : u.values) next[idx(p)] = v;
      next[idx(Property::existence)] = true;
      for (std::size_t i = 0; i < kPropertyCount; ++i) changed |= write(rec[i], next[i], u.stamp);
      break;
    }
    case UpdateKind::remove: {
      for (std::size_t i = 0; i < kPropertyCount; ++i) {
        changed |= write(rec[i], i == idx(Property::existence) ? PropertyValue{false} : PropertyValue{}, u.stamp);
      }
      break;
    }
    case UpdateKind::set: {
      for (const auto& [p, v] : u.values) {
        if (p == Property::existence) {
          throw Error(ErrorCode::InvalidParameter, "existence changes only through create/remove");
        }
        changed |= write(rec[idx(p)], v, u.stamp);
      }
      break;
    }
  }

  const bool is_live_now = live(rec);
  if (was_live && !is_live_now) --live_count_;
  if (!was_live && is_live_now) ++live_count_;
  return changed ? ApplyResult::accepted : ApplyResult::superseded;
}

ApplyResult SceneReplica::create_entity(EntityId id, std::vector<std::pair<Property, PropertyValue>> initial,
                                        Stamp stamp) {
  if (is_live(id)) {
    throw Error(ErrorCode::DuplicateCreate, fmt::format("entity {} already live", id.value));
  }
  return apply_update(PropertyUpdate{id, UpdateKind::create, std::move(initial), stamp});
}

ApplyResult SceneReplica::delete_entity(EntityId id, Stamp stamp) {
  return apply_update(PropertyUpdate{id, UpdateKind::remove, {}, stamp});
}

bool SceneReplica::is_live(EntityId id) const {
  auto it = entities_.find(id.value);
  return it != entities_.end() && live(it->second);
}

std::optional<PropertyValue> SceneReplica::get(EntityId id, Property p) const {
  auto it = entities_.find(id.value);
  if (it == entities_.end() || !live(it->second)) return std::nullopt;
  const auto& reg = it->second[idx(p)];
  if (std::holds_alternative<std::monostate>(reg.value)) return std::nullopt;
  return reg.value;
}

std::optional<Stamp> SceneReplica::stamp_of(EntityId id, Property p) const {
  auto it = entities_.find(id.value);
  if (it == entities_.end()) return std::nullopt;
  return it->second[idx(p)].stamp;
}

SceneDigest SceneReplica::digest() const {
  std::vector<std::uint64_t> ids;
  ids.reserve(live_count_);
  for (const auto& [id, rec] : entities_) {
    if (live(rec)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  Fnv1a h;
  for (std::uint64_t id : ids) {
    h.add(id);
    const Record& rec = entities_.at(id);
    for (std::size_t i = 0; i < kPropertyCount; ++i) {
      if (std::holds_alternative<std::monostate>(rec[i].value)) continue;
      h.add(static_cast<std::uint64_t>(i));
      hash_value(h, rec[i].value);
    }
  }
  return SceneDigest{h.value(), ids.size()};
}

}  // namespace dve
