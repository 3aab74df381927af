#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "dve/engine/random_stream.hpp"
#include "dve/error.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve::testing {

inline Stamp stamp_at(std::int64_t ts, std::uint32_t origin, std::uint64_t seq) {
  return Stamp{Timestamp{ts}, NodeId{origin}, seq};
}

struct Workload {
  std::vector<PropertyUpdate> updates;
};

/// Random update set: up to 10 entities, up to 200 updates, clashing timestamps
/// from several origins, with at least one create per touched entity.
inline Workload random_workload(RandomStream& r) {
  Workload w;
  const int entities = 1 + static_cast<int>(r.uniform() * 10);
  const int count = 1 + static_cast<int>(r.uniform() * 200);
  std::uint64_t seq[5] = {};
  for (int e = 1; e <= entities; ++e) {
    const auto origin = static_cast<std::uint32_t>(1 + r.uniform() * 4);
    w.updates.push_back(PropertyUpdate{EntityId{static_cast<std::uint64_t>(e)}, UpdateKind::create,
                                       {{Property::position, Vec3{r.uniform(), 0, 0}}},
                                       stamp_at(static_cast<std::int64_t>(r.uniform() * 20), origin, seq[origin]++)});
  }
  while (static_cast<int>(w.updates.size()) < count) {
    const auto id = static_cast<std::uint64_t>(1 + r.uniform() * entities);
    const auto origin = static_cast<std::uint32_t>(1 + r.uniform() * 4);
    const Stamp s = stamp_at(static_cast<std::int64_t>(r.uniform() * 20), origin, seq[origin]++);
    const double k = r.uniform();
    if (k < 0.1) {
      w.updates.push_back(PropertyUpdate{EntityId{id}, UpdateKind::remove, {}, s});
    } else if (k < 0.2) {
      w.updates.push_back(PropertyUpdate{EntityId{id}, UpdateKind::create, {{Property::tag, std::int64_t{origin}}}, s});
    } else if (k < 0.6) {
      w.updates.push_back(PropertyUpdate{EntityId{id}, UpdateKind::set, {{Property::position, Vec3{r.uniform(), 1, 2}}}, s});
    } else {
      w.updates.push_back(PropertyUpdate{EntityId{id}, UpdateKind::set, {{Property::velocity, r.uniform()}}, s});
    }
  }
  return w;
}

/// Delivers the updates in a random order with random duplicates. Updates for
/// an entity the replica has not heard of yet are held back and retried, as a
/// receiver would buffer them until the creation arrives.
inline std::pair<SceneReplica, bool> deliver(const Workload& w, RandomStream& r) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < w.updates.size(); ++i) {
    order.push_back(i);
    while (r.uniform() < 0.3) order.push_back(i);
  }
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(r.uniform() * i)]);

  SceneReplica rep;
  std::deque<std::size_t> held;
  auto try_apply = [&](std::size_t i) {
    try {
      rep.apply_update(w.updates[i]);
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownEntity) throw;
      return false;
    }
  };
  for (std::size_t i : order) {
    if (!try_apply(i)) {
      held.push_back(i);
      continue;
    }
    for (std::size_t n = held.size(); n > 0; --n) {
      const std::size_t j = held.front();
      held.pop_front();
      if (!try_apply(j)) held.push_back(j);
    }
  }
  return {std::move(rep), held.empty()};
}

}  // namespace dve::testing

