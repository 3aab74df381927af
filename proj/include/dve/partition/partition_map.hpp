#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dve/engine/sim_time.hpp"

namespace dve {

struct Vec2 {
  double x = 0, y = 0;
  bool operator==(const Vec2&) const = default;
};

struct PartitionId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const PartitionId&) const = default;
};

struct RegionSpec {
  double width = 256.0;
  double depth = 256.0;
  double microcell_size = 16.0;

  /// Throws InvalidParameter unless width and depth are positive multiples of the cell size.
  void validate() const;
  std::int32_t cells_x() const;
  std::int32_t cells_y() const;
};

struct Microcell {
  std::int32_t i = 0;
  std::int32_t j = 0;
  constexpr auto operator<=>(const Microcell&) const = default;
};

/// Half-open rectangle of microcells [i0, i1) x [j0, j1) assigned to one partition.
struct CellRect {
  std::int32_t i0 = 0, j0 = 0, i1 = 0, j1 = 0;
  PartitionId partition;
};

struct Crossing {
  PartitionId from;
  PartitionId to;
  bool operator==(const Crossing&) const = default;
};

/// Immutable assignment of every microcell in a region to a partition, and of
/// each partition to the physics node that simulates it.
class PartitionMap {
 public:
  /// Throws ConfigInvalid if the rectangles overlap, leave gaps, or fall outside
  /// the grid, or if a referenced partition has no owner.
  PartitionMap(RegionSpec region, const std::vector<CellRect>& layout, std::map<PartitionId, NodeId> owners);

  /// Everything in one partition.
  static PartitionMap single(RegionSpec region, PartitionId p, NodeId owner);
  /// Two partitions split by a vertical line at cell column `split_i` (x = split_i * cell).
  static PartitionMap split_x(RegionSpec region, std::int32_t split_i, NodeId west_owner, NodeId east_owner);
  /// Two partitions split by a horizontal line at cell row `split_j`.
  static PartitionMap split_y(RegionSpec region, std::int32_t split_j, NodeId south_owner, NodeId north_owner);

  /// Throws OutOfRegion for points outside [0, width) x [0, depth).
  Microcell cell_of(Vec2 p) const;
  bool contains(Vec2 p) const;
  PartitionId owner_of(Vec2 p) const;
  PartitionId owner_of(Microcell c) const;
  NodeId node_of(PartitionId p) const;
  std::optional<Crossing> detect_crossing(Vec2 prev, Vec2 next) const;

  /// True if the point's microcell, or one of its 8 neighbours, belongs to `p`.
  bool in_interest(PartitionId p, Vec2 point) const;

  const RegionSpec& region() const { return region_; }
  const std::map<PartitionId, NodeId>& owners() const { return owners_; }
  std::vector<PartitionId> partitions() const;

 private:
  std::size_t index(Microcell c) const {
    return static_cast<std::size_t>(c.j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(c.i);
  }

  RegionSpec region_;
  std::int32_t nx_ = 0, ny_ = 0;
  std::vector<PartitionId> assignment_;
  std::vector<std::uint64_t> interest_mask_;  // bit k set: partition with ordinal k is interested
  std::map<PartitionId, NodeId> owners_;
  std::map<PartitionId, std::uint32_t> ordinal_;
};

}  // namespace dve
