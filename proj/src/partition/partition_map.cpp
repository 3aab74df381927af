#include "dve/partition/partition_map.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

namespace {

bool is_multiple(double total, double cell) {
  const double n = total / cell;
  return n >= 1.0 && std::abs(n - std::round(n)) < 1e-9;
}

}  // namespace

void RegionSpec::validate() const {
  if (!(microcell_size > 0) || !is_multiple(width, microcell_size) || !is_multiple(depth, microcell_size)) {
    throw Error(ErrorCode::InvalidParameter,
                fmt::format("region {}x{} is not a positive multiple of cell size {}", width, depth, microcell_size));
  }
}

std::int32_t RegionSpec::cells_x() const { return static_cast<std::int32_t>(std::lround(width / microcell_size)); }
std::int32_t RegionSpec::cells_y() const { return static_cast<std::int32_t>(std::lround(depth / microcell_size)); }

PartitionMap::PartitionMap(RegionSpec region, const std::vector<CellRect>& layout,
                           std::map<PartitionId, NodeId> owners)
    : region_(region), owners_(std::move(owners)) {
  region_.validate();
  nx_ = region_.cells_x();
  ny_ = region_.cells_y();
  const std::size_t n = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  std::vector<bool> seen(n, false);
  assignment_.assign(n, PartitionId{});
  for (const auto& r : layout) {
    if (r.i0 < 0 || r.j0 < 0 || r.i1 > nx_ || r.j1 > ny_ || r.i0 >= r.i1 || r.j0 >= r.j1) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("cell rectangle [{},{})x[{},{}) outside {}x{} grid", r.i0,
                                                        r.i1, r.j0, r.j1, nx_, ny_));
    }
    if (!owners_.contains(r.partition)) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("partition {} has no owning node", r.partition.value));
    }
    for (std::int32_t j = r.j0; j < r.j1; ++j) {
      for (std::int32_t i = r.i0; i < r.i1; ++i) {
        const auto k = index({i, j});
        if (seen[k]) throw Error(ErrorCode::ConfigInvalid, fmt::format("microcell ({},{}) assigned twice", i, j));
        seen[k] = true;
        assignment_[k] = r.partition;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!seen[k]) {
      throw Error(ErrorCode::ConfigInvalid,
                  fmt::format("microcell ({},{}) unassigned", static_cast<std::int64_t>(k) % nx_,
                              static_cast<std::int64_t>(k) / nx_));
    }
  }
  if (owners_.size() > 64) throw Error(ErrorCode::ConfigInvalid, "at most 64 partitions supported");
  std::uint32_t ord = 0;
  for (const auto& [p, node] : owners_) ordinal_[p] = ord++;

  interest_mask_.assign(n, 0);
  for (std::int32_t j = 0; j < ny_; ++j) {
    for (std::int32_t i = 0; i < nx_; ++i) {
      std::uint64_t mask = 0;
      for (std::int32_t dj = -1; dj <= 1; ++dj) {
        for (std::int32_t di = -1; di <= 1; ++di) {
          const std::int32_t ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
          mask |= std::uint64_t{1} << ordinal_.at(assignment_[index({ii, jj})]);
        }
      }
      interest_mask_[index({i, j})] = mask;
    }
  }
}

PartitionMap PartitionMap::single(RegionSpec region, PartitionId p, NodeId owner) {
  region.validate();
  return PartitionMap(region, {CellRect{0, 0, region.cells_x(), region.cells_y(), p}}, {{p, owner}});
}

PartitionMap PartitionMap::split_x(RegionSpec region, std::int32_t split_i, NodeId west_owner, NodeId east_owner) {
  region.validate();
  const PartitionId west{1}, east{2};
  return PartitionMap(region,
                      {CellRect{0, 0, split_i, region.cells_y(), west},
                       CellRect{split_i, 0, region.cells_x(), region.cells_y(), east}},
                      {{west, west_owner}, {east, east_owner}});
}

PartitionMap PartitionMap::split_y(RegionSpec region, std::int32_t split_j, NodeId south_owner, NodeId north_owner) {
  region.validate();
  const PartitionId south{1}, north{2};
  return PartitionMap(region,
                      {CellRect{0, 0, region.cells_x(), split_j, south},
                       CellRect{0, split_j, region.cells_x(), region.cells_y(), north}},
                      {{south, south_owner}, {north, north_owner}});
}

bool PartitionMap::contains(Vec2 p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x < region_.width && p.y < region_.depth;
}

Microcell PartitionMap::cell_of(Vec2 p) const {
  if (!contains(p)) {
    throw Error(ErrorCode::OutOfRegion, fmt::format("point ({}, {}) outside region", p.x, p.y));
  }
  return Microcell{static_cast<std::int32_t>(std::floor(p.x / region_.microcell_size)),
                   static_cast<std::int32_t>(std::floor(p.y / region_.microcell_size))};
}

PartitionId PartitionMap::owner_of(Vec2 p) const { return owner_of(cell_of(p)); }

PartitionId PartitionMap::owner_of(Microcell c) const { return assignment_.at(index(c)); }

NodeId PartitionMap::node_of(PartitionId p) const {
  auto it = owners_.find(p);
  if (it == owners_.end()) throw Error(ErrorCode::ConfigInvalid, fmt::format("unknown partition {}", p.value));
  return it->second;
}

std::optional<Crossing> PartitionMap::detect_crossing(Vec2 prev, Vec2 next) const {
  const PartitionId a = owner_of(prev);
  const PartitionId b = owner_of(next);
  if (a == b) return std::nullopt;
  return Crossing{a, b};
}

bool PartitionMap::in_interest(PartitionId p, Vec2 point) const {
  auto it = ordinal_.find(p);
  if (it == ordinal_.end()) return false;
  return (interest_mask_[index(cell_of(point))] >> it->second) & 1U;
}

std::vector<PartitionId> PartitionMap::partitions() const {
  std::vector<PartitionId> out;
  for (const auto& [p, n] : owners_) out.push_back(p);
  return out;
}

}  // namespace dve
