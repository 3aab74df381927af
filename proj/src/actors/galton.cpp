#include "dve/actors/galton.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

void GaltonGeometry::validate() const {
  if (n_levels < 1 || boxes < 1 || rows_per_box < 1 || droppers_per_row < 1 || balls_per_dropper < 0 ||
      row_offset_buckets < 0) {
    throw Error(ErrorCode::InvalidParameter, "galton counts must be positive");
  }
  if (!(nominal_descent_s > 0) || !(bucket_width_m > 0) || dropper_spacing_m < 0) {
    throw Error(ErrorCode::InvalidParameter, "galton lengths must be positive");
  }
  region.validate();
  const int max_col = n_levels;
  const double lo = x_of(0, -max_col);
  const double hi = x_of(rows_per_box - 1, max_col);
  if (lo < 0 || hi >= region.width) {
    throw Error(ErrorCode::InvalidParameter, fmt::format("board spans x [{}, {}] outside region", lo, hi));
  }
  const double band = region.depth / boxes;
  if (dropper_margin_m + (droppers_per_row - 1) * dropper_spacing_m >= band) {
    throw Error(ErrorCode::InvalidParameter, "droppers do not fit in the box band");
  }
}

std::uint64_t GaltonGeometry::hash() const {
  Fnv1a h;
  for (int v : {n_levels, boxes, rows_per_box, droppers_per_row, balls_per_dropper, row_offset_buckets}) {
    h.add(static_cast<std::int64_t>(v));
  }
  for (double v : {nominal_descent_s, bucket_width_m, center_x, dropper_margin_m, dropper_spacing_m, top_z_m,
                   region.width, region.depth, region.microcell_size}) {
    h.add(v);
  }
  return h.value();
}

double GaltonGeometry::x_of(int row, int column) const {
  const double row_shift = (row - (rows_per_box - 1) / 2.0) * row_offset_buckets * bucket_width_m;
  return center_x + row_shift + column * (bucket_width_m / 2.0);
}

double GaltonGeometry::y_of(int box, int dropper) const {
  const double band = region.depth / boxes;
  return box * band + dropper_margin_m + dropper * dropper_spacing_m;
}

double GaltonGeometry::z_of(int level) const { return top_z_m * (1.0 - static_cast<double>(level) / n_levels); }

std::optional<int> GaltonGeometry::bucket_of(int row, int column) const {
  // column has the parity of n_levels, so column + n is even
  const int b = (column + n_levels) / 2 + row * row_offset_buckets;
  if (b < 0 || b >= bucket_count()) return std::nullopt;
  return b;
}

void descend_with_draw(Ball& ball, double draw) {
  ball.column += draw < 0.5 ? -1 : 1;
  ++ball.level;
}

void descend_one_level(Ball& ball) { descend_with_draw(ball, ball.stream.uniform()); }

int level_after(const GaltonGeometry& g, SimDuration fall) {
  const std::int64_t nominal = g.nominal_descent().us;
  if (fall.us >= nominal) return g.n_levels;
  // fall < nominal here, so the product stays far below the int64 range.
  return static_cast<int>(fall.us * g.n_levels / nominal);
}

}  // namespace dve
