#pragma once

#include <cstdint>
#include <optional>

#include "dve/engine/random_stream.hpp"
#include "dve/engine/sim_time.hpp"
#include "dve/partition/partition_map.hpp"
#include "dve/scene/scene_replica.hpp"

namespace dve {

/// Pegboard layout shared by every box in the experiment.
///
/// Boxes are stacked along y, each in its own band of the region; every board
/// lies in an x-z plane centred on `center_x`. Dropper rows sit side by side in
/// x, `row_offset_buckets` buckets apart, so rows shift their binomial humps
/// and the combined floor has (n_levels + 1) + (rows - 1) * offset buckets.
struct GaltonGeometry {
  int n_levels = 93;
  int boxes = 4;
  int rows_per_box = 3;
  int droppers_per_row = 9;
  int balls_per_dropper = 350;
  int row_offset_buckets = 1;
  double nominal_descent_s = 124.82;

  double bucket_width_m = 2.0;
  double center_x = 128.0;
  double dropper_margin_m = 16.0;
  double dropper_spacing_m = 3.0;
  double top_z_m = 100.0;
  RegionSpec region;

  int bucket_count() const { return (n_levels + 1) + (rows_per_box - 1) * row_offset_buckets; }
  int droppers() const { return boxes * rows_per_box * droppers_per_row; }
  std::int64_t total_balls() const { return static_cast<std::int64_t>(droppers()) * balls_per_dropper; }
  SimDuration nominal_descent() const { return SimDuration::from_seconds(nominal_descent_s); }

  /// Throws InvalidParameter on non-positive counts or a layout that leaves the region.
  void validate() const;
  std::uint64_t hash() const;

  /// Horizontal position of a ball of `row` at signed half-bucket displacement `column`.
  double x_of(int row, int column) const;
  double y_of(int box, int dropper) const;
  Vec2 position(int box, int row, int dropper, int column) const { return {x_of(row, column), y_of(box, dropper)}; }
  double z_of(int level) const;

  /// Floor bucket for a ball that finished its descent, or nullopt when it
  /// lands outside the bins.
  std::optional<int> bucket_of(int row, int column) const;
};

enum class BallState : std::uint8_t { falling, collected, discarded };

struct Ball {
  EntityId id;
  std::uint16_t box = 0;
  std::uint16_t row = 0;
  std::uint16_t dropper = 0;
  int level = 0;
  int column = 0;
  SimTime created_at;
  SimDuration fall;  // simulated fall time accumulated by physics steps
  RandomStream stream;
  BallState state = BallState::falling;

  Vec2 position(const GaltonGeometry& g) const { return g.position(box, row, dropper, column); }
};

/// One peg: left when the draw is below one half, right otherwise.
void descend_with_draw(Ball& ball, double draw);
/// Draws from the ball's own stream, so a ball's path does not depend on
/// which simulator steps it.
void descend_one_level(Ball& ball);

/// Levels a ball has passed after `fall` of simulated fall time (capped at n).
int level_after(const GaltonGeometry& g, SimDuration fall);

}  // namespace dve
