#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dve/actors/galton.hpp"
#include "dve/actors/physics_actor.hpp"
#include "dve/netsim/network.hpp"
#include "dve/stats/regression.hpp"

namespace dve {

enum class Topology : std::uint8_t { single_physics, two_partitions };
/// Where topology B draws the partition border: through the middle of every
/// board (x = 128, one dropper row west, two east) or between box 1 and box 2.
enum class SplitKind : std::uint8_t { center, between_boxes };

struct LinkDefaults {
  double latency_ms = 1.0;
  double byte_rate = 12.5e6;
  double max_jitter_ms = 0.0;
  /// Byte rate of dispatcher -> physics links when set.
  std::optional<double> to_physics_byte_rate;
};

struct GaltonExperimentConfig {
  GaltonGeometry geometry;
  Topology topology = Topology::single_physics;
  SplitKind split = SplitKind::center;
  double period_t_s = 6.0;
  PhysicsParams physics;
  LinkDefaults links;
  MessageSizes sizes;
  std::uint64_t seed = 1;
  double max_clock_skew_ms = 50.0;
  double duration_cap_s = 6 * 3600.0;
  double sample_every_s = 10.0;
  /// Injected defect: each run scales physics capacity by 1 - j or 1 + j,
  /// chosen per seed. 0 disables it.
  double capacity_jitter = 0.0;
  std::vector<RegressionSpec> specs;

  /// Throws ConfigInvalid.
  void validate() const;
  std::uint64_t hash() const;
};

enum class LoginTopology : std::uint8_t { proxied, dedicated_inventory };

struct LoginCosts {
  double proxy = 1.0;
  double central_serve = 0.5;
  double inventory_serve = 0.5;
  double avatar = 10.0;  // for an avatar wearing kAvatarReferenceItems items
  double per_asset = 0.2;
};

struct LoginExperimentConfig {
  LoginTopology topology = LoginTopology::proxied;
  int folders = 0;
  int items = 0;
  int scene_objects = 2;
  int scene_assets = 2;
  /// Items worn by the avatar; the avatar cost scales linearly with it.
  int avatar_items = 136;
  LoginCosts costs;
  double cost_unit_ms = 10.0;  // processing time per cost unit
  int max_outstanding = 8;     // client request window
  double run_length_s = 600.0;
  int repeats = 5;
  std::uint64_t seed = 1;
  /// Uniform relative noise on every cost, per request. 0 keeps the model deterministic.
  double cost_jitter = 0.0;
  std::vector<RegressionSpec> specs;

  void validate() const;
  std::uint64_t hash() const;
};

inline constexpr int kAvatarReferenceItems = 136;

/// Inventory and scene presets from the login study.
enum class InventoryPreset : std::uint8_t { light, heavy };
enum class ScenePreset : std::uint8_t { light, heavy };
enum class AvatarPreset : std::uint8_t { light, heavy };
void apply_preset(LoginExperimentConfig& cfg, InventoryPreset inventory);
void apply_preset(LoginExperimentConfig& cfg, ScenePreset scene);
void apply_preset(LoginExperimentConfig& cfg, AvatarPreset avatar);

GaltonExperimentConfig galton_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GaltonExperimentConfig& cfg);
LoginExperimentConfig login_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LoginExperimentConfig& cfg);
std::vector<RegressionSpec> specs_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RegressionSpec& spec);

/// Reads a JSON file; throws IoFailure or ConfigInvalid.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace dve
