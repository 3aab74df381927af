#include "dve/harness/config.hpp"

#include <fstream>
#include <algorithm>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) invalid(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      invalid(fmt::format("{}: unknown key '{}'", where, key));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(fmt::format("key '{}': {}", key, e.what()));
  }
}

std::string_view topology_name(Topology t) { return t == Topology::single_physics ? "A" : "B"; }
std::string_view split_name(SplitKind s) { return s == SplitKind::center ? "center" : "between_boxes"; }
std::string_view login_topology_name(LoginTopology t) {
  return t == LoginTopology::proxied ? "proxied" : "dedicated_inventory";
}

void hash_json(Fnv1a& h, const json& j) { h.add(std::string_view(j.dump())); }

}  // namespace

void GaltonExperimentConfig::validate() const {
  try {
    geometry.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (!(period_t_s > 0)) invalid("period_s must be positive");
  if (physics.capacity < 1) invalid("physics.capacity must be >= 1");
  if (physics.contention_scale < 0) invalid("physics.contention_scale must be >= 0");
  if (physics.tick.us <= 0) invalid("physics.tick_ms must be positive");
  if (!(links.latency_ms >= 0) || !(links.byte_rate > 0) || !(links.max_jitter_ms >= 0)) {
    invalid("links need latency >= 0, byte_rate > 0, jitter >= 0");
  }
  if (links.to_physics_byte_rate && !(*links.to_physics_byte_rate > 0)) invalid("to_physics_byte_rate must be > 0");
  if (!(max_clock_skew_ms >= 0)) invalid("max_clock_skew_ms must be >= 0");
  if (!(duration_cap_s > 0) || !(sample_every_s > 0)) invalid("duration_cap_s and sample_every_s must be positive");
  if (!(capacity_jitter >= 0 && capacity_jitter < 1)) invalid("capacity_jitter must be in [0, 1)");
  if (topology == Topology::two_partitions && split == SplitKind::between_boxes && geometry.boxes % 2 != 0) {
    invalid("a between-boxes split needs an even number of boxes");
  }
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
}

std::uint64_t GaltonExperimentConfig::hash() const {
  Fnv1a h;
  hash_json(h, to_json(*this));
  return h.value();
}

void LoginExperimentConfig::validate() const {
  if (folders < 0 || items < 0 || scene_objects < 0 || scene_assets < 0 || avatar_items < 0) {
    invalid("login counts must be non-negative");
  }
  const auto& c = costs;
  if (c.proxy < 0 || c.central_serve < 0 || c.inventory_serve < 0 || c.avatar < 0 || c.per_asset < 0) {
    invalid("login costs must be non-negative");
  }
  if (!(cost_unit_ms > 0)) invalid("cost_unit_ms must be positive");
  if (max_outstanding < 1) invalid("max_outstanding must be >= 1");
  if (!(run_length_s > 0)) invalid("run_length_s must be positive");
  if (repeats < 1) invalid("repeats must be >= 1");
  if (!(cost_jitter >= 0 && cost_jitter < 1)) invalid("cost_jitter must be in [0, 1)");
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
}

std::uint64_t LoginExperimentConfig::hash() const {
  Fnv1a h;
  hash_json(h, to_json(*this));
  return h.value();
}

void apply_preset(LoginExperimentConfig& cfg, InventoryPreset inventory) {
  const bool heavy = inventory == InventoryPreset::heavy;
  cfg.folders = heavy ? 8977 : 0;
  cfg.items = heavy ? 31986 : 0;
}

void apply_preset(LoginExperimentConfig& cfg, ScenePreset scene) {
  const bool heavy = scene == ScenePreset::heavy;
  cfg.scene_objects = heavy ? 238 : 2;
  cfg.scene_assets = heavy ? 1171 : 2;
}

void apply_preset(LoginExperimentConfig& cfg, AvatarPreset avatar) {
  cfg.avatar_items = avatar == AvatarPreset::heavy ? 183 : 136;
}

RegressionSpec spec_from_json(const json& j) {
  check_keys(j, "spec", {"metric", "lo", "hi", "max_cv", "k"});
  if (!j.contains("metric")) invalid("spec: missing 'metric'");
  RegressionSpec s;
  read(j, "metric", s.metric);
  read(j, "lo", s.lo);
  read(j, "hi", s.hi);
  read(j, "max_cv", s.max_cv);
  read(j, "k", s.k);
  try {
    s.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  return s;
}

std::vector<RegressionSpec> specs_from_json(const json& j) {
  const json& list = j.is_object() && j.contains("specs") ? j.at("specs") : j;
  if (!list.is_array()) invalid("specs: expected an array");
  std::vector<RegressionSpec> out;
  for (const auto& s : list) out.push_back(spec_from_json(s));
  return out;
}

json to_json(const RegressionSpec& s) {
  return json{{"metric", s.metric}, {"lo", s.lo}, {"hi", s.hi}, {"max_cv", s.max_cv}, {"k", s.k}};
}

GaltonExperimentConfig galton_config_from_json(const json& j) {
  check_keys(j, "galton config",
             {"geometry", "topology", "split", "period_s", "physics", "links", "seed", "max_clock_skew_ms",
              "duration_cap_s", "sample_every_s", "capacity_jitter", "specs"});
  GaltonExperimentConfig c;
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    check_keys(g, "geometry",
               {"n_levels", "boxes", "rows_per_box", "droppers_per_row", "balls_per_dropper", "row_offset_buckets",
                "nominal_descent_s"});
    read(g, "n_levels", c.geometry.n_levels);
    read(g, "boxes", c.geometry.boxes);
    read(g, "rows_per_box", c.geometry.rows_per_box);
    read(g, "droppers_per_row", c.geometry.droppers_per_row);
    read(g, "balls_per_dropper", c.geometry.balls_per_dropper);
    read(g, "row_offset_buckets", c.geometry.row_offset_buckets);
    read(g, "nominal_descent_s", c.geometry.nominal_descent_s);
  }
  if (j.contains("topology")) {
    const std::string t = j.at("topology").get<std::string>();
    if (t == "A") c.topology = Topology::single_physics;
    else if (t == "B") c.topology = Topology::two_partitions;
    else invalid(fmt::format("topology must be A or B, got '{}'", t));
  }
  if (j.contains("split")) {
    const std::string s = j.at("split").get<std::string>();
    if (s == "center") c.split = SplitKind::center;
    else if (s == "between_boxes") c.split = SplitKind::between_boxes;
    else invalid(fmt::format("split must be center or between_boxes, got '{}'", s));
  }
  read(j, "period_s", c.period_t_s);
  if (j.contains("physics")) {
    const json& p = j.at("physics");
    check_keys(p, "physics", {"capacity", "contention_scale", "tick_ms"});
    read(p, "capacity", c.physics.capacity);
    read(p, "contention_scale", c.physics.contention_scale);
    double tick_ms = c.physics.tick.us / 1000.0;
    read(p, "tick_ms", tick_ms);
    c.physics.tick = SimDuration::from_seconds(tick_ms / 1000.0);
  }
  if (j.contains("links")) {
    const json& l = j.at("links");
    check_keys(l, "links", {"latency_ms", "byte_rate", "max_jitter_ms", "to_physics_byte_rate"});
    read(l, "latency_ms", c.links.latency_ms);
    read(l, "byte_rate", c.links.byte_rate);
    read(l, "max_jitter_ms", c.links.max_jitter_ms);
    if (l.contains("to_physics_byte_rate") && !l.at("to_physics_byte_rate").is_null()) {
      double r = 0;
      read(l, "to_physics_byte_rate", r);
      c.links.to_physics_byte_rate = r;
    }
  }
  read(j, "seed", c.seed);
  read(j, "max_clock_skew_ms", c.max_clock_skew_ms);
  read(j, "duration_cap_s", c.duration_cap_s);
  read(j, "sample_every_s", c.sample_every_s);
  read(j, "capacity_jitter", c.capacity_jitter);
  if (j.contains("specs")) c.specs = specs_from_json(j.at("specs"));
  c.validate();
  return c;
}

json to_json(const GaltonExperimentConfig& c) {
  const auto& g = c.geometry;
  json specs = json::array();
  for (const auto& s : c.specs) specs.push_back(to_json(s));
  json links{{"latency_ms", c.links.latency_ms},
             {"byte_rate", c.links.byte_rate},
             {"max_jitter_ms", c.links.max_jitter_ms},
             {"to_physics_byte_rate", c.links.to_physics_byte_rate ? json(*c.links.to_physics_byte_rate) : json()}};
  return json{{"geometry",
               {{"n_levels", g.n_levels},
                {"boxes", g.boxes},
                {"rows_per_box", g.rows_per_box},
                {"droppers_per_row", g.droppers_per_row},
                {"balls_per_dropper", g.balls_per_dropper},
                {"row_offset_buckets", g.row_offset_buckets},
                {"nominal_descent_s", g.nominal_descent_s}}},
              {"topology", topology_name(c.topology)},
              {"split", split_name(c.split)},
              {"period_s", c.period_t_s},
              {"physics",
               {{"capacity", c.physics.capacity},
                {"contention_scale", c.physics.contention_scale},
                {"tick_ms", c.physics.tick.us / 1000.0}}},
              {"links", links},
              {"seed", c.seed},
              {"max_clock_skew_ms", c.max_clock_skew_ms},
              {"duration_cap_s", c.duration_cap_s},
              {"sample_every_s", c.sample_every_s},
              {"capacity_jitter", c.capacity_jitter},
              {"specs", specs}};
}

LoginExperimentConfig login_config_from_json(const json& j) {
  check_keys(j, "login config",
             {"topology", "inventory", "scene", "avatar", "costs", "cost_unit_ms", "max_outstanding", "run_length_s",
              "repeats", "seed", "cost_jitter", "specs"});
  LoginExperimentConfig c;
  if (j.contains("topology")) {
    const std::string t = j.at("topology").get<std::string>();
    if (t == "proxied") c.topology = LoginTopology::proxied;
    else if (t == "dedicated_inventory") c.topology = LoginTopology::dedicated_inventory;
    else invalid(fmt::format("topology must be proxied or dedicated_inventory, got '{}'", t));
  }
  auto preset_or = [&](const char* key, auto on_name, auto on_object) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_string()) {
      const std::string name = v.get<std::string>();
      if (name != "light" && name != "heavy") invalid(fmt::format("{}: preset must be light or heavy", key));
      on_name(name == "heavy");
    } else {
      on_object(v);
    }
  };
  preset_or(
      "inventory", [&](bool heavy) { apply_preset(c, heavy ? InventoryPreset::heavy : InventoryPreset::light); },
      [&](const json& v) {
        check_keys(v, "inventory", {"folders", "items"});
        read(v, "folders", c.folders);
        read(v, "items", c.items);
      });
  preset_or(
      "scene", [&](bool heavy) { apply_preset(c, heavy ? ScenePreset::heavy : ScenePreset::light); },
      [&](const json& v) {
        check_keys(v, "scene", {"objects", "assets"});
        read(v, "objects", c.scene_objects);
        read(v, "assets", c.scene_assets);
      });
  preset_or(
      "avatar", [&](bool heavy) { apply_preset(c, heavy ? AvatarPreset::heavy : AvatarPreset::light); },
      [&](const json& v) {
        check_keys(v, "avatar", {"items"});
        read(v, "items", c.avatar_items);
      });
  if (j.contains("costs")) {
    const json& k = j.at("costs");
    check_keys(k, "costs", {"proxy", "central_serve", "inventory_serve", "avatar", "per_asset"});
    read(k, "proxy", c.costs.proxy);
    read(k, "central_serve", c.costs.central_serve);
    read(k, "inventory_serve", c.costs.inventory_serve);
    read(k, "avatar", c.costs.avatar);
    read(k, "per_asset", c.costs.per_asset);
  }
  read(j, "cost_unit_ms", c.cost_unit_ms);
  read(j, "max_outstanding", c.max_outstanding);
  read(j, "run_length_s", c.run_length_s);
  read(j, "repeats", c.repeats);
  read(j, "seed", c.seed);
  read(j, "cost_jitter", c.cost_jitter);
  if (j.contains("specs")) c.specs = specs_from_json(j.at("specs"));
  c.validate();
  return c;
}

json to_json(const LoginExperimentConfig& c) {
  json specs = json::array();
  for (const auto& s : c.specs) specs.push_back(to_json(s));
  return json{{"topology", login_topology_name(c.topology)},
              {"inventory", {{"folders", c.folders}, {"items", c.items}}},
              {"scene", {{"objects", c.scene_objects}, {"assets", c.scene_assets}}},
              {"avatar", {{"items", c.avatar_items}}},
              {"costs",
               {{"proxy", c.costs.proxy},
                {"central_serve", c.costs.central_serve},
                {"inventory_serve", c.costs.inventory_serve},
                {"avatar", c.costs.avatar},
                {"per_asset", c.costs.per_asset}}},
              {"cost_unit_ms", c.cost_unit_ms},
              {"max_outstanding", c.max_outstanding},
              {"run_length_s", c.run_length_s},
              {"repeats", c.repeats},
              {"seed", c.seed},
              {"cost_jitter", c.cost_jitter},
              {"specs", specs}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace dve
