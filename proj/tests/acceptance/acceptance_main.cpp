// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dve/error.hpp"
#include "dve/harness/config.hpp"
#include "dve/harness/galton_experiment.hpp"
#include "dve/harness/login_experiment.hpp"
#include "dve/harness/rate_search.hpp"
#include "dve/harness/report_io.hpp"
#include "dve/stats/descriptive.hpp"
#include "dve/stats/distribution.hpp"
#include "dve/stats/regression.hpp"
#include "lww_workload.hpp"

using namespace dve;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Scenario parameters. Stable: one physics node keeps up with the default drop
// period. Overload: inflow is about 1.6x what 1400 steps per tick can clear.
constexpr int kStableCapacity = 6000;
constexpr int kOverloadCapacity = 1400;
constexpr double kOverloadCapS = 2100.0;  // the creation window at t = 6 s
constexpr double kMaskingLinkRate = 256000.0;
constexpr double kBinS = 300.0;
constexpr int kRegressionCapacity = 4600;

GaltonExperimentConfig stable_a(std::uint64_t seed = 1) {
  GaltonExperimentConfig c;
  c.physics.capacity = kStableCapacity;
  c.seed = seed;
  return c;
}

GaltonExperimentConfig overload_a() {
  GaltonExperimentConfig c = stable_a();
  c.physics.capacity = kOverloadCapacity;
  c.duration_cap_s = kOverloadCapS;
  return c;
}

GaltonExperimentConfig masking_b() {
  GaltonExperimentConfig c = overload_a();
  c.topology = Topology::two_partitions;
  c.split = SplitKind::center;
  c.links.to_physics_byte_rate = kMaskingLinkRate;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentReport timed_run(const std::string& label, const GaltonExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r = run_galton(c);
  std::fprintf(stderr, "  [%s] %.1f s wall, end %.0f s sim\n", label.c_str(), seconds_since(t0), r.end_time_s);
  return r;
}

/// Bin means over full bins after the first; the first bin is warm-up and a
/// trailing partial bin is dropped.
std::vector<double> bin_means(const std::vector<std::pair<double, double>>& points, double end_s) {
  std::map<int, std::pair<double, int>> bins;
  for (const auto& [t, v] : points) {
    auto& b = bins[static_cast<int>(std::floor(t / kBinS))];
    b.first += v;
    b.second += 1;
  }
  std::vector<double> out;
  for (const auto& [k, b] : bins) {
    if (k == 0 || (k + 1) * kBinS > end_s) continue;
    out.push_back(b.first / b.second);
  }
  return out;
}

bool convex_increasing(const std::vector<double>& s) {
  if (s.size() < 3) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) return false;
  }
  for (std::size_t i = 2; i < s.size(); ++i) {
    if (s[i] - 2 * s[i - 1] + s[i - 2] < 0) return false;
  }
  return true;
}

std::string series(const std::vector<double>& s) { return fmt::format("[{:.1f}]", fmt::join(s, " ")); }

std::vector<std::pair<double, double>> balls_in_scene(const ExperimentReport& r) {
  std::map<double, double> by_time;
  for (const auto& s : r.node_series) {
    for (const auto& n : r.nodes) {
      if (n.id == s.node && n.role == NodeRole::physics) by_time[s.t_s] += static_cast<double>(s.balls_in_scene);
    }
  }
  return {by_time.begin(), by_time.end()};
}

// --- criteria -------------------------------------------------------------

/// RMSE of 100 simulated floors drawn by an independent sampler: each ball's
/// bucket is its row offset plus the number of right turns in 93 fair coin
/// flips, taken as the popcount of 93 random bits.
std::vector<double> monte_carlo_rmse(const GaltonGeometry& g, int seeds) {
  const auto expected = theoretical_distribution(g).expected;
  std::vector<double> out;
  for (int s = 1; s <= seeds; ++s) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(s));
    std::vector<double> counts(expected.size(), 0.0);
    for (int box = 0; box < g.boxes; ++box) {
      for (int row = 0; row < g.rows_per_box; ++row) {
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(g.droppers_per_row) * g.balls_per_dropper; ++b) {
          int rights = 0;
          for (int left = g.n_levels; left > 0; left -= 64) {
            const std::uint64_t bits = rng();
            rights += std::popcount(left >= 64 ? bits : bits & ((std::uint64_t{1} << left) - 1));
          }
          counts[static_cast<std::size_t>(rights + row * g.row_offset_buckets)] += 1;
        }
      }
    }
    out.push_back(rmse(counts, expected));
  }
  return out;
}

Outcome distribution(const ExperimentReport& r) {
  auto mc = monte_carlo_rmse(GaltonGeometry{}, 100);
  std::sort(mc.begin(), mc.end());
  const double p99 = mc[98];
  const double observed = r.metric("rmse_theoretical");
  const bool ok = r.histogram.counts.size() == 96 && r.histogram.total() + r.discarded == 37800 && observed < p99;
  return {ok, fmt::format("buckets {}, sum {} + discarded {}, rmse {:.3f} vs envelope p99 {:.3f} (median {:.3f})",
                          r.histogram.counts.size(), r.histogram.total(), r.discarded, observed, p99, mc[49])};
}

Outcome interval_baseline(const ExperimentReport& r) {
  const double m = r.metric("interval_mean_s");
  return {std::fabs(m - 124.82) <= 1.42, fmt::format("mean interval {:.3f} s (window 124.82 +/- 1.42)", m)};
}

Outcome divergence(const ExperimentReport& r) {
  const auto balls = bin_means(balls_in_scene(r), r.end_time_s);
  std::vector<std::pair<double, double>> intervals;
  for (const auto& f : r.finished) {
    if (f.collected) intervals.emplace_back(f.t_s, f.interval_s);
  }
  const auto iv = bin_means(intervals, r.end_time_s);
  const bool under_cap = r.end_time_s <= kOverloadCapS;
  const bool ok = convex_increasing(balls) && convex_increasing(iv) && under_cap;
  return {ok, fmt::format("{:.0f} s bins, balls {} intervals {}, ended at {:.0f} s", kBinS, series(balls), series(iv),
                          r.end_time_s)};
}

Outcome masking(const ExperimentReport& b, const ExperimentReport& stable) {
  std::map<double, double> depth;
  for (const auto& q : b.queue_series) {
    const auto& l = b.links.at(q.link);
    if (l.to.value >= 10 && l.from.value == 2) depth[q.t_s] += static_cast<double>(q.depth);
  }
  std::vector<double> d;
  for (const auto& [t, v] : depth) d.push_back(v);
  const TrendTest mk = mann_kendall(d);
  const double peak = b.metric("peak_balls_in_scene");
  const double stable_peak = stable.metric("peak_balls_in_scene");
  const bool ok = mk.z >= 1.96 && peak < 1.5 * stable_peak;
  return {ok, fmt::format("dispatcher->physics depth {:.0f} -> {:.0f}, Mann-Kendall z {:.2f}; peak balls {:.0f} < 1.5 x {:.0f}",
                          d.empty() ? 0.0 : d.front(), d.empty() ? 0.0 : d.back(), mk.z, peak, stable_peak)};
}

Outcome scalability() {
  constexpr double t_lo = 0.5, t_hi = 6.0;
  constexpr int iterations = 10;
  const auto search = [&](const std::string& label, GaltonExperimentConfig c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = max_sustainable_rate(c, t_lo, t_hi, iterations);
    std::fprintf(stderr, "  [search %s] t* = %.4f s, %zu runs, %.1f s wall\n", label.c_str(), r.t_star_s, r.steps.size(),
                 seconds_since(t0));
    return r.t_star_s;
  };
  const double a = search("A", stable_a());
  GaltonExperimentConfig center = stable_a();
  center.topology = Topology::two_partitions;
  center.split = SplitKind::center;
  const double bc = search("B center", center);
  GaltonExperimentConfig between = center;
  between.split = SplitKind::between_boxes;
  const double bb = search("B between boxes", between);
  const bool ok = bc < a && bb <= 0.575 * a;
  return {ok, fmt::format("t*_A {:.4f} s, t*_B center {:.4f} s, t*_B between boxes {:.4f} s (bound {:.4f})", a, bc, bb,
                          0.575 * a)};
}

Outcome lww_convergence() {
  RandomStream r(4242, "acceptance-lww");
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w = testing::random_workload(r);
    const auto [a, a_done] = testing::deliver(w, r);
    const auto [b, b_done] = testing::deliver(w, r);
    // In-order, exactly-once delivery is the reference schedule.
    SceneReplica ref;
    for (const auto& u : w.updates) ref.apply_update(u);
    // Applying everything a second time must change nothing.
    SceneReplica twice = ref;
    for (const auto& u : w.updates) twice.apply_update(u);
    if (!a_done || !b_done || a.digest() != b.digest() || a.digest() != ref.digest() || twice.digest() != ref.digest()) {
      ++failures;
    }
  }
  return {failures == 0, fmt::format("1000 random schedules, {} divergent", failures)};
}

Outcome conservation(const std::vector<const ExperimentReport*>& runs) {
  std::uint64_t checks = 0, violations = 0, exclusive = 0, ownership = 0, migrations = 0;
  for (const auto* r : runs) {
    checks += r->conservation_checks;
    violations += r->conservation_violations;
    exclusive += static_cast<std::uint64_t>(r->metric("exclusive_ownership_violations"));
    ownership += static_cast<std::uint64_t>(r->metric("ownership_violations"));
    migrations += static_cast<std::uint64_t>(r->metric("migrations"));
  }
  const bool ok = checks > 0 && violations == 0 && exclusive == 0 && ownership == 0 && migrations >= 10000;
  return {ok, fmt::format("{} runs, {} tick audits, {} violations; {} migrations, {} owner audit failures", runs.size(),
                          checks, violations, migrations, exclusive + ownership)};
}

Outcome login_topology() {
  const auto sim_load = [](LoginTopology t, InventoryPreset p) {
    LoginExperimentConfig c;
    c.topology = t;
    apply_preset(c, p);
    const auto r = run_login(c);
    return std::make_pair(r.summary("sim_processing_s").mean, r.summary("sim_inventory_requests").mean);
  };
  const auto [pl, pl_req] = sim_load(LoginTopology::proxied, InventoryPreset::light);
  const auto [ph, ph_req] = sim_load(LoginTopology::proxied, InventoryPreset::heavy);
  const auto [dl, dl_req] = sim_load(LoginTopology::dedicated_inventory, InventoryPreset::light);
  const auto [dh, dh_req] = sim_load(LoginTopology::dedicated_inventory, InventoryPreset::heavy);
  const bool ok = ph >= 10 * pl && std::fabs(dh - dl) <= 0.05 * dl && ph_req == 8977;
  return {ok, fmt::format("sim processing proxied {:.2f}/{:.2f} s (light/heavy, {:.1f}x), dedicated {:.2f}/{:.2f} s; "
                          "heavy proxied inventory requests {:.0f}",
                          pl, ph, ph / pl, dl, dh, ph_req)};
}

Outcome regression_harness() {
  const RegressionSpec spec{"interval_mean_s", 123.40, 126.24, 0.05, 5};
  const auto samples = [&](double jitter) {
    std::vector<double> v;
    double peak = 0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
      GaltonExperimentConfig c = stable_a(s);
      c.physics.capacity = kRegressionCapacity;
      c.capacity_jitter = jitter;
      const auto r = timed_run(fmt::format("regression seed {} jitter {}", s, jitter), c);
      v.push_back(r.metric("interval_mean_s"));
      peak = std::max(peak, r.metric("peak_load_proxy"));
    }
    return std::make_pair(v, peak);
  };
  const auto [clean, clean_peak] = samples(0.0);
  const auto [jittered, jittered_peak] = samples(0.5);
  const Verdict ok_run = check_regression(clean, spec);
  const Verdict bad_run = check_regression(jittered, spec);
  const bool ok = clean_peak < kStressedLoadProxy && ok_run.pass && !bad_run.pass;
  return {ok, fmt::format("clean mean {:.3f} cv {:.4f} -> {}; jittered mean {:.3f} cv {:.4f} -> {} ({})", ok_run.mean,
                          ok_run.cv, ok_run.pass ? "pass" : "fail", bad_run.mean, bad_run.cv,
                          bad_run.pass ? "pass" : "fail", bad_run.reason)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::vector<std::pair<const ExperimentReport*, GaltonExperimentConfig>>& runs) {
  const fs::path root = fs::temp_directory_path() / "dve_acceptance_exports";
  fs::remove_all(root);
  int files = 0, differing = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path first = root / fmt::format("run{}a", i), second = root / fmt::format("run{}b", i);
    export_report(*runs[i].first, first);
    export_report(timed_run(fmt::format("repeat {}", i), runs[i].second), second);
    for (const auto& e : fs::directory_iterator(first)) {
      ++files;
      if (slurp(e.path()) != slurp(second / e.path().filename())) ++differing;
    }
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0, fmt::format("{} runs repeated, {} artifacts compared, {} differ", runs.size(),
                                                   files, differing)};
}

}  // namespace

int main() {
  std::map<int, Outcome> results;
  const auto guarded = [&](int id, const std::function<Outcome()>& f) {
    try {
      results[id] = f();
    } catch (const std::exception& e) {
      results[id] = {false, fmt::format("error: {}", e.what())};
    }
  };

  std::fprintf(stderr, "running acceptance scenarios\n");
  ExperimentReport stable, overload, masked;
  bool have_runs = true;
  try {
    stable = timed_run("stable A", stable_a());
    overload = timed_run("overload A", overload_a());
    masked = timed_run("masking B", masking_b());
  } catch (const std::exception& e) {
    have_runs = false;
    for (int id : {1, 2, 3, 4, 7, 10}) results[id] = {false, fmt::format("error: {}", e.what())};
  }
  if (have_runs) {
    guarded(1, [&] { return distribution(stable); });
    guarded(2, [&] { return interval_baseline(stable); });
    guarded(3, [&] { return divergence(overload); });
    guarded(4, [&] { return masking(masked, stable); });
    guarded(7, [&] { return conservation({&stable, &overload, &masked}); });
    guarded(10, [&] { return determinism({{&stable, stable_a()}, {&masked, masking_b()}}); });
  }
  guarded(6, lww_convergence);
  guarded(8, login_topology);
  guarded(9, regression_harness);
  guarded(5, scalability);

  const char* names[] = {"",
                         "distribution correctness",
                         "interval baseline",
                         "super-linear divergence",
                         "masking",
                         "scalability ordering",
                         "LWW convergence",
                         "conservation and ownership",
                         "login topology",
                         "regression harness",
                         "determinism"};
  bool all = true;
  for (int id = 1; id <= 10; ++id) {
    const Outcome& o = results[id];
    all &= o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, names[id], o.detail.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
