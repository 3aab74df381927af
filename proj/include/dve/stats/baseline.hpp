#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dve {

/// Load proxy at or above which a run counts as stressed.
inline constexpr double kStressedLoadProxy = 0.5;
inline constexpr std::size_t kMinBaselineRuns = 3;

/// The parts of an experiment report a baseline is built from.
struct BaselineRun {
  std::uint64_t seed = 0;
  std::uint64_t geometry_hash = 0;
  std::vector<std::int64_t> histogram;
  double interval_mean_s = 0.0;
  double peak_load_proxy = 0.0;
};

struct EmpiricalBaseline {
  static constexpr int kSchemaVersion = 1;

  std::uint64_t geometry_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> bucket_mean;
  std::vector<double> bucket_sd;
  double interval_mean_s = 0.0;
  double interval_sd_s = 0.0;

  std::size_t runs() const { return seeds.size(); }
};

/// Per-bucket and interval mean/sd (population) over unstressed runs.
/// Throws TooFewRuns below three runs, StressedRunIncluded when any run's
/// peak load proxy reaches 0.5 and InvalidParameter on mixed geometries.
EmpiricalBaseline capture_baseline(std::span<const BaselineRun> runs);

}  // namespace dve
