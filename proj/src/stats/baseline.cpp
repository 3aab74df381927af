#include "dve/stats/baseline.hpp"

#include <fmt/format.h>

#include "dve/error.hpp"
#include "dve/stats/descriptive.hpp"

namespace dve {

EmpiricalBaseline capture_baseline(std::span<const BaselineRun> runs) {
  if (runs.size() < kMinBaselineRuns) {
    throw Error(ErrorCode::TooFewRuns, fmt::format("baseline needs at least {} runs, got {}", kMinBaselineRuns, runs.size()));
  }
  const BaselineRun& first = runs.front();
  for (const BaselineRun& r : runs) {
    if (r.peak_load_proxy >= kStressedLoadProxy) {
      throw Error(ErrorCode::StressedRunIncluded,
                  fmt::format("run with seed {} peaked at load proxy {:.3f}", r.seed, r.peak_load_proxy));
    }
    if (r.geometry_hash != first.geometry_hash || r.histogram.size() != first.histogram.size()) {
      throw Error(ErrorCode::InvalidParameter, "baseline runs must share one geometry");
    }
  }

  EmpiricalBaseline b;
  b.geometry_hash = first.geometry_hash;
  const std::size_t buckets = first.histogram.size();
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < buckets; ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = static_cast<double>(runs[r].histogram[i]);
    const Moments m = moments(column);
    b.bucket_mean.push_back(m.mean);
    b.bucket_sd.push_back(m.sd);
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    column[r] = runs[r].interval_mean_s;
    b.seeds.push_back(runs[r].seed);
  }
  const Moments im = moments(column);
  b.interval_mean_s = im.mean;
  b.interval_sd_s = im.sd;
  return b;
}

}  // namespace dve
