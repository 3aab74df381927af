#include "dve/stats/distribution.hpp"

#include <cmath>
#include <numeric>

#include "dve/error.hpp"

namespace dve {

std::vector<double> binomial_pmf(int n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "binomial_pmf needs n >= 0 and p in [0, 1]");
  }
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0 || p == 1.0) {
    pmf[p == 0.0 ? 0 : static_cast<std::size_t>(n)] = 1.0;
    return pmf;
  }
  // Log weights relative to the mode via the ratio recurrence, then normalize.
  // Working relative to the mode keeps every exponent <= 0 and avoids the
  // cancellation of lgamma differences for large n.
  const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
  const double log_odds = std::log(p) - std::log1p(-p);
  std::vector<double> logw(pmf.size(), 0.0);
  for (int k = mode; k < n; ++k) {
    logw[k + 1] = logw[k] + std::log(static_cast<double>(n - k) / (k + 1)) + log_odds;
  }
  for (int k = mode; k > 0; --k) {
    logw[k - 1] = logw[k] - std::log(static_cast<double>(n - k + 1) / k) - log_odds;
  }
  long double sum = 0.0L;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    pmf[k] = std::exp(logw[k]);
    sum += pmf[k];
  }
  for (double& v : pmf) v = static_cast<double>(v / sum);
  return pmf;
}

double ExpectedDistribution::total() const {
  return std::accumulate(expected.begin(), expected.end(), 0.0);
}

ExpectedDistribution theoretical_distribution(const GaltonGeometry& geom) {
  if (geom.n_levels < 0 || geom.boxes <= 0 || geom.rows_per_box <= 0 || geom.droppers_per_row <= 0 ||
      geom.balls_per_dropper < 0 || geom.row_offset_buckets < 0) {
    throw Error(ErrorCode::InvalidParameter, "geometry counts must be positive");
  }
  const double n_row = static_cast<double>(geom.boxes) * geom.droppers_per_row * geom.balls_per_dropper;
  const std::vector<double> pmf = binomial_pmf(geom.n_levels, 0.5);

  ExpectedDistribution d;
  d.expected.assign(static_cast<std::size_t>(geom.bucket_count()), 0.0);
  for (int r = 0; r < geom.rows_per_box; ++r) {
    std::vector<double> row(pmf.size());
    for (std::size_t k = 0; k < pmf.size(); ++k) row[k] = n_row * pmf[k];
    const int offset = r * geom.row_offset_buckets;
    for (std::size_t k = 0; k < row.size(); ++k) d.expected[offset + k] += row[k];
    d.per_row.push_back(std::move(row));
    d.row_offsets.push_back(offset);
  }
  return d;
}

std::int64_t BucketHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

double rmse(std::span<const double> observed, std::span<const double> baseline) {
  if (observed.size() != baseline.size()) {
    throw Error(ErrorCode::LengthMismatch, "rmse needs vectors of equal length");
  }
  if (observed.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - baseline[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(observed.size()));
}

double rmse(const BucketHistogram& observed, std::span<const double> baseline) {
  const std::vector<double> obs = observed.as_doubles();
  return rmse(obs, baseline);
}

}  // namespace dve
