#include "dve/stats/descriptive.hpp"

#include <cmath>
#include <map>

#include "dve/error.hpp"

namespace dve {

Moments moments(std::span<const double> xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

TrendTest mann_kendall(std::span<const double> xs) {
  TrendTest t;
  const std::size_t n = xs.size();
  if (n < 3) return t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = xs[j] - xs[i];
      t.s += (d > 0) - (d < 0);
    }
  }
  std::map<double, std::size_t> ties;
  for (double x : xs) ++ties[x];
  const double nn = static_cast<double>(n);
  double var = nn * (nn - 1) * (2 * nn + 5);
  for (const auto& [v, c] : ties) {
    const double cc = static_cast<double>(c);
    if (c > 1) var -= cc * (cc - 1) * (2 * cc + 5);
  }
  t.variance = var / 18.0;
  if (t.variance <= 0) return t;
  if (t.s > 0) t.z = (t.s - 1) / std::sqrt(t.variance);
  if (t.s < 0) t.z = (t.s + 1) / std::sqrt(t.variance);
  return t;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::LengthMismatch, "linear fit needs two equal-length series of at least 2 points");
  }
  const Moments mx = moments(x), my = moments(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx.mean) * (y[i] - my.mean);
    sxx += (x[i] - mx.mean) * (x[i] - mx.mean);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidParameter, "linear fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my.mean - f.slope * mx.mean;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my.mean) * (y[i] - my.mean);
  }
  const double scale = std::max(1.0, my.mean * my.mean * static_cast<double>(y.size()));
  f.r2 = ss_tot <= 1e-24 * scale ? (ss_res <= 1e-24 * scale ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return f;
}

}  // namespace dve
