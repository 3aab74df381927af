#pragma once

#include <span>

namespace dve {

/// Mean and population standard deviation.
struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};
Moments moments(std::span<const double> xs);

/// Mann-Kendall monotone trend test (no tie correction beyond the usual
/// variance adjustment). z > 0 indicates an increasing trend.
struct TrendTest {
  double s = 0.0;
  double variance = 0.0;
  double z = 0.0;
};
TrendTest mann_kendall(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  // 1 when y is exactly affine (including constant y)
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace dve
