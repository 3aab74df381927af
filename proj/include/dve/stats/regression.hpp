#pragma once

#include <span>
#include <string>

namespace dve {

struct RegressionSpec {
  std::string metric;
  double lo = 0.0;
  double hi = 0.0;
  double max_cv = 0.05;
  std::size_t k = 5;

  /// Throws InvalidParameter unless lo <= hi, max_cv > 0 and k >= 3.
  void validate() const;
};

struct Verdict {
  std::string metric;
  bool pass = false;
  std::string reason;  // empty on pass
  double mean = 0.0;
  double cv = 0.0;
};

/// Pass iff the sample mean lies in [lo, hi] and sd / mean <= max_cv. The cv
/// check is skipped when the mean is 0 and the window contains 0.
Verdict check_regression(std::span<const double> samples, const RegressionSpec& spec);

}  // namespace dve
