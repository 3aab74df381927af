#pragma once

#include <vector>

#include "dve/harness/config.hpp"

namespace dve {

/// A run sustains real-time behaviour when the mean drop interval over its
/// final quarter stays within this factor of the nominal descent time.
inline constexpr double kStableIntervalFactor = 1.1;

struct SearchStep {
  double period_t_s = 0.0;
  double final_quarter_interval_s = 0.0;
  bool stable = false;
};

struct RateSearchResult {
  double t_star_s = 0.0;  // smallest stable period found
  std::vector<SearchStep> steps;
};

bool is_stable(const GaltonExperimentConfig& config, double final_quarter_interval_s);

/// Bisection on the drop period between t_lo (must be unstable) and t_hi
/// (must be stable). Throws BoundsDoNotBracket otherwise.
RateSearchResult max_sustainable_rate(const GaltonExperimentConfig& config_template, double t_lo, double t_hi,
                                      int iterations = 8);

}  // namespace dve
