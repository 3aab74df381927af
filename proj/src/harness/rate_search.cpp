#include "dve/harness/rate_search.hpp"

#include <fmt/format.h>

#include "dve/error.hpp"
#include "dve/harness/galton_experiment.hpp"

namespace dve {

bool is_stable(const GaltonExperimentConfig& config, double final_quarter_interval_s) {
  return final_quarter_interval_s <= kStableIntervalFactor * config.geometry.nominal_descent_s;
}

RateSearchResult max_sustainable_rate(const GaltonExperimentConfig& config_template, double t_lo, double t_hi,
                                      int iterations) {
  if (!(t_lo > 0) || !(t_lo < t_hi)) {
    throw Error(ErrorCode::BoundsDoNotBracket, fmt::format("need 0 < t_lo < t_hi, got [{}, {}]", t_lo, t_hi));
  }
  if (iterations < 1) throw Error(ErrorCode::InvalidParameter, "need at least one bisection iteration");

  RateSearchResult result;
  auto probe = [&](double t) {
    GaltonExperimentConfig cfg = config_template;
    cfg.period_t_s = t;
    const ExperimentReport r = run_galton(cfg);
    const double fq = r.metric("interval_final_quarter_s");
    const bool stable = !r.hit_cap && is_stable(cfg, fq);
    result.steps.push_back(SearchStep{t, fq, stable});
    return stable;
  };

  if (!probe(t_hi)) throw Error(ErrorCode::BoundsDoNotBracket, fmt::format("t_hi = {} s is not stable", t_hi));
  if (probe(t_lo)) throw Error(ErrorCode::BoundsDoNotBracket, fmt::format("t_lo = {} s is already stable", t_lo));

  double lo = t_lo, hi = t_hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? hi : lo) = mid;
  }
  result.t_star_s = hi;
  return result;
}

}  // namespace dve
