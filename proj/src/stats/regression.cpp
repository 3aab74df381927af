#include "dve/stats/regression.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dve/error.hpp"
#include "dve/stats/descriptive.hpp"

namespace dve {

void RegressionSpec::validate() const {
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidParameter, fmt::format("spec {}: lo > hi", metric));
  if (!(max_cv > 0.0)) throw Error(ErrorCode::InvalidParameter, fmt::format("spec {}: cv bound must be positive", metric));
  if (k < 3) throw Error(ErrorCode::InvalidParameter, fmt::format("spec {}: needs k >= 3", metric));
}

Verdict check_regression(std::span<const double> samples, const RegressionSpec& spec) {
  spec.validate();
  if (samples.size() != spec.k) {
    throw Error(ErrorCode::WrongSampleCount,
                fmt::format("spec {} expects {} samples, got {}", spec.metric, spec.k, samples.size()));
  }
  const Moments m = moments(samples);
  Verdict v;
  v.metric = spec.metric;
  v.mean = m.mean;
  const bool zero_ok = m.mean == 0.0 && spec.lo <= 0.0 && 0.0 <= spec.hi;
  v.cv = m.mean == 0.0 ? 0.0 : m.sd / std::fabs(m.mean);

  if (m.mean < spec.lo || m.mean > spec.hi) {
    v.reason = fmt::format("mean {:.4f} outside [{:.4f}, {:.4f}]", m.mean, spec.lo, spec.hi);
  } else if (!zero_ok && (m.mean == 0.0 || v.cv > spec.max_cv)) {
    v.reason = fmt::format("cv {:.4f} > {:.4f}", v.cv, spec.max_cv);
  }
  v.pass = v.reason.empty();
  return v;
}

}  // namespace dve
