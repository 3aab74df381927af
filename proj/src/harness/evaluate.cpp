#include "dve/harness/evaluate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

void add_samples(MetricTable& table, const ExperimentReport& report) {
  for (const auto& [name, value] : report.metrics) table[name].push_back(value);
}

void add_samples(MetricTable& table, const LoginReport& report) {
  for (const auto& [name, values] : report.samples) {
    auto& dst = table[name];
    dst.insert(dst.end(), values.begin(), values.end());
  }
}

std::vector<Verdict> evaluate(const MetricTable& table, std::span<const RegressionSpec> specs) {
  std::vector<Verdict> out;
  for (const auto& spec : specs) {
    const auto it = table.find(spec.metric);
    if (it == table.end()) throw Error(ErrorCode::UnknownMetric, fmt::format("no metric named '{}'", spec.metric));
    out.push_back(check_regression(it->second, spec));
  }
  return out;
}

bool all_pass(std::span<const Verdict> verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

}  // namespace dve
