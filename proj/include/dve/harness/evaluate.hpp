#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dve/harness/galton_experiment.hpp"
#include "dve/harness/login_experiment.hpp"
#include "dve/stats/regression.hpp"

namespace dve {

/// Samples per metric name, one entry per run.
using MetricTable = std::map<std::string, std::vector<double>>;

/// Appends each report's scalar metrics as one sample per run.
void add_samples(MetricTable& table, const ExperimentReport& report);
void add_samples(MetricTable& table, const LoginReport& report);

/// One verdict per spec. Throws UnknownMetric if a spec names a metric the
/// table lacks, and WrongSampleCount if the sample count differs from spec.k.
std::vector<Verdict> evaluate(const MetricTable& table, std::span<const RegressionSpec> specs);

bool all_pass(std::span<const Verdict> verdicts);

}  // namespace dve
