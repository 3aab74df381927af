#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dve/harness/galton_experiment.hpp"
#include "dve/harness/login_experiment.hpp"
#include "dve/stats/baseline.hpp"

namespace dve {

inline constexpr int kReportSchemaVersion = 1;

/// Writes metrics.csv, queues.csv, histogram.csv and report.json into `dir`
/// (created if missing). Output bytes depend only on the report.
void export_report(const ExperimentReport& report, const std::filesystem::path& dir);
/// Writes login.csv (one row per repeat and server) and report.json.
void export_login(const LoginReport& report, const std::filesystem::path& dir);

nlohmann::json report_json(const ExperimentReport& report);
nlohmann::json report_json(const LoginReport& report);

/// Observed counts from histogram.csv, indexed by bucket.
std::vector<std::int64_t> read_histogram_csv(const std::filesystem::path& file);

/// What a stored report.json holds for baselines and regression checks.
struct StoredReport {
  std::string kind;  // "galton" or "login"
  std::uint64_t seed = 0;
  std::uint64_t geometry_hash = 0;
  std::vector<std::int64_t> histogram;
  std::map<std::string, std::vector<double>> samples;  // one value per galton metric
};

/// Accepts either a report.json file or a directory containing one.
StoredReport read_report(const std::filesystem::path& path);
BaselineRun as_baseline_run(const StoredReport& report);

void write_baseline(const EmpiricalBaseline& baseline, const std::filesystem::path& file);
EmpiricalBaseline read_baseline(const std::filesystem::path& file);

}  // namespace dve
