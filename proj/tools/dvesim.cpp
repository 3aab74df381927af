// dvesim: command-line front end for the Galton and login experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dve/error.hpp"
#include "dve/harness/config.hpp"
#include "dve/harness/evaluate.hpp"
#include "dve/harness/galton_experiment.hpp"
#include "dve/harness/login_experiment.hpp"
#include "dve/harness/rate_search.hpp"
#include "dve/harness/report_io.hpp"
#include "dve/stats/baseline.hpp"

namespace fs = std::filesystem;
using namespace dve;

namespace {

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    fmt::print("{} {}: mean={:.6g} cv={:.4f}{}\n", v.pass ? "PASS" : "FAIL", v.metric, v.mean, v.cv,
               v.pass ? "" : " (" + v.reason + ")");
  }
}

int run_galton_cmd(const std::string& config_file, std::optional<std::uint64_t> seed, const std::string& out,
                   const std::string& baseline_file) {
  GaltonExperimentConfig cfg = galton_config_from_json(read_json_file(config_file));
  if (seed) cfg.seed = *seed;
  ExperimentReport report = run_galton(cfg);
  if (!baseline_file.empty()) attach_baseline(report, read_baseline(baseline_file));
  export_report(report, out);
  fmt::print("seed {} topology {} t={}s: collected {} discarded {} live {} end {:.1f}s{}\n", report.seed,
             report.topology, report.period_t_s, report.collected, report.discarded, report.live_at_end,
             report.end_time_s, report.hit_cap ? " (duration cap)" : "");
  fmt::print("interval mean {:.3f}s, final quarter {:.3f}s, peak load proxy {:.3f}, rmse {:.3f}\n",
             report.metric("interval_mean_s"), report.metric("interval_final_quarter_s"),
             report.metric("peak_load_proxy"), report.metric("rmse_theoretical"));
  const bool sound = report.conservation_violations == 0 && report.metric("ownership_violations") == 0 &&
                     report.metric("exclusive_ownership_violations") == 0;
  if (!sound) fmt::print("FAIL conservation/ownership audit\n");
  return sound ? 0 : 1;
}

int search_rate_cmd(const std::string& config_file, double t_lo, double t_hi, int iterations) {
  const GaltonExperimentConfig cfg = galton_config_from_json(read_json_file(config_file));
  const RateSearchResult r = max_sustainable_rate(cfg, t_lo, t_hi, iterations);
  for (const auto& s : r.steps) {
    fmt::print("t={:.4f}s final-quarter interval={:.3f}s {}\n", s.period_t_s, s.final_quarter_interval_s,
               s.stable ? "stable" : "unstable");
  }
  fmt::print("t*={:.4f}\n", r.t_star_s);
  return 0;
}

int run_login_cmd(const std::string& config_file, std::optional<int> repeats, const std::string& out) {
  LoginExperimentConfig cfg = login_config_from_json(read_json_file(config_file));
  if (repeats) cfg.repeats = *repeats;
  cfg.validate();
  const LoginReport report = run_login(cfg);
  export_login(report, out);
  for (const char* m : {"sim_processing_s", "sim_inventory_requests", "central_processing_s",
                        "inventory_processing_s", "login_complete_s"}) {
    const Moments s = report.summary(m);
    fmt::print("{}: {:.4f} +- {:.4f}\n", m, s.mean, s.sd);
  }
  MetricTable table;
  add_samples(table, report);
  const auto verdicts = evaluate(table, cfg.specs);
  print_verdicts(verdicts);
  return all_pass(verdicts) ? 0 : 1;
}

int baseline_capture_cmd(const std::vector<std::string>& runs, const std::string& out) {
  std::vector<BaselineRun> inputs;
  for (const auto& r : runs) inputs.push_back(as_baseline_run(read_report(r)));
  const EmpiricalBaseline b = capture_baseline(inputs);
  write_baseline(b, out);
  fmt::print("baseline from {} runs: interval {:.3f} +- {:.3f}s\n", b.runs(), b.interval_mean_s, b.interval_sd_s);
  return 0;
}

int regress_cmd(const std::vector<std::string>& reports, const std::string& specs_file) {
  MetricTable table;
  for (const auto& r : reports) {
    for (const auto& [k, v] : read_report(r).samples) {
      auto& dst = table[k];
      dst.insert(dst.end(), v.begin(), v.end());
    }
  }
  const auto specs = specs_from_json(read_json_file(specs_file));
  const auto verdicts = evaluate(table, specs);
  print_verdicts(verdicts);
  return all_pass(verdicts) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned virtual environment simulator and evaluation harness"};
  app.require_subcommand(1);

  std::string config, out, baseline, specs;
  std::optional<std::uint64_t> seed;
  auto* galton = app.add_subcommand("run-galton", "Run one Galton experiment and export its report");
  galton->add_option("--config", config, "Galton config (JSON)")->required()->check(CLI::ExistingFile);
  galton->add_option("--seed", seed, "Override the config seed");
  galton->add_option("--out", out, "Output directory")->required();
  galton->add_option("--baseline", baseline, "Empirical baseline to compare against")->check(CLI::ExistingFile);

  double t_lo = 0, t_hi = 0;
  int iterations = 8;
  auto* search = app.add_subcommand("search-rate", "Bisect for the smallest stable drop period");
  search->add_option("--config", config, "Galton config (JSON)")->required()->check(CLI::ExistingFile);
  search->add_option("--t-lo", t_lo, "Unstable lower bound (s)")->required();
  search->add_option("--t-hi", t_hi, "Stable upper bound (s)")->required();
  search->add_option("--iterations", iterations, "Bisection steps")->check(CLI::Range(1, 64));

  std::optional<int> repeats;
  auto* login = app.add_subcommand("run-login", "Run the login topology model");
  login->add_option("--config", config, "Login config (JSON)")->required()->check(CLI::ExistingFile);
  login->add_option("--repeats", repeats, "Override the repeat count")->check(CLI::PositiveNumber);
  login->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> runs;
  auto* base = app.add_subcommand("baseline", "Empirical baselines");
  base->require_subcommand(1);
  auto* capture = base->add_subcommand("capture", "Build a baseline from unstressed run directories");
  capture->add_option("--runs", runs, "Run directories or report.json files")->required()->expected(1, -1);
  capture->add_option("--out", out, "Baseline file to write")->required();

  std::vector<std::string> reports;
  auto* regress = app.add_subcommand("regress", "Check regression specs against stored reports");
  regress->add_option("--report", reports, "Report files or run directories")->required()->expected(1, -1);
  regress->add_option("--specs", specs, "Regression specs (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; bad usage joins the error exit code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*galton) return run_galton_cmd(config, seed, out, baseline);
    if (*search) return search_rate_cmd(config, t_lo, t_hi, iterations);
    if (*login) return run_login_cmd(config, repeats, out);
    if (*capture) return baseline_capture_cmd(runs, out);
    if (*regress) return regress_cmd(reports, specs);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
