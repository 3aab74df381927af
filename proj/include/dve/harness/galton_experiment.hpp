#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dve/harness/config.hpp"
#include "dve/stats/baseline.hpp"
#include "dve/stats/distribution.hpp"
#include "dve/stats/regression.hpp"

namespace dve {

/// Version string written into report metadata.
std::string_view code_version() noexcept;

enum class NodeRole : std::uint8_t { script, dispatcher, physics };
std::string_view to_string(NodeRole role) noexcept;

struct NodeInfo {
  NodeId id;
  NodeRole role = NodeRole::physics;
  std::optional<PartitionId> partition;
  int capacity = 0;  // physics only, after any injected jitter
};

struct LinkInfo {
  std::uint32_t id = 0;
  NodeId from;
  NodeId to;
  double byte_rate = 0.0;
  std::uint64_t msgs_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::size_t max_depth = 0;
};

/// One row of metrics.csv.
struct NodeSample {
  double t_s = 0.0;
  NodeId node;
  std::size_t balls_in_scene = 0;
  /// Mean drop interval of balls this node finished since the previous
  /// sample; carries the last value forward when none finished (0 before the first).
  double mean_interval_s = 0.0;
  double load_proxy = 0.0;
  std::uint64_t msgs_sent = 0;
  std::uint64_t msgs_recv = 0;
};

/// One row of queues.csv.
struct LinkSample {
  double t_s = 0.0;
  std::uint32_t link = 0;
  std::size_t depth = 0;
  std::uint64_t bytes_pending = 0;
};

struct FinishedBall {
  double t_s = 0.0;  // time the ball left the scene
  double interval_s = 0.0;
  bool collected = true;
};

struct ExperimentReport {
  // metadata
  std::uint64_t config_hash = 0;
  std::uint64_t geometry_hash = 0;
  std::uint64_t seed = 0;
  std::string topology;
  double period_t_s = 0.0;

  std::vector<NodeInfo> nodes;
  std::vector<LinkInfo> links;
  std::vector<NodeSample> node_series;
  std::vector<LinkSample> queue_series;
  std::vector<FinishedBall> finished;  // in finishing order

  BucketHistogram histogram;
  std::vector<double> expected_theoretical;
  std::optional<EmpiricalBaseline> baseline;

  std::int64_t created = 0;
  std::int64_t total_balls = 0;
  std::int64_t collected = 0;
  std::int64_t discarded = 0;
  std::int64_t live_at_end = 0;
  bool hit_cap = false;
  double end_time_s = 0.0;

  /// Ticks at which created != live + in transit + collected + discarded.
  std::uint64_t conservation_checks = 0;
  std::uint64_t conservation_violations = 0;
  bool replicas_converged = false;

  /// Named scalar metrics; regression specs refer to these names.
  std::map<std::string, double> metrics;
  std::vector<Verdict> verdicts;

  BaselineRun as_baseline_run() const;
  double metric(const std::string& name) const;  // throws UnknownMetric
};

/// Runs one seeded Galton experiment to completion or to the duration cap.
ExperimentReport run_galton(const GaltonExperimentConfig& config);

/// Attaches a baseline and fills rmse_baseline.
void attach_baseline(ExperimentReport& report, const EmpiricalBaseline& baseline);

/// Mean drop interval of balls that finished during the final quarter of the
/// run (by finishing time). +inf when none did.
double final_quarter_interval(const ExperimentReport& report);

}  // namespace dve
