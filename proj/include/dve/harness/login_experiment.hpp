#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dve/harness/config.hpp"
#include "dve/stats/descriptive.hpp"

namespace dve {

struct ServerLoad {
  double processing_s = 0.0;  // accumulated busy time within the run
  std::uint64_t requests = 0;
  std::uint64_t inventory_requests = 0;  // folder requests received
};

struct LoginRun {
  std::uint64_t seed = 0;
  std::map<std::string, ServerLoad> servers;  // "sim", "central", "inventory"
  double login_complete_s = 0.0;              // last response at the client; run length if unfinished
  bool completed = false;
};

struct LoginReport {
  std::uint64_t config_hash = 0;
  std::string topology;
  std::vector<LoginRun> runs;
  /// Per-repeat samples of named metrics ("sim_processing_s", ...).
  std::map<std::string, std::vector<double>> samples;

  Moments summary(const std::string& metric) const;  // throws UnknownMetric
};

/// Models the inventory-retrieval stage of a login: one auth request to the
/// central server, one request per inventory folder issued breadth-first as
/// parents are answered, one proxied request per scene asset, and a fixed
/// avatar cost at the simulation server. Servers are FIFO and charge
/// cost * cost_unit of processing time per request.
LoginReport run_login(const LoginExperimentConfig& config);

}  // namespace dve
