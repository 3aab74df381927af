#include "dve/harness/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::uint64_t parse_hex(const json& j) {
  const std::string s = j.get<std::string>();
  std::size_t used = 0;
  const std::uint64_t v = std::stoull(s, &used, 16);
  if (used != s.size()) throw Error(ErrorCode::ConfigInvalid, fmt::format("bad hash '{}'", s));
  return v;
}

/// Non-finite values (an interval that never settled) are stored as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(); }
double number_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

void write_file(const fs::path& file, const std::string& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot write {}", file.string()));
  out << bytes;
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("write failed for {}", file.string()));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

json verdicts_json(const std::vector<Verdict>& verdicts) {
  json out = json::array();
  for (const auto& v : verdicts) {
    out.push_back(json{{"metric", v.metric}, {"pass", v.pass}, {"reason", v.reason}, {"mean", number(v.mean)},
                       {"cv", number(v.cv)}});
  }
  return out;
}

}  // namespace

json report_json(const ExperimentReport& r) {
  json nodes = json::array();
  for (const auto& n : r.nodes) {
    json node{{"node_id", n.id.value}, {"role", to_string(n.role)}};
    if (n.partition) node["partition"] = n.partition->value;
    if (n.role == NodeRole::physics) node["capacity"] = n.capacity;
    nodes.push_back(node);
  }
  json links = json::array();
  for (const auto& l : r.links) {
    links.push_back(json{{"link_id", l.id},
                         {"from", l.from.value},
                         {"to", l.to.value},
                         {"byte_rate", l.byte_rate},
                         {"msgs_sent", l.msgs_sent},
                         {"bytes_sent", l.bytes_sent},
                         {"max_depth", l.max_depth}});
  }
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  json rmse_j{{"theoretical", number(r.metrics.at("rmse_theoretical"))}};
  if (const auto it = r.metrics.find("rmse_baseline"); it != r.metrics.end()) rmse_j["baseline"] = number(it->second);

  return json{{"schema_version", kReportSchemaVersion},
              {"kind", "galton"},
              {"metadata",
               {{"config_hash", hex(r.config_hash)},
                {"geometry_hash", hex(r.geometry_hash)},
                {"seed", r.seed},
                {"code_version", code_version()},
                {"topology", r.topology},
                {"period_s", r.period_t_s},
                {"nodes", nodes},
                {"links", links}}},
              {"rmse", rmse_j},
              {"metrics", metrics},
              {"verdicts", verdicts_json(r.verdicts)},
              {"histogram", r.histogram.counts}};
}

json report_json(const LoginReport& r) {
  json samples = json::object(), summary = json::object();
  for (const auto& [k, v] : r.samples) {
    json arr = json::array();
    for (double x : v) arr.push_back(number(x));
    samples[k] = arr;
    const Moments m = moments(v);
    summary[k] = json{{"mean", number(m.mean)}, {"sd", number(m.sd)}};
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"kind", "login"},
              {"metadata",
               {{"config_hash", hex(r.config_hash)},
                {"code_version", code_version()},
                {"topology", r.topology},
                {"repeats", r.runs.size()}}},
              {"samples", samples},
              {"summary", summary}};
}

void export_report(const ExperimentReport& r, const fs::path& dir) {
  make_dir(dir);

  std::string metrics = "sim_time_s,node_id,balls_in_scene,mean_interval_s,load_proxy,msgs_sent,msgs_recv\n";
  for (const auto& s : r.node_series) {
    metrics += fmt::format("{:.3f},{},{},{:.6f},{:.6f},{},{}\n", s.t_s, s.node.value, s.balls_in_scene,
                           s.mean_interval_s, s.load_proxy, s.msgs_sent, s.msgs_recv);
  }
  write_file(dir / "metrics.csv", metrics);

  std::string queues = "sim_time_s,link_id,depth,bytes_pending\n";
  for (const auto& q : r.queue_series) {
    queues += fmt::format("{:.3f},{},{},{}\n", q.t_s, q.link, q.depth, q.bytes_pending);
  }
  write_file(dir / "queues.csv", queues);

  std::string hist = "bucket_index,observed,expected_theoretical,baseline_mean,baseline_sd\n";
  for (std::size_t i = 0; i < r.histogram.counts.size(); ++i) {
    const double expected = i < r.expected_theoretical.size() ? r.expected_theoretical[i] : 0.0;
    std::string base = ",";
    if (r.baseline) base = fmt::format("{:.6f},{:.6f}", r.baseline->bucket_mean[i], r.baseline->bucket_sd[i]);
    hist += fmt::format("{},{},{:.6f},{}\n", i, r.histogram.counts[i], expected, base);
  }
  write_file(dir / "histogram.csv", hist);

  write_file(dir / "report.json", report_json(r).dump(2) + "\n");
}

void export_login(const LoginReport& r, const fs::path& dir) {
  make_dir(dir);
  std::string csv = "repeat,seed,server,processing_s,requests,inventory_requests,login_complete_s\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const LoginRun& run = r.runs[i];
    for (const auto& [server, load] : run.servers) {
      csv += fmt::format("{},{},{},{:.6f},{},{},{:.6f}\n", i, run.seed, server, load.processing_s, load.requests,
                         load.inventory_requests, run.login_complete_s);
    }
  }
  write_file(dir / "login.csv", csv);
  write_file(dir / "report.json", report_json(r).dump(2) + "\n");
}

std::vector<std::int64_t> read_histogram_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", file.string()));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::int64_t> counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string index, observed;
    std::getline(row, index, ',');
    std::getline(row, observed, ',');
    const auto i = static_cast<std::size_t>(std::stoul(index));
    if (i != counts.size()) throw Error(ErrorCode::IoFailure, fmt::format("{}: bucket rows out of order", file.string()));
    counts.push_back(std::stoll(observed));
  }
  return counts;
}

StoredReport read_report(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "report.json" : path;
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", file.string()));
  StoredReport out;
  try {
    const json j = json::parse(in);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: unsupported schema version", file.string()));
    }
    out.kind = j.at("kind").get<std::string>();
    if (out.kind == "galton") {
      out.seed = j.at("metadata").at("seed").get<std::uint64_t>();
      out.geometry_hash = parse_hex(j.at("metadata").at("geometry_hash"));
      out.histogram = j.at("histogram").get<std::vector<std::int64_t>>();
      for (const auto& [k, v] : j.at("metrics").items()) out.samples[k].push_back(number_from(v));
    } else if (out.kind == "login") {
      for (const auto& [k, v] : j.at("samples").items()) {
        for (const auto& x : v) out.samples[k].push_back(number_from(x));
      }
    } else {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: unknown report kind '{}'", file.string(), out.kind));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: {}", file.string(), e.what()));
  }
  return out;
}

BaselineRun as_baseline_run(const StoredReport& r) {
  if (r.kind != "galton") throw Error(ErrorCode::InvalidParameter, "baselines need galton reports");
  auto one = [&](const char* name) {
    const auto it = r.samples.find(name);
    if (it == r.samples.end() || it->second.empty()) {
      throw Error(ErrorCode::UnknownMetric, fmt::format("report has no metric '{}'", name));
    }
    return it->second.front();
  };
  BaselineRun b;
  b.seed = r.seed;
  b.geometry_hash = r.geometry_hash;
  b.histogram = r.histogram;
  b.interval_mean_s = one("interval_mean_s");
  b.peak_load_proxy = one("peak_load_proxy");
  return b;
}

void write_baseline(const EmpiricalBaseline& b, const fs::path& file) {
  if (file.has_parent_path()) make_dir(file.parent_path());
  const json j{{"schema_version", EmpiricalBaseline::kSchemaVersion},
               {"geometry_hash", hex(b.geometry_hash)},
               {"seeds", b.seeds},
               {"bucket_mean", b.bucket_mean},
               {"bucket_sd", b.bucket_sd},
               {"interval_mean_s", b.interval_mean_s},
               {"interval_sd_s", b.interval_sd_s}};
  write_file(file, j.dump(2) + "\n");
}

EmpiricalBaseline read_baseline(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", file.string()));
  EmpiricalBaseline b;
  try {
    const json j = json::parse(in);
    if (j.at("schema_version").get<int>() != EmpiricalBaseline::kSchemaVersion) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: unsupported baseline schema", file.string()));
    }
    b.geometry_hash = parse_hex(j.at("geometry_hash"));
    b.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    b.bucket_mean = j.at("bucket_mean").get<std::vector<double>>();
    b.bucket_sd = j.at("bucket_sd").get<std::vector<double>>();
    b.interval_mean_s = j.at("interval_mean_s").get<double>();
    b.interval_sd_s = j.at("interval_sd_s").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: {}", file.string(), e.what()));
  }
  if (b.bucket_mean.size() != b.bucket_sd.size()) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: bucket mean/sd lengths differ", file.string()));
  }
  return b;
}

}  // namespace dve
