#include "dve/harness/galton_experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

#include <fmt/format.h>

#include "dve/actors/dispatcher.hpp"
#include "dve/actors/physics_actor.hpp"
#include "dve/actors/script_actor.hpp"
#include "dve/error.hpp"

namespace dve {

std::string_view code_version() noexcept { return DVE_VERSION; }

std::string_view to_string(NodeRole role) noexcept {
  switch (role) {
    case NodeRole::script: return "script";
    case NodeRole::dispatcher: return "dispatcher";
    case NodeRole::physics: return "physics";
  }
  return "?";
}

BaselineRun ExperimentReport::as_baseline_run() const {
  BaselineRun r;
  r.seed = seed;
  r.geometry_hash = geometry_hash;
  r.histogram = histogram.counts;
  r.interval_mean_s = metrics.at("interval_mean_s");
  r.peak_load_proxy = metrics.at("peak_load_proxy");
  return r;
}

double ExperimentReport::metric(const std::string& name) const {
  const auto it = metrics.find(name);
  if (it == metrics.end()) throw Error(ErrorCode::UnknownMetric, fmt::format("report has no metric '{}'", name));
  return it->second;
}

double final_quarter_interval(const ExperimentReport& report) {
  const double from = 0.75 * report.end_time_s;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : report.finished) {
    if (f.collected && f.t_s >= from) {
      sum += f.interval_s;
      ++n;
    }
  }
  return n == 0 ? std::numeric_limits<double>::infinity() : sum / static_cast<double>(n);
}

void attach_baseline(ExperimentReport& report, const EmpiricalBaseline& baseline) {
  if (baseline.bucket_mean.size() != report.histogram.counts.size()) {
    throw Error(ErrorCode::LengthMismatch, "baseline and report have different bucket counts");
  }
  report.metrics["rmse_baseline"] = rmse(report.histogram, baseline.bucket_mean);
  report.baseline = baseline;
}

namespace {

constexpr NodeId kHarness{0};
constexpr NodeId kScript{1};
constexpr NodeId kDispatcher{2};
constexpr NodeId kFirstPhysics{10};

PartitionMap make_map(const GaltonExperimentConfig& cfg) {
  const RegionSpec& region = cfg.geometry.region;
  if (cfg.topology == Topology::single_physics) return PartitionMap::single(region, PartitionId{1}, kFirstPhysics);
  const NodeId second{kFirstPhysics.value + 1};
  if (cfg.split == SplitKind::center) return PartitionMap::split_x(region, region.cells_x() / 2, kFirstPhysics, second);
  return PartitionMap::split_y(region, region.cells_y() / 2, kFirstPhysics, second);
}

/// Two-point capacity factor for the injected jitter defect.
double capacity_factor(const GaltonExperimentConfig& cfg) {
  if (cfg.capacity_jitter <= 0.0) return 1.0;
  RandomStream s(cfg.seed, "capacity-jitter", 0);
  return s.uniform() < 0.5 ? 1.0 - cfg.capacity_jitter : 1.0 + cfg.capacity_jitter;
}

class GaltonRun {
 public:
  explicit GaltonRun(const GaltonExperimentConfig& cfg)
      : cfg_(cfg),
        engine_(EngineOptions{cfg.seed, SimDuration::from_seconds(cfg.max_clock_skew_ms / 1000.0)}),
        network_(engine_),
        map_(make_map(cfg)) {}

  ExperimentReport run();

 private:
  NodeClock clock_for(NodeId node) {
    // Offsets within +-skew/2 keep every pair of nodes within the skew bound.
    RandomStream s = engine_.stream("clock-offset", node.value);
    const double half = engine_.max_clock_skew().us / 2.0;
    const auto off = static_cast<std::int64_t>(std::floor((s.uniform() * 2.0 - 1.0) * half));
    return engine_.make_clock(node, SimDuration::from_us(off));
  }
  void wire();
  void sample();
  void on_tick(const TickReport& r);
  std::int64_t accounted() const;
  void finish(ExperimentReport& report);

  const GaltonExperimentConfig& cfg_;
  Engine engine_;
  Network network_;
  PartitionMap map_;
  std::unique_ptr<ScriptActor> script_;
  std::unique_ptr<DispatcherActor> dispatcher_;
  std::vector<std::unique_ptr<PhysicsActor>> physics_;
  std::vector<NodeInfo> nodes_;
  std::uint64_t dispatcher_recv_ = 0;

  std::vector<NodeSample> node_series_;
  std::map<NodeId, double> last_interval_;
  std::map<NodeId, std::size_t> consumed_;
  std::optional<SimTime> last_sample_;
  std::uint64_t checks_ = 0;
  std::uint64_t violations_ = 0;
  bool done_ = false;
};

void GaltonRun::wire() {
  const SimDuration latency = SimDuration::from_seconds(cfg_.links.latency_ms / 1000.0);
  const SimDuration jitter = SimDuration::from_seconds(cfg_.links.max_jitter_ms / 1000.0);
  auto link = [&](NodeId from, NodeId to, double rate) { network_.add_link(LinkSpec{from, to, latency, rate, jitter}); };

  const double factor = capacity_factor(cfg_);
  nodes_.push_back(NodeInfo{kScript, NodeRole::script, std::nullopt, 0});
  nodes_.push_back(NodeInfo{kDispatcher, NodeRole::dispatcher, std::nullopt, 0});
  link(kScript, kDispatcher, cfg_.links.byte_rate);
  link(kDispatcher, kScript, cfg_.links.byte_rate);

  for (const auto& [partition, node] : map_.owners()) {
    PhysicsParams params = cfg_.physics;
    params.capacity = std::max(1, static_cast<int>(std::lround(params.capacity * factor)));
    physics_.push_back(std::make_unique<PhysicsActor>(node, partition, kDispatcher, cfg_.geometry, map_, params, engine_,
                                                      network_, clock_for(node), cfg_.sizes));
    nodes_.push_back(NodeInfo{node, NodeRole::physics, partition, params.capacity});
    link(kDispatcher, node, cfg_.links.to_physics_byte_rate.value_or(cfg_.links.byte_rate));
    link(node, kDispatcher, cfg_.links.byte_rate);
  }

  script_ = std::make_unique<ScriptActor>(kScript, kDispatcher, cfg_.geometry,
                                          SimDuration::from_seconds(cfg_.period_t_s), engine_, network_,
                                          clock_for(kScript), cfg_.sizes);
  dispatcher_ = std::make_unique<DispatcherActor>(kDispatcher, kScript, map_, network_, cfg_.sizes);

  network_.set_handler(kScript, [this](const Message& m) { script_->on_message(m); });
  network_.set_handler(kDispatcher, [this](const Message& m) {
    ++dispatcher_recv_;
    dispatcher_->on_message(m);
  });
  for (auto& p : physics_) {
    PhysicsActor* actor = p.get();
    network_.set_handler(actor->node(), [actor](const Message& m) { actor->on_message(m); });
    actor->set_tick_observer([this](const TickReport& r) { on_tick(r); });
  }
}

std::int64_t GaltonRun::accounted() const {
  std::int64_t n = 0;
  for (const auto& p : physics_) n += p->collected() + p->discarded();
  return n;
}

void GaltonRun::on_tick(const TickReport&) {
  std::int64_t live = 0;
  for (const auto& p : physics_) live += static_cast<std::int64_t>(p->active_count());
  const auto in_transit = static_cast<std::int64_t>(network_.carriers_in_transit());
  ++checks_;
  if (script_->created() != live + in_transit + accounted()) ++violations_;
  if (!done_ && accounted() == cfg_.geometry.total_balls()) {
    done_ = true;
    engine_.request_stop();
  }
}

void GaltonRun::sample() {
  const SimTime now = engine_.now();
  if (last_sample_ && *last_sample_ == now) return;
  last_sample_ = now;
  const double t = now.us / 1e6;

  auto row = [&](NodeId node, std::size_t balls, double interval, double load, std::uint64_t sent,
                 std::uint64_t recv) { node_series_.push_back(NodeSample{t, node, balls, interval, load, sent, recv}); };
  row(kScript, script_->replica().live_count(), 0.0, 0.0, script_->msgs_sent(), script_->msgs_recv());
  row(kDispatcher, 0, 0.0, 0.0, dispatcher_->relayed(), dispatcher_recv_);
  for (const auto& p : physics_) {
    const auto& done = p->collections();
    std::size_t& from = consumed_[p->node()];
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = from; i < done.size(); ++i) {
      if (!done[i].bucket) continue;
      sum += done[i].interval_s;
      ++n;
    }
    from = done.size();
    double& interval = last_interval_[p->node()];
    if (n > 0) interval = sum / static_cast<double>(n);
    const double load = static_cast<double>(p->active_count()) / p->params().capacity;
    row(p->node(), p->active_count(), interval, load, p->msgs_sent(), p->msgs_recv());
  }
  network_.sample_queues();
}

ExperimentReport GaltonRun::run() {
  wire();
  const SimTime t0{};
  const SimTime cap = t0 + SimDuration::from_seconds(cfg_.duration_cap_s);
  const SimDuration every = SimDuration::from_seconds(cfg_.sample_every_s);

  script_->start(t0);
  for (auto& p : physics_) p->start(t0);
  bool sampling = true;
  std::function<void()> sampler = [&] {
    if (!sampling) return;
    sample();
    if (!done_) engine_.schedule_after(every, kHarness, "sample", sampler);
  };
  engine_.schedule(t0, kHarness, "sample", sampler);

  engine_.run_until(cap);
  const SimTime end = engine_.now();
  sample();

  ExperimentReport report;
  report.hit_cap = !done_;
  report.end_time_s = end.us / 1e6;

  // Quiesce: stop ticking and let in-flight messages drain so replicas can be compared.
  done_ = true;
  sampling = false;
  script_->stop();
  for (auto& p : physics_) p->stop();
  engine_.run_until(SimTime{std::numeric_limits<std::int64_t>::max() / 2});

  finish(report);
  return report;
}

void GaltonRun::finish(ExperimentReport& report) {
  const GaltonGeometry& g = cfg_.geometry;
  report.config_hash = cfg_.hash();
  report.geometry_hash = g.hash();
  report.seed = cfg_.seed;
  report.topology = cfg_.topology == Topology::single_physics ? "A" : "B";
  report.period_t_s = cfg_.period_t_s;
  report.nodes = nodes_;
  report.node_series = std::move(node_series_);

  for (std::uint32_t i = 0; i < network_.link_count(); ++i) {
    const LinkId id{i};
    const LinkSpec& s = network_.spec(id);
    const LinkCounters& c = network_.counters(id);
    report.links.push_back(LinkInfo{i, s.from, s.to, s.byte_rate, c.msgs_sent, c.bytes_sent, c.max_depth});
  }
  for (const auto& q : network_.samples()) {
    report.queue_series.push_back(LinkSample{q.t.us / 1e6, q.link.value, q.depth, q.bytes_pending});
  }

  report.histogram = BucketHistogram(static_cast<std::size_t>(g.bucket_count()));
  double peak_load = 0.0;
  std::uint64_t migrations = 0, ownership = 0, unknown = script_->unknown_entity_errors(), steps = 0;
  std::int64_t live = 0;
  std::vector<std::pair<const Collection*, NodeId>> done;
  for (const auto& p : physics_) {
    for (std::size_t b = 0; b < p->histogram().size(); ++b) report.histogram.counts[b] += p->histogram()[b];
    report.collected += p->collected();
    report.discarded += p->discarded();
    live += static_cast<std::int64_t>(p->active_count());
    peak_load = std::max(peak_load, p->peak_load());
    migrations += p->migrations().started();
    ownership += p->ownership_violations();
    unknown += p->unknown_entity_errors();
    steps += p->total_steps();
    for (const auto& c : p->collections()) done.emplace_back(&c, p->node());
  }
  std::stable_sort(done.begin(), done.end(), [](const auto& a, const auto& b) {
    return a.first->at != b.first->at ? a.first->at < b.first->at : a.first->id.value < b.first->id.value;
  });
  double interval_sum = 0.0;
  for (const auto& [c, node] : done) {
    report.finished.push_back(FinishedBall{c->at.us / 1e6, c->interval_s, c->bucket.has_value()});
    if (c->bucket) interval_sum += c->interval_s;
  }

  report.created = script_->created();
  report.total_balls = g.total_balls();
  report.live_at_end = live + static_cast<std::int64_t>(network_.carriers_in_transit());
  report.conservation_checks = checks_;
  report.conservation_violations = violations_;

  std::size_t peak_balls = 0;
  for (std::size_t i = 0; i < report.node_series.size();) {
    const double t = report.node_series[i].t_s;
    std::size_t balls = 0;
    for (; i < report.node_series.size() && report.node_series[i].t_s == t; ++i) {
      if (report.node_series[i].node.value >= kFirstPhysics.value) balls += report.node_series[i].balls_in_scene;
    }
    peak_balls = std::max(peak_balls, balls);
  }
  std::size_t peak_to_physics_depth = 0;
  std::uint64_t bytes = 0, msgs = 0;
  for (const auto& l : report.links) {
    bytes += l.bytes_sent;
    msgs += l.msgs_sent;
    if (l.from == kDispatcher && l.to.value >= kFirstPhysics.value) {
      peak_to_physics_depth = std::max(peak_to_physics_depth, l.max_depth);
    }
  }

  // At quiescence every created ball must be held by exactly one simulator
  // or have left the scene exactly once.
  std::unordered_map<std::uint64_t, int> holders;
  for (const auto& p : physics_) {
    for (const auto& [id, ball] : p->owned()) ++holders[id];
    for (const auto& c : p->collections()) ++holders[c.id.value];
  }
  std::uint64_t exclusive_violations = 0;
  for (const auto& [id, n] : holders) exclusive_violations += n != 1;
  exclusive_violations += static_cast<std::uint64_t>(report.created) - std::min<std::uint64_t>(holders.size(), report.created);
  exclusive_violations += network_.carriers_in_transit();

  const SceneDigest ref = script_->replica().digest();
  report.replicas_converged = true;
  for (const auto& p : physics_) report.replicas_converged &= p->replica().digest() == ref;

  report.expected_theoretical = theoretical_distribution(g).expected;

  auto& m = report.metrics;
  m["rmse_theoretical"] = rmse(report.histogram, report.expected_theoretical);
  m["created"] = static_cast<double>(report.created);
  m["collected"] = static_cast<double>(report.collected);
  m["discarded"] = static_cast<double>(report.discarded);
  m["live_at_end"] = static_cast<double>(report.live_at_end);
  m["hit_cap"] = report.hit_cap ? 1.0 : 0.0;
  m["end_time_s"] = report.end_time_s;
  m["peak_load_proxy"] = peak_load;
  m["migrations"] = static_cast<double>(migrations);
  m["ownership_violations"] = static_cast<double>(ownership);
  m["unknown_entity_errors"] = static_cast<double>(unknown);
  m["conservation_violations"] = static_cast<double>(violations_);
  m["exclusive_ownership_violations"] = static_cast<double>(exclusive_violations);
  m["replicas_converged"] = report.replicas_converged ? 1.0 : 0.0;
  m["ball_steps"] = static_cast<double>(steps);
  m["interval_mean_s"] = report.collected > 0 ? interval_sum / static_cast<double>(report.collected) : 0.0;
  m["interval_final_quarter_s"] = final_quarter_interval(report);
  m["peak_balls_in_scene"] = static_cast<double>(peak_balls);
  m["peak_to_physics_queue_depth"] = static_cast<double>(peak_to_physics_depth);
  m["messages_sent"] = static_cast<double>(msgs);
  m["bytes_sent"] = static_cast<double>(bytes);
}

}  // namespace

ExperimentReport run_galton(const GaltonExperimentConfig& config) {
  config.validate();
  GaltonRun run(config);
  ExperimentReport report = run.run();
  return report;
}

}  // namespace dve
