#include "dve/harness/login_experiment.hpp"

#include <deque>
#include <memory>

#include <fmt/format.h>

#include "dve/error.hpp"
#include "dve/netsim/network.hpp"

namespace dve {

Moments LoginReport::summary(const std::string& metric) const {
  const auto it = samples.find(metric);
  if (it == samples.end()) throw Error(ErrorCode::UnknownMetric, fmt::format("login report has no metric '{}'", metric));
  return moments(it->second);
}

namespace {

constexpr NodeId kClient{1};
constexpr NodeId kSim{2};
constexpr NodeId kCentral{3};
constexpr NodeId kInventory{4};

enum class Ask : std::uint8_t { auth, login, folder, asset };

struct LoginPayload {
  Ask ask = Ask::auth;
  int folder = -1;
  bool response = false;
};

class LoginRunModel {
 public:
  LoginRunModel(const LoginExperimentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), engine_(EngineOptions{seed, SimDuration::from_ms(50)}), net_(engine_), jitter_(seed, "cost-jitter") {
    build_tree();
    for (NodeId a : {kClient, kSim, kCentral, kInventory}) {
      for (NodeId b : {kClient, kSim, kCentral, kInventory}) {
        if (a != b) net_.add_link(LinkSpec{a, b, SimDuration::from_ms(1), 12.5e6, {}});
      }
    }
    for (NodeId n : {kClient, kSim, kCentral, kInventory}) {
      net_.set_handler(n, [this, n](const Message& m) { on_message(n, m); });
    }
    run_.seed = seed;
  }

  LoginRun run() {
    end_ = SimTime{} + SimDuration::from_seconds(cfg_.run_length_s);
    send(kClient, kCentral, LoginPayload{Ask::auth});
    engine_.run_until(end_);
    run_.completed = outstanding_ == 0 && queue_.empty() && logged_in_;
    run_.login_complete_s = run_.completed ? last_response_.us / 1e6 : cfg_.run_length_s;
    return run_;
  }

 private:
  struct Server {
    SimTime busy_until;
  };

  void build_tree() {
    // Random recursive tree: folder i > 0 hangs under a uniformly chosen earlier folder.
    children_.assign(static_cast<std::size_t>(cfg_.folders), {});
    RandomStream s(engine_.seed(), "folder-tree");
    for (int i = 1; i < cfg_.folders; ++i) {
      const auto parent = static_cast<int>(s.uniform() * i);
      children_[static_cast<std::size_t>(parent)].push_back(i);
    }
  }

  std::string_view name(NodeId n) const {
    return n == kSim ? "sim" : n == kCentral ? "central" : n == kInventory ? "inventory" : "client";
  }

  void send(NodeId from, NodeId to, LoginPayload p) {
    Message m;
    m.kind = p.response ? MessageKind::response : MessageKind::request;
    m.size_bytes = p.response ? MessageSizes{}.response : MessageSizes{}.request;
    m.origin = from;
    m.destination = to;
    m.payload = std::make_shared<const LoginPayload>(p);
    net_.send(from, to, std::move(m));
  }

  /// Queues `cost` units of work at `server`; `then` runs when it completes.
  void process(NodeId server, double cost, std::function<void()> then) {
    if (cfg_.cost_jitter > 0) cost *= 1.0 + cfg_.cost_jitter * (2.0 * jitter_.uniform() - 1.0);
    const SimDuration service = SimDuration::from_seconds(cost * cfg_.cost_unit_ms / 1000.0);
    Server& s = servers_[server.value];
    const SimTime start = std::max(engine_.now(), s.busy_until);
    s.busy_until = start + service;
    // Only work inside the run window counts toward accumulated processing time.
    const SimTime stop = std::min(s.busy_until, end_);
    if (stop > start) run_.servers[std::string(name(server))].processing_s += (stop - start).seconds();
    engine_.schedule(s.busy_until, server, "serve", std::move(then));
  }

  NodeId inventory_server() const {
    return cfg_.topology == LoginTopology::proxied ? kCentral : kInventory;
  }

  void on_message(NodeId at, const Message& m) {
    const LoginPayload p = *std::any_cast<const std::shared_ptr<const LoginPayload>&>(m.payload);
    if (at == kClient) return on_client(p);
    ServerLoad& load = run_.servers[std::string(name(at))];
    if (!p.response) {
      ++load.requests;
      if (p.ask == Ask::folder) ++load.inventory_requests;
    }
    const auto& c = cfg_.costs;
    const NodeId from = m.origin;

    if (at == kSim && p.response) {  // proxied response on its way back to the client
      send(kSim, kClient, p);
      return;
    }
    if (at == kSim) {
      switch (p.ask) {
        case Ask::login: {
          const double cost = c.avatar * cfg_.avatar_items / kAvatarReferenceItems;
          process(kSim, cost, [this, p] { send(kSim, kClient, reply(p)); });
          return;
        }
        case Ask::folder:
          process(kSim, c.proxy, [this, p] { send(kSim, kCentral, p); });
          return;
        case Ask::asset:
          process(kSim, c.per_asset, [this, p] { send(kSim, kCentral, p); });
          return;
        case Ask::auth:
          break;
      }
      return;
    }
    const double cost = at == kInventory ? c.inventory_serve : c.central_serve;
    process(at, cost, [this, at, from, p] { send(at, from, reply(p)); });
  }

  static LoginPayload reply(LoginPayload p) {
    p.response = true;
    return p;
  }

  void on_client(const LoginPayload& p) {
    last_response_ = engine_.now();
    switch (p.ask) {
      case Ask::auth:
        send(kClient, kSim, LoginPayload{Ask::login});
        if (cfg_.folders > 0) queue_.push_back(LoginPayload{Ask::folder, 0});
        for (int a = 0; a < cfg_.scene_assets; ++a) queue_.push_back(LoginPayload{Ask::asset});
        ++outstanding_;  // the login request
        break;
      case Ask::login:
        logged_in_ = true;
        --outstanding_;
        break;
      case Ask::folder:
        --outstanding_;
        for (int child : children_[static_cast<std::size_t>(p.folder)]) queue_.push_back(LoginPayload{Ask::folder, child});
        break;
      case Ask::asset:
        --outstanding_;
        break;
    }
    pump();
  }

  void pump() {
    while (!queue_.empty() && outstanding_ < cfg_.max_outstanding) {
      const LoginPayload next = queue_.front();
      queue_.pop_front();
      ++outstanding_;
      const NodeId to = next.ask == Ask::folder && cfg_.topology == LoginTopology::dedicated_inventory ? kInventory
                                                                                                         : kSim;
      send(kClient, to, next);
    }
  }

  const LoginExperimentConfig& cfg_;
  Engine engine_;
  Network net_;
  RandomStream jitter_;
  std::vector<std::vector<int>> children_;
  std::map<std::uint32_t, Server> servers_;
  std::deque<LoginPayload> queue_;
  int outstanding_ = 0;
  bool logged_in_ = false;
  SimTime end_;
  SimTime last_response_;
  LoginRun run_;
};

}  // namespace

LoginReport run_login(const LoginExperimentConfig& config) {
  config.validate();
  LoginReport report;
  report.config_hash = config.hash();
  report.topology = config.topology == LoginTopology::proxied ? "proxied" : "dedicated_inventory";
  for (int r = 0; r < config.repeats; ++r) {
    LoginRunModel model(config, config.seed + static_cast<std::uint64_t>(r));
    LoginRun run = model.run();
    for (const char* s : {"sim", "central", "inventory"}) {
      const ServerLoad& l = run.servers[s];
      report.samples[fmt::format("{}_processing_s", s)].push_back(l.processing_s);
      report.samples[fmt::format("{}_requests", s)].push_back(static_cast<double>(l.requests));
      report.samples[fmt::format("{}_inventory_requests", s)].push_back(static_cast<double>(l.inventory_requests));
    }
    report.samples["login_complete_s"].push_back(run.login_complete_s);
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace dve
