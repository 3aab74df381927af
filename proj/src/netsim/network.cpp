#include "dve/netsim/network.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

namespace {

std::uint64_t endpoint_key(NodeId from, NodeId to) {
  return (static_cast<std::uint64_t>(from.value) << 32) | to.value;
}

}  // namespace

std::string_view to_string(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::update: return "update";
    case MessageKind::create: return "create";
    case MessageKind::remove: return "delete";
    case MessageKind::migrate: return "migrate";
    case MessageKind::ack: return "ack";
    case MessageKind::request: return "request";
    case MessageKind::response: return "response";
  }
  return "unknown";
}

std::uint32_t MessageSizes::of(MessageKind kind) const noexcept {
  switch (kind) {
    case MessageKind::update: return update;
    case MessageKind::create: return create;
    case MessageKind::remove: return remove;
    case MessageKind::migrate: return migrate;
    case MessageKind::ack: return ack;
    case MessageKind::request: return request;
    case MessageKind::response: return response;
  }
  return 1;
}

LinkId Network::add_link(const LinkSpec& spec) {
  if (spec.latency.us < 0 || !(spec.byte_rate > 0) || spec.max_jitter.us < 0) {
    throw Error(ErrorCode::InvalidParameter, "link needs latency >= 0, byte_rate > 0, jitter >= 0");
  }
  const auto key = endpoint_key(spec.from, spec.to);
  if (by_endpoints_.contains(key)) {
    throw Error(ErrorCode::InvalidParameter, fmt::format("duplicate link {}->{}", spec.from.value, spec.to.value));
  }
  const LinkId id{static_cast<std::uint32_t>(links_.size())};
  Link link;
  link.spec = spec;
  link.jitter = engine_.stream("link-jitter", id.value);
  links_.push_back(std::move(link));
  by_endpoints_.emplace(key, id);
  return id;
}

std::optional<LinkId> Network::find_link(NodeId from, NodeId to) const {
  auto it = by_endpoints_.find(endpoint_key(from, to));
  if (it == by_endpoints_.end()) return std::nullopt;
  return it->second;
}

void Network::set_handler(NodeId node, Handler handler) { handlers_[node] = std::move(handler); }

Network::Link& Network::at(LinkId id) {
  if (id.value >= links_.size()) throw Error(ErrorCode::UnknownLink, fmt::format("link {}", id.value));
  return links_[id.value];
}

const Network::Link& Network::at(LinkId id) const {
  if (id.value >= links_.size()) throw Error(ErrorCode::UnknownLink, fmt::format("link {}", id.value));
  return links_[id.value];
}

SimTime Network::send(NodeId from, NodeId to, Message msg) {
  auto link = find_link(from, to);
  if (!link) throw Error(ErrorCode::UnknownLink, fmt::format("no link {}->{}", from.value, to.value));
  return send(*link, std::move(msg));
}

SimTime Network::send(LinkId id, Message msg) {
  Link& link = at(id);
  if (msg.size_bytes == 0) throw Error(ErrorCode::InvalidParameter, "message size must be positive");
  const SimTime now = engine_.now();
  const auto tx_us = static_cast<std::int64_t>(std::ceil(static_cast<double>(msg.size_bytes) * 1e6 / link.spec.byte_rate));
  const SimTime start = std::max(now, link.busy_until);
  link.busy_until = start + SimDuration::from_us(tx_us);
  SimDuration jitter{};
  if (link.spec.max_jitter.us > 0) {
    jitter = SimDuration::from_us(
        static_cast<std::int64_t>(link.jitter.uniform() * static_cast<double>(link.spec.max_jitter.us + 1)));
  }
  const SimTime deliver_at = std::max(link.busy_until + link.spec.latency + jitter, link.last_delivery);
  link.last_delivery = deliver_at;

  link.bytes_pending += msg.size_bytes;
  link.counters.msgs_sent += 1;
  link.counters.bytes_sent += msg.size_bytes;
  if (msg.carries_entity) ++carriers_in_transit_;
  const auto kind = msg.kind;
  link.queue.push_back(Queued{std::move(msg), now, deliver_at});
  link.counters.max_depth = std::max(link.counters.max_depth, link.queue.size());

  engine_.schedule(deliver_at, link.spec.to, to_string(kind), [this, id] { on_delivery(id); });
  return deliver_at;
}

std::vector<Message> Network::deliver_due(LinkId id) {
  Link& link = at(id);
  std::vector<Message> out;
  const SimTime now = engine_.now();
  while (!link.queue.empty() && link.queue.front().deliver_at <= now) {
    Queued q = std::move(link.queue.front());
    link.queue.pop_front();
    link.bytes_pending -= q.msg.size_bytes;
    link.counters.msgs_delivered += 1;
    link.counters.bytes_delivered += q.msg.size_bytes;
    if (q.msg.carries_entity) --carriers_in_transit_;
    out.push_back(std::move(q.msg));
  }
  return out;
}

void Network::on_delivery(LinkId id) {
  const NodeId to = at(id).spec.to;
  auto due = deliver_due(id);
  if (due.empty()) return;
  auto it = handlers_.find(to);
  if (it == handlers_.end()) return;
  for (const auto& msg : due) it->second(msg);
}

std::vector<QueueSample> Network::sample_queues() {
  std::vector<QueueSample> out;
  const SimTime now = engine_.now();
  for (std::uint32_t i = 0; i < links_.size(); ++i) {
    Link& link = links_[i];
    QueueSample s{LinkId{i}, now, link.queue.size(), link.bytes_pending};
    out.push_back(s);
    if (!link.last_sample || *link.last_sample < now) {
      samples_.push_back(s);
      link.last_sample = now;
    }
  }
  return out;
}

std::uint64_t Network::messages_in_transit() const {
  std::uint64_t n = 0;
  for (const auto& l : links_) n += l.queue.size();
  return n;
}

}  // namespace dve
