#pragma once

#include <any>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dve/engine/engine.hpp"

namespace dve {

enum class MessageKind : std::uint8_t { update, create, remove, migrate, ack, request, response };
inline constexpr std::size_t kMessageKindCount = 7;

std::string_view to_string(MessageKind kind) noexcept;

/// Declared wire size per message kind. Updates are sized per entry, so a
/// batch of k position updates weighs k * update bytes.
struct MessageSizes {
  std::uint32_t update = 256;
  std::uint32_t create = 1024;
  std::uint32_t remove = 128;
  std::uint32_t migrate = 1024;
  std::uint32_t ack = 64;
  std::uint32_t request = 128;
  std::uint32_t response = 512;

  std::uint32_t of(MessageKind kind) const noexcept;
};

struct Message {
  MessageKind kind = MessageKind::update;
  std::uint32_t size_bytes = 1;
  NodeId origin;
  NodeId destination;
  /// Set when the message is the sole carrier of a simulated entity in transit
  /// (a create headed for the owning simulator, or a migration transfer).
  bool carries_entity = false;
  std::any payload;
};

struct LinkId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const LinkId&) const = default;
};

struct LinkSpec {
  NodeId from;
  NodeId to;
  SimDuration latency = SimDuration::from_ms(1);
  double byte_rate = 12.5e6;  // bytes per second
  SimDuration max_jitter{};   // uniform extra latency; FIFO order is still preserved
};

struct QueueSample {
  LinkId link;
  SimTime t;
  std::size_t depth = 0;
  std::uint64_t bytes_pending = 0;
};

struct LinkCounters {
  std::uint64_t msgs_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t msgs_delivered = 0;
  std::uint64_t bytes_delivered = 0;
  std::size_t max_depth = 0;
};

/// Point-to-point FIFO links on the engine timeline.
///
/// A message occupies its link's transmitter for size/byte_rate after the
/// previous one finishes, then propagates for the link latency. Queues are
/// unbounded and nothing is dropped or reordered; depth counts every message
/// sent on the link that has not been delivered yet.
class Network {
 public:
  using Handler = std::function<void(const Message&)>;

  explicit Network(Engine& engine) : engine_(engine) {}
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  LinkId add_link(const LinkSpec& spec);
  std::optional<LinkId> find_link(NodeId from, NodeId to) const;
  /// Receiver callback for messages arriving at `node`.
  void set_handler(NodeId node, Handler handler);

  /// Enqueues the message and schedules its delivery; returns the delivery time.
  SimTime send(LinkId link, Message msg);
  /// Throws UnknownLink if there is no from->to link.
  SimTime send(NodeId from, NodeId to, Message msg);

  /// Pops, in FIFO order, every message on the link whose delivery time has arrived.
  std::vector<Message> deliver_due(LinkId link);

  /// Records one sample per link at the current engine time.
  std::vector<QueueSample> sample_queues();
  const std::vector<QueueSample>& samples() const { return samples_; }

  std::size_t link_count() const { return links_.size(); }
  const LinkSpec& spec(LinkId link) const { return at(link).spec; }
  std::size_t depth(LinkId link) const { return at(link).queue.size(); }
  std::uint64_t bytes_pending(LinkId link) const { return at(link).bytes_pending; }
  const LinkCounters& counters(LinkId link) const { return at(link).counters; }
  /// Entity-carrying messages not yet delivered, over all links.
  std::uint64_t carriers_in_transit() const { return carriers_in_transit_; }
  std::uint64_t messages_in_transit() const;

 private:
  struct Queued {
    Message msg;
    SimTime enqueued_at;
    SimTime deliver_at;
  };
  struct Link {
    LinkSpec spec;
    std::deque<Queued> queue;
    SimTime busy_until;
    SimTime last_delivery;
    std::uint64_t bytes_pending = 0;
    LinkCounters counters;
    RandomStream jitter;
    std::optional<SimTime> last_sample;
  };

  Link& at(LinkId id);
  const Link& at(LinkId id) const;
  void on_delivery(LinkId id);

  Engine& engine_;
  std::vector<Link> links_;
  std::unordered_map<std::uint64_t, LinkId> by_endpoints_;
  std::unordered_map<NodeId, Handler> handlers_;
  std::vector<QueueSample> samples_;
  std::uint64_t carriers_in_transit_ = 0;
};

}  // namespace dve
