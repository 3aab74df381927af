#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dve/engine/random_stream.hpp"
#include "dve/engine/sim_time.hpp"

namespace dve {

/// A node's view of wall-clock time: the global timeline shifted by a
/// constant offset bounded by the engine's configured skew limit.
struct NodeClock {
  NodeId node;
  SimDuration offset;
};

struct EventHandle {
  std::uint64_t seq = 0;
};

struct EngineOptions {
  std::uint64_t seed = 1;
  SimDuration max_clock_skew = SimDuration::from_ms(50);
};

struct EngineStats {
  std::uint64_t events_processed = 0;  // during the run_until call
  std::uint64_t total_processed = 0;
  SimTime now;
  std::uint64_t log_hash = 0;  // hash over every (time, seq, target, kind) processed so far

  bool operator==(const EngineStats&) const = default;
};

/// Single-threaded discrete-event scheduler. Events fire in strict
/// (fire_at, seq) order, where seq is assigned at scheduling time.
class Engine {
 public:
  using Action = std::function<void()>;

  explicit Engine(EngineOptions options = {});

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Throws SchedulingInPast if `at` precedes the current time.
  EventHandle schedule(SimTime at, NodeId target, std::string_view kind, Action action);
  EventHandle schedule_after(SimDuration delay, NodeId target, std::string_view kind, Action action) {
    return schedule(now_ + delay, target, kind, std::move(action));
  }
  /// Returns false if the event already fired or was never scheduled.
  bool cancel(EventHandle handle);

  /// Processes all events with fire_at <= t_end. Afterwards the engine time is
  /// t_end when later events remain queued, or the last processed event's
  /// time when the queue drained.
  EngineStats run_until(SimTime t_end);
  /// Stop processing as soon as the current event returns.
  void request_stop() { stop_requested_ = true; }

  SimTime now() const { return now_; }
  bool idle() const { return queue_.size() == cancelled_.size(); }
  std::size_t pending() const { return queue_.size() - cancelled_.size(); }

  NodeClock make_clock(NodeId node, SimDuration offset) const;
  Timestamp local_now(const NodeClock& clock) const { return {now_.us + clock.offset.us}; }
  SimDuration max_clock_skew() const { return options_.max_clock_skew; }

  /// Stream derived from the engine seed; distinct names give independent sequences.
  RandomStream stream(std::string_view name, std::uint64_t index = 0) const {
    return RandomStream(options_.seed, name, index);
  }
  std::uint64_t seed() const { return options_.seed; }

  /// Optional newline-delimited log: "<time_us> <seq> <target> <kind>".
  void set_event_log(std::ostream* out) { log_ = out; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    NodeId target;
    std::string kind;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
    }
  };

  EngineOptions options_;
  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t total_processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> live_;
  Fnv1a log_hash_;
  std::ostream* log_ = nullptr;
  bool stop_requested_ = false;
};

}  // namespace dve
