#include "dve/engine/engine.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "dve/error.hpp"

namespace dve {

Engine::Engine(EngineOptions options) : options_(options) {
  if (options_.max_clock_skew.us < 0) {
    throw Error(ErrorCode::InvalidParameter, "max clock skew must be non-negative");
  }
}

EventHandle Engine::schedule(SimTime at, NodeId target, std::string_view kind, Action action) {
  if (at < now_) {
    throw Error(ErrorCode::SchedulingInPast,
                fmt::format("fire_at {}us precedes engine time {}us", at.us, now_.us));
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push(Event{at, seq, target, std::string(kind), std::move(action)});
  live_.insert(seq);
  return EventHandle{seq};
}

bool Engine::cancel(EventHandle handle) {
  if (live_.erase(handle.seq) == 0) return false;
  cancelled_.insert(handle.seq);
  return true;
}

EngineStats Engine::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw Error(ErrorCode::SchedulingInPast, "run_until target precedes engine time");
  }
  stop_requested_ = false;
  std::uint64_t processed = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t_end && !stop_requested_) {
    // priority_queue::top is const; the event is moved out before pop.
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    if (cancelled_.erase(ev.seq) != 0) continue;
    live_.erase(ev.seq);
    now_ = ev.fire_at;
    log_hash_.add(ev.fire_at.us);
    log_hash_.add(ev.seq);
    log_hash_.add(static_cast<std::uint64_t>(ev.target.value));
    log_hash_.add(ev.kind);
    if (log_ != nullptr) {
      *log_ << ev.fire_at.us << ' ' << ev.seq << ' ' << ev.target.value << ' ' << ev.kind << '\n';
    }
    ++processed;
    ++total_processed_;
    if (ev.action) ev.action();
  }
  while (!queue_.empty() && cancelled_.contains(queue_.top().seq)) {
    cancelled_.erase(queue_.top().seq);
    queue_.pop();
  }
  if (!queue_.empty() && !stop_requested_) now_ = t_end;
  return EngineStats{processed, total_processed_, now_, log_hash_.value()};
}

NodeClock Engine::make_clock(NodeId node, SimDuration offset) const {
  if (std::llabs(offset.us) > options_.max_clock_skew.us) {
    throw Error(ErrorCode::ClockSkewOutOfBounds,
                fmt::format("offset {}us exceeds bound {}us", offset.us, options_.max_clock_skew.us));
  }
  return NodeClock{node, offset};
}

}  // namespace dve
