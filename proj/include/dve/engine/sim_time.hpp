#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>

namespace dve {

/// Span of simulated time, stored as integer microseconds so event
/// ordering never depends on floating-point rounding.
struct SimDuration {
  std::int64_t us = 0;

  static constexpr SimDuration from_us(std::int64_t v) { return {v}; }
  static constexpr SimDuration from_ms(std::int64_t v) { return {v * 1000}; }
  static SimDuration from_seconds(double s) {
    return {static_cast<std::int64_t>(std::llround(s * 1e6))};
  }
  constexpr double seconds() const { return static_cast<double>(us) / 1e6; }

  constexpr auto operator<=>(const SimDuration&) const = default;
  constexpr SimDuration operator+(SimDuration o) const { return {us + o.us}; }
  constexpr SimDuration operator-(SimDuration o) const { return {us - o.us}; }
  constexpr SimDuration operator-() const { return {-us}; }
  constexpr SimDuration& operator+=(SimDuration o) {
    us += o.us;
    return *this;
  }
};

/// A point on the engine's global timeline. Never negative.
struct SimTime {
  std::int64_t us = 0;

  static constexpr SimTime from_us(std::int64_t v) { return {v}; }
  static SimTime from_seconds(double s) {
    return {static_cast<std::int64_t>(std::llround(s * 1e6))};
  }
  constexpr double seconds() const { return static_cast<double>(us) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime operator+(SimDuration d) const { return {us + d.us}; }
  constexpr SimDuration operator-(SimTime o) const { return {us - o.us}; }
};

/// Reading of a node-local wall clock (engine time plus that node's offset).
/// May be slightly negative near the start of a run.
struct Timestamp {
  std::int64_t us = 0;

  constexpr double seconds() const { return static_cast<double>(us) / 1e6; }
  constexpr auto operator<=>(const Timestamp&) const = default;
};

struct NodeId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const NodeId&) const = default;
};

}  // namespace dve

template <>
struct std::hash<dve::NodeId> {
  std::size_t operator()(dve::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
