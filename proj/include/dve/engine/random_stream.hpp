#pragma once

#include <cstdint>
#include <string_view>

namespace dve {

/// 64-bit FNV-1a, used for stream naming and for stable digests.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n) noexcept;
  /// Integers and doubles are fed little-endian regardless of host order.
  void add(std::uint64_t v) noexcept;
  void add(std::int64_t v) noexcept { add(static_cast<std::uint64_t>(v)); }
  void add(double v) noexcept;
  void add(std::string_view s) noexcept {
    add(static_cast<std::uint64_t>(s.size()));
    add_bytes(s.data(), s.size());
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// Seeded SplitMix64 sequence. State is a single word, so per-entity streams
/// are cheap to create and can travel with an entity between nodes.
///
/// Outputs depend only on (seed, stream name, index, draw count), never on
/// platform or on how many other streams exist.
class RandomStream {
 public:
  RandomStream() = default;
  RandomStream(std::uint64_t seed, std::string_view stream_id, std::uint64_t index = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t draws_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace dve
