#include "dve/engine/random_stream.hpp"

#include <bit>

namespace dve {

void Fnv1a::add_bytes(const void* data, std::size_t n) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add(std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) {
    h_ ^= static_cast<unsigned char>(v >> (8 * i));
    h_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add(double v) noexcept { add(std::bit_cast<std::uint64_t>(v)); }

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view stream_id, std::uint64_t index) noexcept {
  Fnv1a h;
  h.add(stream_id);
  h.add(index);
  state_ = splitmix64_mix(seed ^ splitmix64_mix(h.value()));
}

std::uint64_t RandomStream::next_u64() noexcept {
  ++draws_;
  state_ += 0x9e3779b97f4a7c15ULL;
  return splitmix64_mix(state_);
}

}  // namespace dve
