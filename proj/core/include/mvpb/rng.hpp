#pragma once

#include <cstdint>

namespace mvpb {

/// 64-bit finalizer (splitmix64). Bijective, well-mixed.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Counter-based draw: a pure function of (key, counter). Draw i of a stream
/// never depends on draws 0..i-1, so parallel generation is order-independent
/// and any draw can be recomputed in isolation.
constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + 0x9e3779b97f4a7c15ull * (counter + 1));
}

/// Derive an independent stream key from a master seed and a task id.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t task_id) noexcept {
  return mix64(seed ^ mix64(task_id + 0x9e3779b97f4a7c15ull));
}

/// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
constexpr double unit_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential view over a counter-based stream. Copyable; each logical task
/// should own its stream, derived from (master seed, task id).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t task_id = 0) noexcept
      : key_(derive_key(seed, task_id)) {}

  std::uint64_t next_u64() noexcept { return counter_bits(key_, counter_++); }
  double next_unit() noexcept { return unit_from_bits(next_u64()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mvpb
