#pragma once

#include <cstdint>

namespace bgcd {

/// SplitMix64 output function (Steele, Lea, Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Key of stream `index` under `seed`.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ (index * kGolden + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: word i of a stream is mix64(key + (i+1) * golden).
/// Any word can be computed without the ones before it.
class CounterRng {
public:
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}
  static constexpr CounterRng for_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng(stream_key(seed, index));
  }

  constexpr std::uint64_t at(std::uint64_t i) const noexcept {
    return mix64(key_ + (i + 1) * kGolden);
  }
  constexpr std::uint64_t next() noexcept { return at(counter_++); }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on (0,1): ((w >> 11) + 0.5) * 2^-53.
  double uniform() noexcept;
  /// P(m) = 2^-m for m >= 1: one plus the leading zeros of a word, capped at 64.
  int geometric() noexcept;

private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

} // namespace bgcd
