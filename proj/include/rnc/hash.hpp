#pragma once

// Counter-mode pseudorandomness: every draw is a pure function of
// (seed, counter), so lazy bits can be read in any order.

#include <cstdint>

namespace rnc {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// The words counter_word(seed, 0), counter_word(seed, 1), ... with the
/// per-seed mixing done once.
class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t seed) noexcept
      : key_(mix64(seed ^ 0x5851F42D4C957F2DULL)) {}
  constexpr std::uint64_t operator()(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGolden);
  }

 private:
  std::uint64_t key_;
};

/// Uniform 64-bit word attached to (seed, counter).
constexpr std::uint64_t counter_word(std::uint64_t seed, std::uint64_t counter) noexcept {
  return CounterStream(seed)(counter);
}

/// Uniform word for a tagged stream, kept disjoint from the index stream.
constexpr std::uint64_t tagged_word(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t counter) noexcept {
  return counter_word(mix64(seed + tag * 0xD1B54A32D192ED03ULL) ^ 0xA0761D6478BD642FULL,
                      counter);
}

/// Per-path seed derived from a master seed (splittable: path i never depends
/// on how many other paths exist).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path) noexcept {
  return mix64(master + (path + 1) * kGolden);
}

/// Uniform double in [0, 1) built from the top 53 bits.
constexpr double to_unit(std::uint64_t word) noexcept {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Sequential draws from one counter stream, for test-case generation.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : words_(seed) {}

  std::uint64_t next() noexcept { return words_(counter_++); }

  /// Uniform in [0, bound), bound > 0 (multiply-shift; bias below 2^-32 for small bounds).
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
  }

 private:
  CounterStream words_;
  std::uint64_t counter_ = 0;
};

}  // namespace rnc
