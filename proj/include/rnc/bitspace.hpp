#pragma once

// Points of Cantor space with infinitely many 1s, the least-deletion map f
// (turn the first 1 into a 0), the bit-flip involutions b_n, and forward
// geodesics x, fx, f^2x, ...

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/measures.hpp"
#include "rnc/prefix.hpp"

namespace rnc {

/// Default materialization cap: 2^26 indices.
inline constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 26;

/// Parses a seed written in decimal or as 0x-prefixed hex.
inline std::uint64_t parse_seed(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw invalid_parameter("malformed seed: '" + std::string(text) + "'");
  }
  return value;
}

/// An explicit prefix followed by a lazy tail sampled from `measure`.
///
/// Bit n >= prefix().size() is sample_bit(measure, n, seed): a pure function,
/// so reads can happen in any order and from several threads. The only
/// mutable state is the materialization frontier, kept as an atomic maximum.
class BitSequence {
 public:
  BitSequence(BitPrefix prefix, std::uint64_t seed, std::shared_ptr<const MeasureSpec> measure,
              std::uint64_t cap = kDefaultCap)
      : prefix_(std::move(prefix)),
        seed_(seed),
        measure_(std::move(measure)),
        cap_(cap),
        generated_upto_(prefix_.size()) {
    if (!measure_) throw invalid_parameter("BitSequence needs a measure");
  }

  BitSequence(const BitSequence& other)
      : prefix_(other.prefix_),
        seed_(other.seed_),
        measure_(other.measure_),
        cap_(other.cap_),
        generated_upto_(other.generated_upto()) {}

  BitSequence& operator=(const BitSequence& other) {
    if (this != &other) {
      prefix_ = other.prefix_;
      seed_ = other.seed_;
      measure_ = other.measure_;
      cap_ = other.cap_;
      generated_upto_.store(other.generated_upto(), std::memory_order_relaxed);
    }
    return *this;
  }

  BitSequence(BitSequence&& other) noexcept
      : prefix_(std::move(other.prefix_)),
        seed_(other.seed_),
        measure_(std::move(other.measure_)),
        cap_(other.cap_),
        generated_upto_(other.generated_upto()) {}

  BitSequence& operator=(BitSequence&& other) noexcept {
    prefix_ = std::move(other.prefix_);
    seed_ = other.seed_;
    measure_ = std::move(other.measure_);
    cap_ = other.cap_;
    generated_upto_.store(other.generated_upto(), std::memory_order_relaxed);
    return *this;
  }

  unsigned bit(std::uint64_t n) const {
    if (n < prefix_.size()) return prefix_[n];
    if (n >= cap_) throw cap_exceeded(cap_);
    note_materialized(n + 1);
    return sample_bit(*measure_, n, seed_);
  }

  unsigned operator[](std::uint64_t n) const { return bit(n); }

  /// Smallest index >= from holding a 1.
  std::uint64_t next_one(std::uint64_t from) const {
    const auto& bits = prefix_.bits();
    if (from < bits.size()) {
      auto it = std::find(bits.begin() + static_cast<std::ptrdiff_t>(from), bits.end(), 1);
      if (it != bits.end()) return static_cast<std::uint64_t>(it - bits.begin());
      from = bits.size();
    }
    const MeasureSpec& spec = *measure_;
    const CounterStream words(seed_);
    for (std::uint64_t n = from; n < cap_; ++n) {
      if (words(n) < spec.threshold_at(n)) {
        note_materialized(n + 1);
        return n;
      }
    }
    note_materialized(cap_);
    throw cap_exceeded(cap_);
  }

  /// Copy whose explicit prefix covers [0, length), with bit `flip` inverted.
  BitSequence with_flip(std::uint64_t flip) const {
    if (flip >= cap_) throw cap_exceeded(cap_);
    std::vector<std::uint8_t> bits = prefix_.bits();
    for (std::uint64_t n = bits.size(); n <= flip; ++n) {
      bits.push_back(static_cast<std::uint8_t>(bit(n)));
    }
    bits[flip] ^= 1U;
    return BitSequence(BitPrefix(std::move(bits)), seed_, measure_, cap_);
  }

  const BitPrefix& prefix() const noexcept { return prefix_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const MeasureSpec& measure() const noexcept { return *measure_; }
  const std::shared_ptr<const MeasureSpec>& measure_ptr() const noexcept { return measure_; }
  std::uint64_t cap() const noexcept { return cap_; }
  std::uint64_t generated_upto() const noexcept {
    return generated_upto_.load(std::memory_order_relaxed);
  }

  /// The first `length` bits as an explicit word.
  BitPrefix materialize(std::uint64_t length) const {
    std::vector<std::uint8_t> bits;
    bits.reserve(length);
    for (std::uint64_t n = 0; n < length; ++n) bits.push_back(static_cast<std::uint8_t>(bit(n)));
    return BitPrefix(std::move(bits));
  }

 private:
  void note_materialized(std::uint64_t upto) const noexcept {
    auto seen = generated_upto_.load(std::memory_order_relaxed);
    while (seen < upto &&
           !generated_upto_.compare_exchange_weak(seen, upto, std::memory_order_relaxed)) {
    }
  }

  BitPrefix prefix_;
  std::uint64_t seed_;
  std::shared_ptr<const MeasureSpec> measure_;
  std::uint64_t cap_;
  mutable std::atomic<std::uint64_t> generated_upto_;
};

/// Convenience constructor sharing a copy of `spec`.
inline BitSequence make_sequence(std::string_view prefix, std::uint64_t seed,
                                 const MeasureSpec& spec, std::uint64_t cap = kDefaultCap) {
  return BitSequence(BitPrefix::parse(prefix), seed, std::make_shared<const MeasureSpec>(spec),
                     cap);
}

/// Bitwise agreement on [begin, end). Points are infinite, so this is the only
/// equality offered.
inline bool agree_on(const BitSequence& a, const BitSequence& b, std::uint64_t begin,
                     std::uint64_t end) {
  for (std::uint64_t n = begin; n < end; ++n) {
    if (a.bit(n) != b.bit(n)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

/// min{n : x_n = 1}.
inline std::uint64_t first_one_index(const BitSequence& x) { return x.next_one(0); }

/// f(x): x with its first 1 turned into a 0. Shares seed and measure with x.
inline BitSequence least_deletion(const BitSequence& x) {
  return x.with_flip(first_one_index(x));
}

/// b_n(x).
inline BitSequence bit_flip(const BitSequence& x, std::uint64_t n) { return x.with_flip(n); }

struct GeodesicStep {
  std::uint64_t step_index;        // k, starting at 1
  std::uint64_t flipped_position;  // the 1 consumed by the k-th application of f

  friend bool operator==(const GeodesicStep&, const GeodesicStep&) = default;
};

/// Positions flipped by f, f^2, ..., f^k, found by actually iterating f.
inline std::vector<GeodesicStep> forward_geodesic(const BitSequence& x, std::uint64_t k) {
  std::vector<GeodesicStep> steps;
  steps.reserve(k);
  BitSequence y = x;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t n = first_one_index(y);
    steps.push_back({i, n});
    y = y.with_flip(n);
  }
  return steps;
}

/// f^k(x).
inline BitSequence iterate_least_deletion(const BitSequence& x, std::uint64_t k) {
  BitSequence y = x;
  for (std::uint64_t i = 0; i < k; ++i) y = least_deletion(y);
  return y;
}

/// The first k indices where x is 1, increasing.
inline std::vector<std::uint64_t> ones_positions(const BitSequence& x, std::uint64_t k) {
  std::vector<std::uint64_t> out;
  out.reserve(k);
  std::uint64_t from = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t n = x.next_one(from);
    out.push_back(n);
    from = n + 1;
  }
  return out;
}

}  // namespace rnc
