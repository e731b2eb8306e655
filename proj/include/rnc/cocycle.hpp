#pragma once

// Radon-Nikodym cocycle of the least-deletion orbit relation under a product
// measure. Along the forward geodesic,
//
//     w_x(f^k x) = prod_{i<k} m_{n_i}(0) / m_{n_i}(1),
//
// where n_0 < n_1 < ... are the positions of the 1s of x (0-based, so the
// empty product at k = 0 gives 1). For a single flip,
// w_x(b_n x) = (1 - m_n(x_n)) / m_n(x_n).

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rnc/bitspace.hpp"
#include "rnc/error.hpp"
#include "rnc/measures.hpp"
#include "rnc/rational.hpp"

namespace rnc {

/// Exact positive rational, optionally carrying its exponent in a base b
/// (value == b^log exactly) when the measure guarantees one.
class CocycleValue {
 public:
  CocycleValue() : value_(1) {}

  static CocycleValue exact(Rational value) {
    if (value <= 0) throw invalid_parameter("cocycle values are positive");
    CocycleValue c;
    c.value_ = std::move(value);
    return c;
  }

  static CocycleValue power(std::uint64_t base, std::int64_t exponent) {
    CocycleValue c;
    c.value_ = ipow(base, exponent);
    c.base_ = base;
    c.log_ = exponent;
    return c;
  }

  /// The identity, in base `base` when one is given.
  static CocycleValue one(std::optional<std::uint64_t> base) {
    return base ? power(*base, 0) : CocycleValue();
  }

  const Rational& value() const noexcept { return value_; }
  std::optional<std::int64_t> log() const noexcept { return log_; }
  std::optional<std::uint64_t> base() const noexcept { return base_; }

  CocycleValue& operator*=(const CocycleValue& other) {
    value_ *= other.value_;
    if (log_ && other.log_ && base_ == other.base_) {
      *log_ += *other.log_;
    } else {
      log_.reset();
      base_.reset();
    }
    return *this;
  }

  friend CocycleValue operator*(CocycleValue a, const CocycleValue& b) { return a *= b; }

  /// Equality of the represented number; the log annotation is not compared.
  friend bool operator==(const CocycleValue& a, const CocycleValue& b) {
    return a.value_ == b.value_;
  }

 private:
  Rational value_;
  std::optional<std::uint64_t> base_;
  std::optional<std::int64_t> log_;
};

namespace detail {

// Multiplier contributed by consuming a 1 at index n.
inline CocycleValue consumed_one(const MeasureSpec& spec, std::uint64_t n) {
  if (auto b = spec.power_base()) return CocycleValue::power(*b, spec.exponent_at(n));
  return CocycleValue::exact(spec.ratio_at(n));
}

}  // namespace detail

/// w_x(b_n x) = (1 - m_n(x_n)) / m_n(x_n).
inline CocycleValue flip_weight(const MeasureSpec& spec, const BitSequence& x, std::uint64_t n) {
  const unsigned a = x.bit(n);
  const Marginal& m = spec.marginal_at(n);
  if (auto b = spec.power_base()) {
    const std::int64_t e = spec.exponent_at(n);
    return CocycleValue::power(*b, a ? e : -e);
  }
  return CocycleValue::exact(m.prob(1 - a) / m.prob(a));
}

/// w_x(f^k x): product of m(0)/m(1) over the first k ones of x.
inline CocycleValue geodesic_cocycle(const MeasureSpec& spec, const BitSequence& x,
                                     std::uint64_t k) {
  CocycleValue w = CocycleValue::one(spec.power_base());
  std::uint64_t from = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t n = x.next_one(from);
    w *= detail::consumed_one(spec, n);
    from = n + 1;
  }
  return w;
}

/// The lazy cocycle sequence C~_0, ..., C~_k: C~_0 = 1 and
/// C~_{t+1} = ratio_at(t) * C~_t if x_t = 1, else C~_t.
inline std::vector<CocycleValue> lazy_cocycle_sequence(const MeasureSpec& spec,
                                                       const BitSequence& x, std::uint64_t k) {
  std::vector<CocycleValue> out;
  out.reserve(k + 1);
  out.push_back(CocycleValue::one(spec.power_base()));
  for (std::uint64_t t = 0; t < k; ++t) {
    CocycleValue next = out.back();
    if (x.bit(t)) next *= detail::consumed_one(spec, t);
    out.push_back(std::move(next));
  }
  return out;
}

/// C~_k.
inline CocycleValue lazy_cocycle(const MeasureSpec& spec, const BitSequence& x, std::uint64_t k) {
  CocycleValue w = CocycleValue::one(spec.power_base());
  for (std::uint64_t t = 0; t < k; ++t) {
    if (x.bit(t)) w *= detail::consumed_one(spec, t);
  }
  return w;
}

/// L_t = log_base C~_t for t = 0..steps, as exact integers.
inline std::vector<std::int64_t> log_walk(const MeasureSpec& spec, const BitSequence& x,
                                          std::uint64_t steps, std::uint64_t base) {
  if (!spec.power_compatible(base)) {
    throw not_power_compatible("measure ratios are not all integer powers of " +
                               std::to_string(base));
  }
  std::vector<std::int64_t> walk;
  walk.reserve(steps + 1);
  std::int64_t level = 0;
  walk.push_back(level);
  for (std::uint64_t t = 0; t < steps; ++t) {
    if (x.bit(t)) level += spec.log_ratio_at(t, base);
    walk.push_back(level);
  }
  return walk;
}

/// w_x(f^{k+m} x) == w_x(f^k x) * w_{f^k x}(f^m f^k x), evaluated exactly.
inline bool chain_rule_check(const MeasureSpec& spec, const BitSequence& x, std::uint64_t k,
                             std::uint64_t m) {
  const CocycleValue whole = geodesic_cocycle(spec, x, k + m);
  const BitSequence y = iterate_least_deletion(x, k);
  const CocycleValue split = geodesic_cocycle(spec, x, k) * geodesic_cocycle(spec, y, m);
  return whole == split;
}

// ---------------------------------------------------------------------------
// Traces

struct TraceEntry {
  std::uint64_t k = 0;
  std::optional<std::uint64_t> flipped_position;  // absent on the start row
  CocycleValue value;
  Rational partial_sum;  // sum_{1 <= i <= k} w_x(f^i x)
};

struct GeodesicTrace {
  BitSequence start;
  std::vector<TraceEntry> entries;

  const Rational& partial_sum() const { return entries.back().partial_sum; }
};

inline GeodesicTrace geodesic_trace(const MeasureSpec& spec, const BitSequence& x,
                                    std::uint64_t k) {
  GeodesicTrace trace{x, {}};
  trace.entries.reserve(k + 1);
  trace.entries.push_back({0, std::nullopt, CocycleValue::one(spec.power_base()), Rational(0)});
  std::uint64_t from = 0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t n = x.next_one(from);
    const TraceEntry& prev = trace.entries.back();
    CocycleValue w = prev.value * detail::consumed_one(spec, n);
    Rational sum = prev.partial_sum + w.value();
    trace.entries.push_back({i, n, std::move(w), std::move(sum)});
    from = n + 1;
  }
  return trace;
}

inline void write_trace_csv(const GeodesicTrace& trace, std::ostream& out) {
  out << "k,flipped_position,value_numerator,value_denominator,log_value_if_dyadic,partial_sum\n";
  for (const auto& e : trace.entries) {
    out << e.k << ',';
    if (e.flipped_position) out << *e.flipped_position;
    out << ',' << numerator_of(e.value.value()) << ',' << denominator_of(e.value.value()) << ',';
    if (e.value.log()) out << *e.value.log();
    out << ',' << to_decimal_string(e.partial_sum) << '\n';
  }
}

}  // namespace rnc
