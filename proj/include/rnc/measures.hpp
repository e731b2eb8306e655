#pragma once

// Bernoulli product measures on 2^N given by a rule n -> (m_n(0), m_n(1)).
//
// Three families are provided:
//   * periodic(j): residue-class rule with period j >= 3; make_period_j(j)
//     builds the oscillating family (1/j, (j-1)/j) at residue 0 and
//     ((j-1)/j, 1/j) elsewhere.
//   * sparse: fair coins except at the schedule n_1 < n_2 < ..., where
//     m_{n_k} = (1/(2^k+1), 2^k/(2^k+1)).
//   * custom: explicit head followed by a periodic tail.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/prefix.hpp"
#include "rnc/rational.hpp"

namespace rnc {

/// One coordinate's law. p0 + p1 == 1 with both strictly inside (0, 1).
class Marginal {
 public:
  static Marginal make(Rational p0, Rational p1) {
    if (p0 + p1 != 1) {
      throw invalid_parameter("marginal probabilities " + to_string(p0) + " and " +
                              to_string(p1) + " do not sum to 1");
    }
    if (p0 <= 0 || p1 <= 0) {
      throw invalid_parameter("marginal probabilities must be strictly positive");
    }
    return Marginal(std::move(p0), std::move(p1));
  }

  static Marginal fair() { return make(Rational(1, 2), Rational(1, 2)); }

  /// (1/d, (d-1)/d) style marginal from P(1).
  static Marginal from_p1(const Rational& p1) { return make(1 - p1, p1); }

  const Rational& p0() const noexcept { return p0_; }
  const Rational& p1() const noexcept { return p1_; }
  const Rational& prob(unsigned bit) const noexcept { return bit ? p1_ : p0_; }

  /// m(0)/m(1).
  Rational ratio() const { return p0_ / p1_; }

  /// A uniform 64-bit word u yields the bit 1 iff u < threshold().
  /// threshold() == ceil(p1 * 2^64), clamped into [1, 2^64 - 1].
  std::uint64_t threshold() const noexcept { return threshold_; }

  friend bool operator==(const Marginal& a, const Marginal& b) {
    return a.p0_ == b.p0_ && a.p1_ == b.p1_;
  }

 private:
  Marginal(Rational p0, Rational p1) : p0_(std::move(p0)), p1_(std::move(p1)) {
    const BigInt scaled = numerator_of(p1_) << 64;
    const BigInt den = denominator_of(p1_);
    BigInt t = scaled / den;
    if (scaled % den != 0) ++t;
    const BigInt max = std::numeric_limits<std::uint64_t>::max();
    if (t > max) t = max;
    if (t < 1) t = 1;
    threshold_ = t.convert_to<std::uint64_t>();
  }

  Rational p0_;
  Rational p1_;
  std::uint64_t threshold_ = 0;
};

// ---------------------------------------------------------------------------
// Sparse schedule

/// n_1. n_0 = 0 is not part of the schedule and the recurrence starts at k=1,
/// so n_1 is a free choice; this is the smallest strictly increasing one.
inline constexpr std::uint64_t kSparseFirstIndex = 1;

/// p_k = 2^{1 + 2 + ... + k}.
inline BigInt sparse_p(unsigned k) { return pow2_int(std::uint64_t{k} * (k + 1) / 2); }

/// log2 p_k = k(k+1)/2.
constexpr std::uint64_t sparse_log2_p(unsigned k) { return std::uint64_t{k} * (k + 1) / 2; }

/// Block length n_{k+1} - n_k = p_k^k.
inline BigInt sparse_gap(unsigned k) { return pow2_int(k * sparse_log2_p(k)); }

/// n_k for k >= 1 (n_0 = 0).
inline BigInt sparse_n(unsigned k) {
  if (k == 0) return 0;
  BigInt n = kSparseFirstIndex;
  for (unsigned i = 1; i < k; ++i) n += sparse_gap(i);
  return n;
}

/// Marginal at n_k: (1/(2^k+1), 2^k/(2^k+1)).
inline Marginal sparse_special_marginal(unsigned k) {
  const BigInt two_k = pow2_int(k);
  return Marginal::make(Rational(BigInt(1), two_k + 1), Rational(two_k, two_k + 1));
}

/// Schedule entries whose index fits in 64 bits (k = 1..5).
inline const std::vector<std::pair<std::uint64_t, unsigned>>& sparse_indices_u64() {
  static const auto table = [] {
    std::vector<std::pair<std::uint64_t, unsigned>> t;
    for (unsigned k = 1;; ++k) {
      const BigInt n = sparse_n(k);
      if (n > std::numeric_limits<std::uint64_t>::max()) break;
      t.emplace_back(n.convert_to<std::uint64_t>(), k);
    }
    return t;
  }();
  return table;
}

/// k with n == n_k, if n is on the schedule.
inline std::optional<unsigned> sparse_index_of(std::uint64_t n) {
  for (const auto& [nk, k] : sparse_indices_u64()) {
    if (nk == n) return k;
    if (nk > n) break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MeasureSpec

enum class MeasureKind { periodic, sparse, custom };

inline const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::periodic: return "periodic";
    case MeasureKind::sparse: return "sparse";
    case MeasureKind::custom: return "custom";
  }
  return "?";
}

class MeasureSpec {
 public:
  /// Residue class r (mod residues.size()) gets residues[r]. Period must be >= 3.
  static MeasureSpec periodic(std::vector<Marginal> residues) {
    if (residues.size() < 3) throw invalid_parameter("periodic measures need period j >= 3");
    MeasureSpec s(MeasureKind::periodic);
    s.head_ = {};
    s.tail_ = std::move(residues);
    s.finish(std::nullopt);
    return s;
  }

  static MeasureSpec sparse() {
    MeasureSpec s(MeasureKind::sparse);
    s.tail_ = {Marginal::fair()};
    s.finish(2);
    return s;
  }

  /// Index n < head.size() uses head[n]; later indices cycle through tail.
  /// `base` declares the power base for log-domain walks; when absent it is
  /// inferred from the ratios if possible.
  static MeasureSpec custom(std::vector<Marginal> head, std::vector<Marginal> tail,
                            std::optional<std::uint64_t> base = std::nullopt) {
    if (tail.empty()) throw invalid_parameter("custom measures need a nonempty periodic tail");
    MeasureSpec s(MeasureKind::custom);
    s.head_ = std::move(head);
    s.tail_ = std::move(tail);
    s.declared_base_ = base;
    s.finish(base);
    return s;
  }

  MeasureKind kind() const noexcept { return kind_; }

  /// Period of a periodic spec, 0 otherwise.
  std::uint64_t period() const noexcept {
    return kind_ == MeasureKind::periodic ? tail_.size() : 0;
  }
  const std::vector<Marginal>& residues() const noexcept { return tail_; }
  const std::vector<Marginal>& head() const noexcept { return head_; }
  const std::vector<Marginal>& tail() const noexcept { return tail_; }
  std::optional<std::uint64_t> declared_base() const noexcept { return declared_base_; }

  const Marginal& marginal_at(std::uint64_t n) const {
    switch (kind_) {
      case MeasureKind::periodic:
        return tail_[n % tail_.size()];
      case MeasureKind::sparse:
        if (auto k = sparse_index_of(n)) return special_[*k - 1];
        return tail_[0];
      case MeasureKind::custom:
        if (n < head_.size()) return head_[n];
        return tail_[(n - head_.size()) % tail_.size()];
    }
    return tail_[0];
  }

  Rational ratio_at(std::uint64_t n) const { return marginal_at(n).ratio(); }

  std::uint64_t threshold_at(std::uint64_t n) const { return marginal_at(n).threshold(); }

  /// Base b such that every ratio m_n(0)/m_n(1) is an integer power of b.
  std::optional<std::uint64_t> power_base() const noexcept { return base_; }

  bool power_compatible(std::uint64_t base) const {
    if (base < 2) return false;
    auto ok = [&](const Marginal& m) { return exact_log(m.ratio(), base).has_value(); };
    bool all = std::all_of(head_.begin(), head_.end(), ok) &&
               std::all_of(tail_.begin(), tail_.end(), ok);
    if (kind_ == MeasureKind::sparse) all = all && base == 2;
    return all;
  }

  /// Integer e with ratio_at(n) == base^e.
  std::int64_t log_ratio_at(std::uint64_t n, std::uint64_t base) const {
    if (base_ && *base_ == base) return exponent_at(n);
    auto e = exact_log(ratio_at(n), base);
    if (!e) {
      throw not_power_compatible("ratio " + to_string(ratio_at(n)) + " at index " +
                                 std::to_string(n) + " is not a power of " +
                                 std::to_string(base));
    }
    return *e;
  }

  /// Exponent of ratio_at(n) in power_base(); table lookup, no big-integer work.
  std::int64_t exponent_at(std::uint64_t n) const {
    if (!base_) throw not_power_compatible("measure has no power base");
    switch (kind_) {
      case MeasureKind::periodic:
        return tail_exp_[n % tail_exp_.size()];
      case MeasureKind::sparse:
        if (auto k = sparse_index_of(n)) return -static_cast<std::int64_t>(*k);
        return 0;
      case MeasureKind::custom:
        if (n < head_exp_.size()) return head_exp_[n];
        return tail_exp_[(n - head_exp_.size()) % tail_exp_.size()];
    }
    return 0;
  }

  friend bool operator==(const MeasureSpec& a, const MeasureSpec& b) {
    return a.kind_ == b.kind_ && a.head_ == b.head_ && a.tail_ == b.tail_ &&
           a.declared_base_ == b.declared_base_;
  }

 private:
  explicit MeasureSpec(MeasureKind kind) : kind_(kind) {}

  void finish(std::optional<std::uint64_t> base) {
    if (kind_ == MeasureKind::sparse) {
      for (const auto& entry : sparse_indices_u64()) {
        special_.push_back(sparse_special_marginal(entry.second));
      }
    }
    if (!base) base = infer_base();
    if (base && !power_compatible(*base)) {
      if (declared_base_) {
        throw invalid_parameter("declared base " + std::to_string(*base) +
                                " does not match the measure's ratios");
      }
      base.reset();
    }
    base_ = base;
    if (base_ && kind_ != MeasureKind::sparse) {
      for (const auto& m : head_) head_exp_.push_back(*exact_log(m.ratio(), *base_));
      for (const auto& m : tail_) tail_exp_.push_back(*exact_log(m.ratio(), *base_));
    }
  }

  // Largest b with the first non-unit ratio equal to b^{+-e} that fits every ratio;
  // for make_period_j(j) this is j - 1.
  std::optional<std::uint64_t> infer_base() const {
    std::optional<BigInt> witness;
    auto consider = [&](const Marginal& m) {
      const Rational r = m.ratio();
      if (r == 1 || witness) return;
      const BigInt num = numerator_of(r), den = denominator_of(r);
      if (den == 1) witness = num;
      else if (num == 1) witness = den;
      else witness = BigInt(0);
    };
    for (const auto& m : head_) consider(m);
    for (const auto& m : tail_) consider(m);
    if (!witness) return 2;  // every ratio is 1
    if (*witness < 2) return std::nullopt;
    const auto bits = boost::multiprecision::msb(*witness) + 1;
    for (std::uint64_t e = 1; e <= bits; ++e) {
      // integer e-th root by bisection
      BigInt lo = 2, hi = BigInt(1) << static_cast<unsigned>(bits / e + 1);
      while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, static_cast<unsigned>(e)) < *witness) lo = mid + 1;
        else hi = mid;
      }
      if (boost::multiprecision::pow(lo, static_cast<unsigned>(e)) == *witness &&
          lo <= std::numeric_limits<std::uint64_t>::max()) {
        const auto b = lo.convert_to<std::uint64_t>();
        if (power_compatible(b)) return b;
      }
    }
    return std::nullopt;
  }

  MeasureKind kind_;
  std::vector<Marginal> head_;
  std::vector<Marginal> tail_;
  std::vector<Marginal> special_;
  std::vector<std::int64_t> head_exp_;
  std::vector<std::int64_t> tail_exp_;
  std::optional<std::uint64_t> declared_base_;
  std::optional<std::uint64_t> base_;
};

// ---------------------------------------------------------------------------
// Free-function surface

inline const Marginal& marginal_at(const MeasureSpec& spec, std::uint64_t n) {
  return spec.marginal_at(n);
}

inline Rational ratio_at(const MeasureSpec& spec, std::uint64_t n) { return spec.ratio_at(n); }

/// mu([a_0 ... a_{d-1}]) = m_0(a_0) * ... * m_{d-1}(a_{d-1}); the empty cylinder has measure 1.
inline Rational cylinder_measure(const MeasureSpec& spec, const BitPrefix& c) {
  Rational mass = 1;
  for (std::size_t i = 0; i < c.size(); ++i) mass *= spec.marginal_at(i).prob(c[i]);
  return mass;
}

/// Bit n of the lazy point with this seed. Pure in (spec, n, seed).
inline unsigned sample_bit(const MeasureSpec& spec, std::uint64_t n, std::uint64_t seed) {
  return counter_word(seed, n) < spec.threshold_at(n) ? 1U : 0U;
}

/// Residue 0 -> (1/j, (j-1)/j); other residues -> ((j-1)/j, 1/j).
inline MeasureSpec make_period_j(std::uint64_t j) {
  if (j < 3) throw invalid_parameter("period j must be at least 3, got " + std::to_string(j));
  const BigInt jj = j;
  const Rational small(BigInt(1), jj), large(jj - 1, jj);
  std::vector<Marginal> residues;
  residues.reserve(j);
  residues.push_back(Marginal::make(small, large));
  for (std::uint64_t r = 1; r < j; ++r) residues.push_back(Marginal::make(large, small));
  return MeasureSpec::periodic(std::move(residues));
}

inline MeasureSpec make_sparse() { return MeasureSpec::sparse(); }

/// Fair coin at every index.
inline MeasureSpec make_fair() { return MeasureSpec::custom({}, {Marginal::fair()}); }

struct NamedMeasure {
  std::string name;
  MeasureSpec spec;
};

/// The three families exercised by the exact checks: the period-3 example,
/// a second member of the period-j family (j = 5), and the sparse measure.
inline std::vector<NamedMeasure> standard_families() {
  return {{"period3", make_period_j(3)}, {"period5", make_period_j(5)}, {"sparse", make_sparse()}};
}

}  // namespace rnc
