#pragma once

// Quantitative side of the sparse measure: binomial tails of the block events
// Z_k = {at most p_k ones strictly between n_k and n_{k+1}}, the inequality
// chain bounding them, summability of those bounds and of sum_k m_{n_k}(0),
// and a block-granularity simulator of the cocycle along the geodesic.
//
// Blocks are the open intervals (n_k, n_{k+1}), holding p_k^k - 1 fair bits.
// BlockConvention::full_length treats the block as p_k^k fair bits instead;
// it only changes the tail computations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rnc/cocycle.hpp"
#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/measures.hpp"
#include "rnc/parallel.hpp"
#include "rnc/rational.hpp"

namespace rnc {

enum class BlockConvention { open_interval, full_length };

inline const char* to_string(BlockConvention c) {
  return c == BlockConvention::open_interval ? "open_interval" : "full_length";
}

/// Largest k whose tail is evaluated exactly (interior length 2^18 - 1).
inline constexpr unsigned kExactTailMaxK = 3;

/// Fair bits counted by Z_k.
inline BigInt block_interior_length(unsigned k, BlockConvention c = BlockConvention::open_interval) {
  BigInt gap = sparse_gap(k);
  return c == BlockConvention::open_interval ? BigInt(gap - 1) : gap;
}

namespace detail {

inline double clamped_double(const BigInt& v) {
  constexpr double big = std::numeric_limits<double>::max();
  if (v > BigInt(0) && log2_of(v) >= 1023.9) return big;
  if (v < BigInt(0) && log2_of(BigInt(-v)) >= 1023.9) return -big;
  return v.convert_to<double>();
}

inline double log2_factorial(double n) { return std::lgamma(n + 1.0) / std::log(2.0); }

}  // namespace detail

/// One member of the bound chain; `exact` when it was evaluated as a rational.
struct ChainLink {
  std::string name;
  std::optional<Rational> exact;
  double log2 = 0.0;
};

struct TailBound {
  unsigned k = 0;
  BlockConvention convention = BlockConvention::open_interval;
  BigInt interior_length;
  BigInt threshold;  // p_k
  std::optional<Rational> exact_tail;
  /// 2^-L sum_{i<=p} C(L,i) <= 2^-L sum_{1<=i<=p} L^i/i! <= 2^-L p L^p/p!
  ///   <= 2^-L L^p <= 2^{k p sum_{i<=k} i - L}, with L the interior length.
  std::vector<ChainLink> chain;
  /// k p_k (1+...+k) - p_k^k: the closed-form end of the chain at length p_k^k.
  BigInt chain_exponent;
  /// Certified: mu(Z_k) <= 2^{log2_upper_exponent}.
  BigInt log2_upper_exponent;
  double log2_upper = 0.0;

  /// Closed-form chain value at length p_k^k, as an exact rational.
  Rational chain_value() const {
    if (chain_exponent < -1000000) throw too_large("chain value too small to represent exactly");
    return pow2(chain_exponent.convert_to<std::int64_t>());
  }

  /// exact_tail <= every link, checked exactly. Needs the exact path.
  bool chain_holds() const {
    if (!exact_tail) return false;
    Rational previous = *exact_tail;
    for (const auto& link : chain) {
      if (!link.exact || previous > *link.exact) return false;
      previous = *link.exact;
    }
    return true;
  }
};

/// Tail bound for block k; the binomial tail is exact for k <= 3, while larger
/// k get log-domain chain values and the certified integer exponent only.
inline TailBound tail_bound(unsigned k, BlockConvention convention = BlockConvention::open_interval) {
  if (k == 0) throw invalid_parameter("block indices start at 1");
  TailBound tb;
  tb.k = k;
  tb.convention = convention;
  tb.interior_length = block_interior_length(k, convention);
  tb.threshold = sparse_p(k);
  const BigInt& L = tb.interior_length;
  const BigInt& p = tb.threshold;
  const std::uint64_t sum_k = sparse_log2_p(k);  // 1 + ... + k, also log2 p
  // log2(p^{kp}) = k p (1 + ... + k)
  const BigInt kp_sum = BigInt(k) * p * sum_k;
  tb.chain_exponent = kp_sum - sparse_gap(k);
  tb.log2_upper_exponent = kp_sum - L;
  tb.log2_upper = detail::clamped_double(tb.log2_upper_exponent);

  if (k <= kExactTailMaxK) {
    const auto len = L.convert_to<std::uint64_t>();
    const auto thr = p.convert_to<std::uint64_t>();
    const Rational scale(BigInt(1), pow2_int(len));
    BigInt binom = 1, binom_sum = 0;
    for (std::uint64_t i = 0; i <= thr && i <= len; ++i) {
      binom_sum += binom;
      binom = binom * (len - i) / (i + 1);
    }
    tb.exact_tail = Rational(binom_sum) * scale;

    Rational series = 0, term = 1;  // term = L^i / i!
    for (std::uint64_t i = 1; i <= thr; ++i) {
      term *= Rational(L, BigInt(i));
      series += term;
    }
    BigInt p_fact = 1;
    for (std::uint64_t i = 2; i <= thr; ++i) p_fact *= i;
    const BigInt l_pow = boost::multiprecision::pow(L, static_cast<unsigned>(thr));
    const Rational links[] = {series * scale, Rational(p * l_pow, p_fact) * scale,
                              Rational(l_pow) * scale,
                              pow2(tb.log2_upper_exponent.convert_to<std::int64_t>())};
    const char* names[] = {"power_series", "largest_term", "drop_factorial", "closed_form"};
    for (int i = 0; i < 4; ++i) tb.chain.push_back({names[i], links[i], log2_of(links[i])});
  } else {
    // Log-domain only. log2 L = k (1 + ... + k) up to the -1 of the open convention.
    const double log2_L = static_cast<double>(k * sum_k) +
                          (convention == BlockConvention::open_interval
                               ? std::log2(1.0 - std::ldexp(1.0, -static_cast<int>(k * sum_k)))
                               : 0.0);
    const double p_d = std::ldexp(1.0, static_cast<int>(sum_k));
    const double L_d = detail::clamped_double(L);
    const double log2_pfact = detail::log2_factorial(p_d);
    const double last_term = p_d * log2_L - log2_pfact - L_d;
    // Terms grow geometrically with ratio >= L/p, so the series is within
    // a factor 1/(1 - p/L) of its last term.
    const double series = last_term - std::log2(1.0 - p_d / L_d);
    tb.chain.push_back({"power_series", std::nullopt, series});
    tb.chain.push_back({"largest_term", std::nullopt, std::log2(p_d) + last_term});
    tb.chain.push_back({"drop_factorial", std::nullopt, p_d * log2_L - L_d});
    tb.chain.push_back({"closed_form", std::nullopt, tb.log2_upper});
  }
  return tb;
}

/// Exact binomial tail; only feasible for k <= 3.
inline TailBound exact_tail(unsigned k, BlockConvention convention = BlockConvention::open_interval) {
  if (k > kExactTailMaxK) {
    throw too_large("exact tail requested for k = " + std::to_string(k) +
                    "; only k <= 3 is evaluated exactly");
  }
  return tail_bound(k, convention);
}

/// Certified upper bound on sum_{k<=K} mu(Z_k): exact tails for k <= 3, and
/// 2^{max(e_k, -1100)} with e_k the certified exponent beyond. Each term is
/// capped at 1.
inline Rational tail_summability_report(unsigned K,
                                        BlockConvention convention = BlockConvention::open_interval) {
  if (K == 0) throw invalid_parameter("K must be at least 1");
  Rational total = 0;
  for (unsigned k = 1; k <= K; ++k) {
    const TailBound tb = tail_bound(k, convention);
    Rational term;
    if (tb.exact_tail) {
      term = *tb.exact_tail;
    } else {
      const BigInt e = std::max(tb.log2_upper_exponent, BigInt(-1100));
      term = pow2(e.convert_to<std::int64_t>());
    }
    total += std::min(term, Rational(1));
  }
  return total;
}

/// sum_{k=1}^{K} m_{n_k}(0) = sum 1/(2^k + 1).
inline Rational special_zero_partial_sum(unsigned K) {
  Rational s = 0;
  for (unsigned k = 1; k <= K; ++k) s += sparse_special_marginal(k).p0();
  return s;
}

struct SpecialZeroSum {
  unsigned terms = 64;
  Rational partial;       // sum_{k<=64} 1/(2^k+1)
  Rational tail_bound;    // sum_{k>64} 2^{-k} = 2^{-64}
  Rational certified_upper;
};

inline SpecialZeroSum special_zero_summability() {
  SpecialZeroSum s;
  s.partial = special_zero_partial_sum(s.terms);
  s.tail_bound = pow2(-static_cast<std::int64_t>(s.terms));
  s.certified_upper = s.partial + s.tail_bound;
  return s;
}

// ---------------------------------------------------------------------------
// Block-coarse simulation

struct BlockReport {
  unsigned k = 0;
  BigInt interior_length;
  BigInt threshold;
  BigInt ones_count;     // ones in (n_k, n_{k+1})
  unsigned special_bit = 0;  // x_{n_k}
  /// Cocycle value at every one consumed in this block: the product of 2^{-j}
  /// over j <= k with x_{n_j} = 1 (interior ratios are all 1).
  CocycleValue weight_at_entry;
  /// Sum of w over the ones consumed in [n_k, n_{k+1}): (special + interior) * weight.
  Rational block_sum;
  double log2_block_sum = 0.0;
  bool approximate = false;  // interior count drawn from the normal surrogate
};

struct BlockTrajectory {
  std::uint64_t seed = 0;
  unsigned head_ones = 0;  // ones in [0, n_1), each with weight 1
  std::vector<BlockReport> blocks;
  std::vector<Rational> partial_sums;  // cumulative sum of w after each block

  const CocycleValue& envelope() const { return blocks.back().weight_at_entry; }
};

namespace detail {

inline constexpr std::uint64_t kSpecialTag = 1;
inline constexpr std::uint64_t kSurrogateTag = 2;

inline unsigned special_bit(std::uint64_t seed, unsigned k, const MeasureSpec& sparse) {
  const auto& table = sparse_indices_u64();
  if (k <= table.size()) return sample_bit(sparse, table[k - 1].first, seed);
  return tagged_word(seed, kSpecialTag, k) < sparse_special_marginal(k).threshold() ? 1U : 0U;
}

// Exact count of ones among the fair bits at indices [begin, end).
inline std::uint64_t count_fair_ones(std::uint64_t seed, std::uint64_t begin, std::uint64_t end) {
  const CounterStream words(seed);
  std::uint64_t ones = 0;
  for (std::uint64_t n = begin; n < end; ++n) ones += static_cast<std::uint64_t>(words(n) >> 63 == 0);
  return ones;
}

// mean + z * sd for Binomial(L, 1/2), z from a deterministic Box-Muller draw,
// clamped into [0, L].
inline BigInt surrogate_ones(std::uint64_t seed, unsigned k, const BigInt& L) {
  const double u1 = to_unit(tagged_word(seed, kSurrogateTag, 2 * k)) + 0x1.0p-54;
  const double u2 = to_unit(tagged_word(seed, kSurrogateTag, 2 * k + 1));
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  const auto z_fixed = static_cast<std::int64_t>(std::llround(z * 0x1.0p32));
  const BigInt sd_fixed = BigInt(boost::multiprecision::sqrt(L)) * z_fixed;  // 2 * sd * 2^32 * z
  BigInt count = L / 2 + (sd_fixed >> 33);
  if (sd_fixed < 0) count = L / 2 - ((-sd_fixed) >> 33);
  return std::clamp(count, BigInt(0), L);
}

}  // namespace detail

/// Blocks 1..K of the lazy point with empty prefix and this seed under the
/// sparse measure. Interior counts are exact bit counts of that point for
/// k <= 3 and surrogate draws (flagged approximate) beyond.
inline BlockTrajectory block_coarse_trajectory(std::uint64_t seed, unsigned K_blocks) {
  if (K_blocks > 16) throw invalid_parameter("block-coarse simulation is limited to 16 blocks");
  static const MeasureSpec sparse = make_sparse();
  BlockTrajectory tr;
  tr.seed = seed;
  tr.head_ones = static_cast<unsigned>(
      detail::count_fair_ones(seed, 0, kSparseFirstIndex));
  Rational running = tr.head_ones;
  std::int64_t log_weight = 0;
  for (unsigned k = 1; k <= K_blocks; ++k) {
    BlockReport b;
    b.k = k;
    b.interior_length = block_interior_length(k);
    b.threshold = sparse_p(k);
    b.special_bit = detail::special_bit(seed, k, sparse);
    if (k <= kExactTailMaxK) {
      const auto begin = sparse_n(k).convert_to<std::uint64_t>() + 1;
      const auto end = sparse_n(k + 1).convert_to<std::uint64_t>();
      b.ones_count = detail::count_fair_ones(seed, begin, end);
    } else {
      b.ones_count = detail::surrogate_ones(seed, k, b.interior_length);
      b.approximate = true;
    }
    if (b.special_bit) log_weight -= k;
    b.weight_at_entry = CocycleValue::power(2, log_weight);
    b.block_sum = Rational(b.ones_count + b.special_bit) * b.weight_at_entry.value();
    b.log2_block_sum = b.block_sum > 0 ? log2_of(b.block_sum) : -HUGE_VAL;
    running += b.block_sum;
    tr.partial_sums.push_back(running);
    tr.blocks.push_back(std::move(b));
  }
  return tr;
}

struct VanishingReport {
  std::uint64_t master_seed = 0;
  std::uint64_t n_paths = 0;
  unsigned K_blocks = 0;
  Rational envelope_bound;
  Rational sum_bound;
  std::uint64_t envelope_count = 0;  // envelope <= envelope_bound
  std::uint64_t sum_count = 0;       // partial sum after block K >= sum_bound
  // Special bits equal to 1 for every 3 <= k <= min(10, K).
  unsigned hits_from = 3;
  unsigned hits_to = 0;
  std::uint64_t all_hits_count = 0;
  Rational all_hits_probability;  // prod 2^k / (2^k + 1) over that range
  std::vector<BlockTrajectory> paths;

  double fraction(std::uint64_t count) const {
    return n_paths ? static_cast<double>(count) / static_cast<double>(n_paths) : 0.0;
  }
};

/// Path i uses derive_seed(master_seed, i).
inline VanishingReport vanishing_report(std::uint64_t master_seed, std::uint64_t n_paths,
                                        unsigned K_blocks, Rational envelope_bound,
                                        Rational sum_bound) {
  if (K_blocks == 0) throw invalid_parameter("need at least one block");
  VanishingReport r;
  r.master_seed = master_seed;
  r.n_paths = n_paths;
  r.K_blocks = K_blocks;
  r.envelope_bound = std::move(envelope_bound);
  r.sum_bound = std::move(sum_bound);
  r.hits_to = std::min(10U, K_blocks);
  r.all_hits_probability = 1;
  for (unsigned k = r.hits_from; k <= r.hits_to; ++k) {
    r.all_hits_probability *= sparse_special_marginal(k).p1();
  }
  r.paths.resize(n_paths);
  parallel_for(n_paths, [&](std::uint64_t i) {
    r.paths[i] = block_coarse_trajectory(derive_seed(master_seed, i), K_blocks);
  });
  for (const auto& tr : r.paths) {
    if (tr.envelope().value() <= r.envelope_bound) ++r.envelope_count;
    if (tr.partial_sums.back() >= r.sum_bound) ++r.sum_count;
    bool all = r.hits_from <= r.hits_to;
    for (unsigned k = r.hits_from; k <= r.hits_to; ++k) all = all && tr.blocks[k - 1].special_bit;
    if (all) ++r.all_hits_count;
  }
  return r;
}

}  // namespace rnc
