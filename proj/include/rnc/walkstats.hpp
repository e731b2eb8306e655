#pragma once

// Random-walk view of the lazy cocycle for periodic measures.
//
// For a period-j measure whose ratios are powers of a base b, L_t = log_b C~_t
// is an integer walk. Sampled at block boundaries t = j*k it has i.i.d.
// increments Z_k = L_{jk} - L_{j(k-1)}, determined by the bits at indices
// [j(k-1), jk). Blocks start at index 0, which makes sum_{i<=k} Z_i == L_{jk}
// an identity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rnc/bitspace.hpp"
#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/measures.hpp"
#include "rnc/parallel.hpp"
#include "rnc/rational.hpp"

namespace rnc {

namespace detail {

inline void require_walkable(const MeasureSpec& spec) {
  if (spec.kind() != MeasureKind::periodic) {
    throw invalid_parameter("walk statistics need a periodic measure, got " +
                            std::string(to_string(spec.kind())));
  }
  if (!spec.power_base()) {
    throw not_power_compatible("periodic measure ratios share no integer power base");
  }
}

}  // namespace detail

/// Z_k = L_{jk} - L_{j(k-1)} for k >= 1, in units of the spec's power base.
inline std::int64_t block_increment(const MeasureSpec& spec, const BitSequence& x,
                                    std::uint64_t k) {
  detail::require_walkable(spec);
  if (k == 0) throw invalid_parameter("block indices start at 1");
  const std::uint64_t j = spec.period();
  std::int64_t z = 0;
  for (std::uint64_t n = j * (k - 1); n < j * k; ++n) {
    if (x.bit(n)) z += spec.exponent_at(n);
  }
  return z;
}

struct BlockIncrementDistribution {
  std::uint64_t base = 0;
  std::vector<std::int64_t> support;  // increasing
  std::vector<Rational> probs;
  Rational mean;
  Rational variance;

  Rational prob(std::int64_t value) const {
    auto it = std::lower_bound(support.begin(), support.end(), value);
    if (it == support.end() || *it != value) return 0;
    return probs[static_cast<std::size_t>(it - support.begin())];
  }
};

/// Law of one block increment, by enumerating all 2^j bit patterns.
inline BlockIncrementDistribution exact_block_distribution(const MeasureSpec& spec) {
  detail::require_walkable(spec);
  const std::uint64_t j = spec.period();
  if (j > 24) throw too_large("exact enumeration is limited to period 24");
  std::map<std::int64_t, Rational> law;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << j); ++pattern) {
    Rational p = 1;
    std::int64_t z = 0;
    for (std::uint64_t r = 0; r < j; ++r) {
      const unsigned bit = (pattern >> r) & 1U;
      p *= spec.marginal_at(r).prob(bit);
      if (bit) z += spec.exponent_at(r);
    }
    law[z] += p;
  }
  BlockIncrementDistribution d;
  d.base = *spec.power_base();
  Rational second = 0;
  for (const auto& [z, p] : law) {
    d.support.push_back(z);
    d.probs.push_back(p);
    d.mean += p * z;
    second += p * z * z;
  }
  d.variance = second - d.mean * d.mean;
  return d;
}

/// One walk L_0, L_j, L_2j, ... with extrema and first hitting times.
struct WalkPath {
  std::uint64_t seed = 0;
  std::uint64_t blocks = 0;
  std::vector<std::int64_t> values;  // empty unless values were kept
  std::int64_t final_value = 0;
  std::int64_t running_max = 0;
  std::int64_t running_min = 0;
  /// Signed level -> first block index t with L_t >= level (level > 0) or
  /// L_t <= level (level < 0). Level 0 is hit at t = 0.
  std::map<std::int64_t, std::uint64_t> hit_times;

  std::optional<std::uint64_t> hit_time(std::int64_t level) const {
    auto it = hit_times.find(level);
    if (it == hit_times.end()) return std::nullopt;
    return it->second;
  }

  /// Block at which both +T and -T have been reached, if within the run.
  std::optional<std::uint64_t> both_sided_time(std::int64_t threshold) const {
    auto up = hit_time(threshold), down = hit_time(-threshold);
    if (!up || !down) return std::nullopt;
    return std::max(*up, *down);
  }
};

/// Walk of the lazy point with empty prefix and this seed: block bits are
/// sample_bit(spec, n, seed), so the path agrees with log_walk on that point.
inline WalkPath simulate_walk(const MeasureSpec& spec, std::uint64_t seed, std::uint64_t blocks,
                              std::span<const std::int64_t> thresholds = {},
                              bool keep_values = true) {
  detail::require_walkable(spec);
  const std::uint64_t j = spec.period();
  std::vector<std::uint64_t> cut(j);
  std::vector<std::int64_t> step(j);
  for (std::uint64_t r = 0; r < j; ++r) {
    cut[r] = spec.threshold_at(r);
    step[r] = spec.exponent_at(r);
  }

  // Pending levels, sorted by magnitude so each check is O(1) amortized.
  std::vector<std::int64_t> ups, downs;
  for (std::int64_t t : thresholds) {
    const std::int64_t a = t < 0 ? -t : t;
    ups.push_back(a);
    downs.push_back(-a);
  }
  std::sort(ups.begin(), ups.end());
  ups.erase(std::unique(ups.begin(), ups.end()), ups.end());
  std::sort(downs.begin(), downs.end(), std::greater<>());
  downs.erase(std::unique(downs.begin(), downs.end()), downs.end());

  WalkPath path;
  path.seed = seed;
  path.blocks = blocks;
  if (keep_values) path.values.reserve(blocks + 1);

  std::size_t next_up = 0, next_down = 0;
  std::int64_t level = 0;
  auto record = [&](std::uint64_t t) {
    if (keep_values) path.values.push_back(level);
    path.running_max = std::max(path.running_max, level);
    path.running_min = std::min(path.running_min, level);
    while (next_up < ups.size() && level >= ups[next_up]) path.hit_times.emplace(ups[next_up++], t);
    while (next_down < downs.size() && level <= downs[next_down])
      path.hit_times.emplace(downs[next_down++], t);
  };

  record(0);
  const CounterStream words(seed);
  std::uint64_t n = 0;
  for (std::uint64_t k = 1; k <= blocks; ++k) {
    for (std::uint64_t r = 0; r < j; ++r, ++n) {
      if (words(n) < cut[r]) level += step[r];
    }
    record(k);
  }
  path.final_value = level;
  return path;
}

struct ThresholdSummary {
  std::int64_t threshold = 0;
  std::uint64_t up_count = 0;    // running max >= T
  std::uint64_t down_count = 0;  // running min <= -T
  std::uint64_t both_count = 0;
  double both_fraction = 0.0;
  // Nearest-rank quantiles of the both-sided hitting time among paths that hit.
  std::optional<std::uint64_t> median_time;
  std::optional<std::uint64_t> q90_time;
};

struct OscillationReport {
  std::uint64_t master_seed = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t blocks = 0;
  std::vector<std::int64_t> thresholds;
  std::vector<WalkPath> paths;  // values dropped; extrema and hit times kept
  std::vector<ThresholdSummary> summary;
};

/// Fraction of paths that reached both +T and -T within `horizon` blocks.
inline double both_sided_fraction(std::span<const WalkPath> paths, std::int64_t threshold,
                                  std::uint64_t horizon) {
  if (paths.empty()) return 0.0;
  std::uint64_t hits = 0;
  for (const auto& p : paths) {
    auto t = p.both_sided_time(threshold);
    if (t && *t <= horizon) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(paths.size());
}

namespace detail {

inline std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, double q) {
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace detail

/// Runs n_paths independent walks; path i uses derive_seed(master_seed, i).
inline OscillationReport oscillation_report(const MeasureSpec& spec, std::uint64_t master_seed,
                                            std::uint64_t n_paths, std::uint64_t blocks,
                                            std::vector<std::int64_t> thresholds) {
  detail::require_walkable(spec);
  for (auto& t : thresholds) t = t < 0 ? -t : t;
  OscillationReport report;
  report.master_seed = master_seed;
  report.n_paths = n_paths;
  report.blocks = blocks;
  report.thresholds = thresholds;
  report.paths.resize(n_paths);
  parallel_for(n_paths, [&](std::uint64_t i) {
    report.paths[i] =
        simulate_walk(spec, derive_seed(master_seed, i), blocks, thresholds, false);
  });

  for (std::int64_t t : thresholds) {
    ThresholdSummary s;
    s.threshold = t;
    std::vector<std::uint64_t> times;
    for (const auto& p : report.paths) {
      if (p.running_max >= t) ++s.up_count;
      if (p.running_min <= -t) ++s.down_count;
      if (auto both = p.both_sided_time(t)) times.push_back(*both);
    }
    s.both_count = times.size();
    s.both_fraction = n_paths ? static_cast<double>(times.size()) / static_cast<double>(n_paths)
                              : 0.0;
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      s.median_time = detail::nearest_rank(times, 0.5);
      s.q90_time = detail::nearest_rank(times, 0.9);
    }
    report.summary.push_back(s);
  }
  return report;
}

}  // namespace rnc
