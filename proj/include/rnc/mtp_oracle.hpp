#pragma once

// Brute-force checks on the depth-d cylinder algebra.
//
// For a partial bijection gamma built from finitely many bit flips and a
// function g constant on depth-d cylinders, the tilted mass transport principle
//
//     int_{dom gamma} g dmu = int_{im gamma} g(gamma y) w_y(gamma y) dmu(y)
//
// becomes a finite identity between exact rational sums.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "rnc/bitspace.hpp"
#include "rnc/cocycle.hpp"
#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/measures.hpp"
#include "rnc/rational.hpp"

namespace rnc {

/// Exhaustive modes enumerate 2^depth cylinders; beyond this they are refused.
inline constexpr std::size_t kMaxOracleDepth = 12;

/// Composition of the flips b_n, n in `flips`, restricted to the cylinder
/// `domain` (the whole space when absent). The flips commute, so the map is an
/// involution and its image is gamma(domain).
struct FlipBijection {
  std::set<std::uint64_t> flips;
  std::optional<BitPrefix> domain;

  BitPrefix apply(const BitPrefix& a) const {
    BitPrefix out = a;
    for (auto n : flips) out = out.flipped(n);
    return out;
  }

  bool in_domain(const BitPrefix& a) const { return !domain || a.starts_with(*domain); }
  bool in_image(const BitPrefix& a) const { return in_domain(apply(a)); }

  /// Smallest cylinder depth on which the map is defined.
  std::size_t required_depth() const {
    std::size_t d = domain ? domain->size() : 0;
    if (!flips.empty()) d = std::max<std::size_t>(d, *flips.rbegin() + 1);
    return d;
  }
};

/// g: one exact value per depth-d cylinder, indexed by BitPrefix::code().
struct SimpleFunction {
  std::size_t depth = 0;
  std::vector<Rational> values;

  SimpleFunction() = default;
  SimpleFunction(std::size_t d, std::vector<Rational> v) : depth(d), values(std::move(v)) {
    if (depth > kMaxOracleDepth) throw too_large("simple functions are limited to depth 12");
    if (values.size() != (std::size_t{1} << depth)) {
      throw invalid_parameter("simple function needs one value per depth-d cylinder");
    }
  }

  static SimpleFunction constant(std::size_t d, const Rational& c) {
    return {d, std::vector<Rational>(std::size_t{1} << d, c)};
  }

  /// 1 on the cylinder `c`, 0 elsewhere, refined to depth d.
  static SimpleFunction indicator(const BitPrefix& c, std::size_t d) {
    if (c.size() > d) throw depth_mismatch("indicator cylinder deeper than the function");
    std::vector<Rational> v(std::size_t{1} << d);
    for (std::size_t code = 0; code < v.size(); ++code) {
      v[code] = BitPrefix::from_code(code, d).starts_with(c) ? 1 : 0;
    }
    return {d, std::move(v)};
  }

  const Rational& operator()(const BitPrefix& a) const { return values.at(a.code()); }
};

struct PushforwardCheck {
  Rational pushed;     // mu(b_n(C)), from the marginals
  Rational predicted;  // w_x(b_n x) * mu(C) for any x in C
  Rational residual;
  bool pass = false;
};

/// mu(b_n(C)) against the cocycle prediction ((1 - m_n(a_n)) / m_n(a_n)) mu(C).
inline PushforwardCheck pushforward_cylinder(const MeasureSpec& spec, std::uint64_t n,
                                             const BitPrefix& c) {
  if (n >= c.size()) {
    throw index_out_of_prefix("flip index " + std::to_string(n) + " not inside depth-" +
                              std::to_string(c.size()) + " cylinder");
  }
  const auto measure = std::make_shared<const MeasureSpec>(spec);
  const BitSequence point(c, 0, measure);
  PushforwardCheck r;
  r.pushed = cylinder_measure(spec, c.flipped(n));
  r.predicted = flip_weight(spec, point, n).value() * cylinder_measure(spec, c);
  r.residual = r.pushed - r.predicted;
  r.pass = r.residual == 0;
  return r;
}

struct MtpResult {
  Rational lhs;
  Rational rhs;
  Rational residual;
  bool pass = false;
};

/// Both sides of the transport identity as exact sums over depth-d cylinders.
/// The weight w_y(gamma y) is accumulated flip by flip through the cocycle
/// rule, independently of cylinder_measure.
inline MtpResult verify_mtp(const MeasureSpec& spec, const FlipBijection& gamma,
                            const SimpleFunction& g) {
  if (gamma.required_depth() > g.depth) {
    throw depth_mismatch("bijection needs depth " + std::to_string(gamma.required_depth()) +
                         " but the function has depth " + std::to_string(g.depth));
  }
  const auto measure = std::make_shared<const MeasureSpec>(spec);
  MtpResult r;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << g.depth); ++code) {
    const BitPrefix a = BitPrefix::from_code(code, g.depth);
    const Rational mass = cylinder_measure(spec, a);
    if (gamma.in_domain(a)) r.lhs += g(a) * mass;
    if (gamma.in_image(a)) {
      BitSequence y(a, 0, measure);
      CocycleValue w;
      for (auto n : gamma.flips) {
        w *= flip_weight(spec, y, n);
        y = bit_flip(y, n);
      }
      r.rhs += g(gamma.apply(a)) * w.value() * mass;
    }
  }
  r.residual = r.lhs - r.rhs;
  r.pass = r.residual == 0;
  return r;
}

struct MtpCase {
  std::size_t family = 0;
  FlipBijection gamma;
  SimpleFunction g;
};

/// Random case: depth in [1, max_depth], up to max_flips distinct flips below
/// the depth, an optional domain cylinder, and small rational values for g.
inline MtpCase random_mtp_case(CounterRng& rng, std::size_t family_count,
                               std::size_t max_depth = 8, std::size_t max_flips = 3) {
  MtpCase c;
  c.family = rng.below(family_count);
  const std::size_t depth = 1 + rng.below(max_depth);
  const std::size_t flips = std::min<std::size_t>(rng.below(max_flips + 1), depth);
  while (c.gamma.flips.size() < flips) c.gamma.flips.insert(rng.below(depth));
  if (rng.below(2)) {
    const std::size_t len = rng.below(depth + 1);
    c.gamma.domain = BitPrefix::from_code(rng.next(), len);
  }
  std::vector<Rational> values(std::size_t{1} << depth);
  for (auto& v : values) {
    const auto num = static_cast<std::int64_t>(rng.below(11)) - 5;
    v = Rational(num, static_cast<std::int64_t>(1 + rng.below(4)));
  }
  c.g = SimpleFunction(depth, std::move(values));
  return c;
}

}  // namespace rnc
