#pragma once

// Reference implementations for the tests. They share only the number types
// with the library and recompute everything from the defining formulas.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Int = boost::multiprecision::cpp_int;
using Q = boost::multiprecision::cpp_rational;
using Law = std::pair<Q, Q>;  // (m(0), m(1))

inline Int two_to(unsigned e) { return Int(1) << e; }

// n_1 = 1, n_{k+1} = n_k + 2^{k * (1 + ... + k)}.
inline std::vector<Int> sparse_schedule(unsigned K) {
  std::vector<Int> n{Int(1)};
  for (unsigned k = 1; k < K; ++k) {
    unsigned tri = 0;
    for (unsigned i = 1; i <= k; ++i) tri += i;
    n.push_back(n.back() + two_to(k * tri));
  }
  return n;
}

inline Law period_law(std::uint64_t j, std::uint64_t n) {
  const Q small(1, static_cast<std::int64_t>(j));
  if (n % j == 0) return {small, 1 - small};
  return {1 - small, small};
}

inline Law sparse_law(std::uint64_t n) {
  static const std::vector<Int> sched = sparse_schedule(5);
  for (unsigned k = 1; k <= sched.size(); ++k) {
    if (sched[k - 1] == n) {
      const Int d = two_to(k) + 1;
      return {Q(Int(1), d), Q(two_to(k), d)};
    }
  }
  return {Q(1, 2), Q(1, 2)};
}

using LawFn = std::function<Law(std::uint64_t)>;

inline LawFn family(const std::string& name) {
  if (name == "period3") return [](std::uint64_t n) { return period_law(3, n); };
  if (name == "period5") return [](std::uint64_t n) { return period_law(5, n); };
  if (name == "sparse") return sparse_law;
  return [](std::uint64_t) { return Law{Q(1, 2), Q(1, 2)}; };
}

inline Q cylinder(const LawFn& law, const std::vector<int>& bits) {
  Q p = 1;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const Law m = law(i);
    p *= bits[i] ? m.second : m.first;
  }
  return p;
}

// First k positions holding a 1, by a plain scan of an explicit bit source.
inline std::vector<std::uint64_t> scan_ones(const std::function<int(std::uint64_t)>& bit,
                                            std::size_t k) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 0; out.size() < k; ++n) {
    if (bit(n)) out.push_back(n);
  }
  return out;
}

// prod over the consumed positions of m(0)/m(1).
inline Q geodesic_product(const LawFn& law, const std::vector<std::uint64_t>& ones) {
  Q w = 1;
  for (auto n : ones) {
    const Law m = law(n);
    w *= m.first / m.second;
  }
  return w;
}

// Period-j increment law as a convolution: -Bernoulli((j-1)/j) from the
// residue-0 index plus Binomial(j-1, 1/j) from the rest.
inline std::map<std::int64_t, Q> period_increment_law(std::int64_t j) {
  std::map<std::int64_t, Q> law{{0, Q(1)}};
  auto add = [&](std::int64_t step, const Q& p) {
    std::map<std::int64_t, Q> next;
    for (const auto& [v, q] : law) {
      next[v] += q * (1 - p);
      next[v + step] += q * p;
    }
    law = std::move(next);
  };
  add(-1, Q(j - 1, j));
  for (std::int64_t r = 1; r < j; ++r) add(+1, Q(1, j));
  return law;
}

// sum_{i<=p} C(L, i) / 2^L via Pascal's rule on a truncated row.
inline Q binomial_lower_tail(unsigned L, unsigned p) {
  std::vector<Int> row(p + 1, 0);
  row[0] = 1;
  for (unsigned n = 1; n <= L; ++n) {
    for (unsigned i = std::min(n, p); i >= 1; --i) row[i] += row[i - 1];
  }
  Int s = 0;
  for (const auto& c : row) s += c;
  return Q(s, two_to(L));
}

}  // namespace oracle
