#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rnc/measures.hpp"

using namespace rnc;

TEST(Marginal, Validation) {
  EXPECT_THROW(Marginal::make(Rational(1, 2), Rational(1, 3)), invalid_parameter);
  EXPECT_THROW(Marginal::make(Rational(0), Rational(1)), invalid_parameter);
  EXPECT_THROW(Marginal::make(Rational(3, 2), Rational(-1, 2)), invalid_parameter);
  const auto m = Marginal::make(Rational(1, 3), Rational(2, 3));
  EXPECT_EQ(m.ratio(), Rational(1, 2));
}

TEST(Marginal, Threshold) {
  EXPECT_EQ(Marginal::fair().threshold(), std::uint64_t{1} << 63);
  // ceil(2^64 / 3)
  EXPECT_EQ(Marginal::make(Rational(2, 3), Rational(1, 3)).threshold(), 0x5555555555555556ULL);
}

TEST(Period3, Examples) {
  const auto s = make_period_j(3);
  EXPECT_EQ(marginal_at(s, 6), Marginal::make(Rational(1, 3), Rational(2, 3)));
  EXPECT_EQ(marginal_at(s, 7), Marginal::make(Rational(2, 3), Rational(1, 3)));
  EXPECT_EQ(ratio_at(s, 9), Rational(1, 2));
  EXPECT_EQ(ratio_at(s, 10), Rational(2));
  EXPECT_EQ(s.power_base(), 2u);
}

TEST(Period3, MatchesHandCodedRule) {
  const auto s = make_period_j(3);
  for (std::uint64_t n = 0; n <= 10000; ++n) {
    const auto [p0, p1] = oracle::period_law(3, n);
    ASSERT_EQ(s.marginal_at(n).p0(), p0) << n;
    ASSERT_EQ(s.marginal_at(n).p1(), p1) << n;
  }
}

TEST(PeriodJ, Examples) {
  const auto s = make_period_j(4);
  EXPECT_EQ(marginal_at(s, 5), Marginal::make(Rational(3, 4), Rational(1, 4)));
  EXPECT_EQ(ratio_at(s, 0), Rational(1, 3));
  EXPECT_THROW(make_period_j(2), invalid_parameter);
  for (std::uint64_t j = 3; j <= 12; ++j) {
    const auto sj = make_period_j(j);
    EXPECT_EQ(sj.power_base(), j - 1);
    EXPECT_EQ(sj.exponent_at(0), -1);
    EXPECT_EQ(sj.exponent_at(1), 1);
    EXPECT_EQ(sj.period(), j);
  }
}

TEST(Sparse, Schedule) {
  EXPECT_EQ(sparse_n(1), 1);
  EXPECT_EQ(sparse_n(2), 3);
  EXPECT_EQ(sparse_n(3), 67);
  const auto sched = oracle::sparse_schedule(8);
  for (unsigned k = 1; k <= 8; ++k) EXPECT_EQ(sparse_n(k), sched[k - 1]);
  for (unsigned k = 1; k <= 7; ++k) {
    EXPECT_EQ(sparse_p(k), oracle::two_to(k * (k + 1) / 2));
    EXPECT_EQ(sparse_n(k + 1) - sparse_n(k), boost::multiprecision::pow(sparse_p(k), k));
  }
}

TEST(Sparse, Marginals) {
  const auto s = make_sparse();
  EXPECT_EQ(marginal_at(s, 3), Marginal::make(Rational(1, 5), Rational(4, 5)));
  EXPECT_EQ(marginal_at(s, 2), Marginal::fair());
  EXPECT_EQ(marginal_at(s, 0), Marginal::fair());
  EXPECT_EQ(ratio_at(s, 1), Rational(1, 2));
  EXPECT_EQ(ratio_at(s, 67), Rational(1, 8));
  EXPECT_EQ(ratio_at(s, 68), Rational(1));
  EXPECT_EQ(s.exponent_at(262211), -4);
  for (std::uint64_t n = 0; n < 300; ++n) {
    const auto [p0, p1] = oracle::sparse_law(n);
    ASSERT_EQ(s.marginal_at(n).p0(), p0) << n;
  }
  EXPECT_TRUE(s.power_compatible(2));
  EXPECT_FALSE(s.power_compatible(4));
}

TEST(Sparse, SpecialZeroPartialSums) {
  Rational s = 0, prev = 0;
  for (unsigned k = 1; k <= 64; ++k) {
    s += Rational(BigInt(1), pow2_int(k) + 1);
    EXPECT_GT(s, prev);
    prev = s;
  }
  EXPECT_EQ(Rational(1, 3) + Rational(1, 5), Rational(8, 15));
  // The partial sums pass 0.60 at K = 3 and settle near 0.76450.
  EXPECT_LT(Rational(8, 15), Rational(3, 5));
  EXPECT_GT(Rational(8, 15) + Rational(1, 9), Rational(3, 5));
  EXPECT_LT(s, Rational(7645, 10000));
  EXPECT_GT(s, Rational(7644, 10000));
}

TEST(Cylinder, Examples) {
  const auto s = make_period_j(3);
  EXPECT_EQ(cylinder_measure(s, BitPrefix{}), Rational(1));
  EXPECT_EQ(cylinder_measure(s, BitPrefix::parse("10")), Rational(4, 9));
}

TEST(Cylinder, NormalizesAndMatchesOracle) {
  for (const auto& fam : standard_families()) {
    const auto law = oracle::family(fam.name);
    for (std::size_t d = 0; d <= 12; ++d) {
      Rational total = 0;
      for (std::uint64_t c = 0; c < (std::uint64_t{1} << d); ++c) {
        const auto p = BitPrefix::from_code(c, d);
        const Rational m = cylinder_measure(fam.spec, p);
        if (d == 7) {
          std::vector<int> bits(p.bits().begin(), p.bits().end());
          ASSERT_EQ(m, oracle::cylinder(law, bits));
        }
        total += m;
      }
      EXPECT_EQ(total, 1) << fam.name << " depth " << d;
    }
  }
}

TEST(Cylinder, Multiplicative) {
  const auto s = make_sparse();
  const auto a = BitPrefix::parse("0110"), b = BitPrefix::parse("1011");
  Rational conditional = 1;
  for (std::size_t i = 0; i < b.size(); ++i) conditional *= s.marginal_at(a.size() + i).prob(b[i]);
  EXPECT_EQ(cylinder_measure(s, a.concat(b)), cylinder_measure(s, a) * conditional);
}

TEST(SampleBit, Frequencies) {
  const auto fair = make_fair();
  const auto p3 = make_period_j(3);
  const std::uint64_t N = 1000000;
  std::uint64_t ones_fair = 0, ones_res0 = 0;
  for (std::uint64_t seed = 0; seed < N; ++seed) {
    ones_fair += sample_bit(fair, 5, seed);
    ones_res0 += sample_bit(p3, 3, seed);
  }
  const double f = static_cast<double>(ones_fair) / N;
  EXPECT_GE(f, 0.498);
  EXPECT_LE(f, 0.502);
  const double r = static_cast<double>(ones_res0) / N;
  const double sd = std::sqrt(2.0 / 9.0 / N);
  EXPECT_NEAR(r, 2.0 / 3.0, 3 * sd);
  EXPECT_EQ(sample_bit(p3, 3, 99), sample_bit(p3, 3, 99));
}

TEST(Custom, BaseInference) {
  const auto m = Marginal::make(Rational(1, 5), Rational(4, 5));  // ratio 1/4
  const auto s = MeasureSpec::custom({}, {m, Marginal::fair()});
  EXPECT_EQ(s.power_base(), 4u);
  EXPECT_TRUE(s.power_compatible(2));
  EXPECT_EQ(s.log_ratio_at(0, 2), -2);
  const auto odd = MeasureSpec::custom({Marginal::make(Rational(2, 5), Rational(3, 5))}, {Marginal::fair()});
  EXPECT_FALSE(odd.power_base().has_value());
  EXPECT_THROW(odd.log_ratio_at(0, 2), not_power_compatible);
  EXPECT_THROW(MeasureSpec::custom({}, {}), invalid_parameter);
  EXPECT_THROW(MeasureSpec::periodic({Marginal::fair(), Marginal::fair()}), invalid_parameter);
}
