#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rnc/nullsets.hpp"

using namespace rnc;

namespace {

using Conv = BlockConvention;

// Residue of the reduced numerator of mu(Z_3) (open blocks) modulo 1e9+7,
// from an independent big-integer computation.
constexpr unsigned long kTail3NumeratorMod = 622325361UL;

}  // namespace

TEST(Blocks, InteriorLengths) {
  EXPECT_EQ(block_interior_length(1), 1);
  EXPECT_EQ(block_interior_length(2), 63);
  EXPECT_EQ(block_interior_length(3), 262143);
  EXPECT_EQ(block_interior_length(2, Conv::full_length), 64);
  EXPECT_EQ(block_interior_length(4), pow2_int(40) - 1);
}

TEST(ExactTail, K2) {
  const auto tb = exact_tail(2);
  ASSERT_TRUE(tb.exact_tail);
  EXPECT_EQ(*tb.exact_tail, oracle::binomial_lower_tail(63, 8));
  EXPECT_EQ(*tb.exact_tail, Rational(BigInt(4501777129ULL), pow2_int(63)));
  EXPECT_LE(*tb.exact_tail, pow2(-16));
  EXPECT_LE(*tb.exact_tail, pow2(-2));
  EXPECT_EQ(tb.chain_exponent, -16);
  EXPECT_TRUE(tb.chain_holds());
  const auto full = exact_tail(2, Conv::full_length);
  EXPECT_EQ(*full.exact_tail, oracle::binomial_lower_tail(64, 8));
  EXPECT_EQ(full.log2_upper_exponent, -16);
  EXPECT_EQ(full.chain_value(), pow2(-16));
  EXPECT_TRUE(full.chain_holds());
}

TEST(ExactTail, K3) {
  const auto tb = exact_tail(3);
  ASSERT_TRUE(tb.exact_tail);
  EXPECT_EQ(denominator_of(*tb.exact_tail), pow2_int(262143));
  EXPECT_EQ(static_cast<unsigned long>(numerator_of(*tb.exact_tail) % 1000000007UL), kTail3NumeratorMod);
  EXPECT_LE(*tb.exact_tail, pow2(-3));
  EXPECT_TRUE(tb.chain_holds());
  EXPECT_TRUE(exact_tail(3, Conv::full_length).chain_holds());
}

TEST(ExactTail, K1IsVacuous) {
  const auto full = exact_tail(1, Conv::full_length);
  EXPECT_EQ(full.chain_exponent, 0);
  EXPECT_EQ(full.chain_value(), 1);
  EXPECT_TRUE(full.chain_holds());
  const auto open = exact_tail(1);
  EXPECT_EQ(*open.exact_tail, 1);
  // One interior bit against threshold 2: the chain's early links drop below 1.
  EXPECT_FALSE(open.chain_holds());
}

TEST(ExactTail, TooLarge) {
  EXPECT_THROW(exact_tail(4), too_large);
  EXPECT_NO_THROW(tail_bound(4));
}

TEST(TailBound, ExponentArithmetic) {
  for (unsigned k = 4; k <= 6; ++k) {
    const auto tb = tail_bound(k);
    EXPECT_FALSE(tb.exact_tail);
    const BigInt p = sparse_p(k);
    const BigInt expected = BigInt(k) * p * (k * (k + 1) / 2) - boost::multiprecision::pow(p, k);
    EXPECT_EQ(tb.chain_exponent, expected);
    EXPECT_EQ(tb.log2_upper_exponent, expected + 1);
    EXPECT_LE(tb.log2_upper_exponent, -static_cast<int>(k));
  }
  const auto t5 = tail_bound(5, Conv::full_length);
  EXPECT_EQ(t5.log2_upper_exponent, BigInt(5) * pow2_int(15) * 15 - pow2_int(75));
}

TEST(TailBound, ChainLinksDecreaseInLogDomain) {
  for (unsigned k = 2; k <= 6; ++k) {
    const auto tb = tail_bound(k);
    for (std::size_t i = 1; i < tb.chain.size(); ++i) {
      EXPECT_LE(tb.chain[i - 1].log2, tb.chain[i].log2 + 1e-9) << "k=" << k << " link " << i;
    }
  }
}

TEST(Summability, Report) {
  EXPECT_LE(tail_summability_report(1), 1);
  Rational prev = 0;
  for (unsigned K = 1; K <= 6; ++K) {
    const Rational s = tail_summability_report(K);
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_LE(prev, Rational(13, 10));
  EXPECT_THROW(tail_summability_report(0), invalid_parameter);
}

TEST(Summability, SpecialZeros) {
  EXPECT_EQ(special_zero_partial_sum(1), Rational(1, 3));
  EXPECT_EQ(special_zero_partial_sum(2), Rational(8, 15));
  const auto s = special_zero_summability();
  EXPECT_EQ(s.tail_bound, pow2(-64));
  EXPECT_EQ(s.certified_upper, s.partial + s.tail_bound);
  EXPECT_LT(s.certified_upper, Rational(7645, 10000));
  EXPECT_GT(s.partial, Rational(3, 5));
}

TEST(BlockCoarse, FirstBlockAlwaysInZ1) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto tr = block_coarse_trajectory(s, 1);
    EXPECT_EQ(tr.blocks[0].interior_length, 1);
    EXPECT_EQ(tr.blocks[0].threshold, 2);
    EXPECT_LE(tr.blocks[0].ones_count, 1);
  }
}

TEST(BlockCoarse, MatchesBitLevel) {
  const auto sparse = make_sparse();
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto tr = block_coarse_trajectory(s, 3);
    const auto x = make_sequence("", s, sparse);
    EXPECT_EQ(tr.head_ones, x.bit(0));
    for (unsigned k = 1; k <= 3; ++k) {
      const auto nk = sparse_n(k).convert_to<std::uint64_t>();
      const auto next = sparse_n(k + 1).convert_to<std::uint64_t>();
      std::uint64_t ones = 0;
      for (std::uint64_t n = nk + 1; n < next; ++n) ones += x.bit(n);
      EXPECT_EQ(tr.blocks[k - 1].ones_count, ones);
      EXPECT_EQ(tr.blocks[k - 1].special_bit, x.bit(nk));
      EXPECT_FALSE(tr.blocks[k - 1].approximate);
    }
  }
}

TEST(BlockCoarse, PartialSumsMatchGeodesicTrace) {
  const auto sparse = make_sparse();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto tr = block_coarse_trajectory(s, 2);
    const auto x = make_sequence("", s, sparse);
    std::uint64_t consumed = 0;
    for (std::uint64_t n = 0; n < 67; ++n) consumed += x.bit(n);
    const auto trace = geodesic_trace(sparse, x, consumed);
    EXPECT_EQ(trace.partial_sum(), tr.partial_sums[1]) << "seed " << s;
  }
}

TEST(BlockCoarse, Invariants) {
  bool saw_exceed = false;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto tr = block_coarse_trajectory(s, 8);
    for (std::size_t i = 0; i < tr.blocks.size(); ++i) {
      const auto& b = tr.blocks[i];
      Rational expected = 1;
      for (std::size_t j = 0; j <= i; ++j) {
        if (tr.blocks[j].special_bit) expected /= pow2_int(tr.blocks[j].k);
      }
      EXPECT_EQ(b.weight_at_entry.value(), expected);
      if (i) {
        EXPECT_LE(b.weight_at_entry.value(), tr.blocks[i - 1].weight_at_entry.value());
        EXPECT_GE(tr.partial_sums[i], tr.partial_sums[i - 1]);
      }
      if (b.ones_count > b.threshold) {
        saw_exceed = true;
        EXPECT_GE(b.block_sum, 1);
        EXPECT_GE(b.block_sum, Rational(b.ones_count) / sparse_p(b.k));
      }
      EXPECT_EQ(b.approximate, b.k >= 4);
    }
  }
  EXPECT_TRUE(saw_exceed);
}

TEST(BlockCoarse, AllHitsWeights) {
  std::optional<BlockTrajectory> found;
  for (std::uint64_t s = 0; s < 2000 && !found; ++s) {
    auto tr = block_coarse_trajectory(s, 5);
    if (std::all_of(tr.blocks.begin(), tr.blocks.end(), [](const auto& b) { return b.special_bit == 1; })) {
      found = std::move(tr);
    }
  }
  ASSERT_TRUE(found);
  EXPECT_EQ(found->blocks[2].weight_at_entry.value(), Rational(1, 64));
  EXPECT_EQ(found->envelope().value(), pow2(-15));
  EXPECT_EQ(found->envelope().log(), -15);
  EXPECT_THROW(block_coarse_trajectory(0, 17), invalid_parameter);
}

TEST(Vanishing, Report) {
  const auto r = vanishing_report(3, 400, 10, pow2(-15), Rational(1));
  EXPECT_EQ(r.all_hits_probability,
            Rational(BigInt(4503599627370496ULL), BigInt(5721142846901625ULL)));
  std::uint64_t hits = 0;
  for (const auto& tr : r.paths) {
    bool all = true;
    for (unsigned k = 3; k <= 10; ++k) all = all && tr.blocks[k - 1].special_bit == 1;
    hits += all;
  }
  EXPECT_EQ(hits, r.all_hits_count);
  EXPECT_EQ(r.paths.size(), 400u);
}
