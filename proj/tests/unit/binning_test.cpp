#include <gtest/gtest.h>

#include <set>

#include "action_rdc/codingsim.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

TEST(BinningProperty, BinIndexIsLinear) {
  Rng rng(71);
  const auto code = BinningCode::with_bits(20, 8, 5);
  for (std::size_t c = 0; c < 200; ++c) {
    const std::uint64_t x = rng() & ((1u << 20) - 1);
    const std::uint64_t y = rng() & ((1u << 20) - 1);
    EXPECT_EQ(code.bin_of(x ^ y), code.bin_of(x) ^ code.bin_of(y));
  }
  EXPECT_EQ(code.bin_of(0), 0u);
}

TEST(BinningProperty, CosetEnumerationIsExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto code = BinningCode::with_bits(10, 4, seed);
    EXPECT_EQ(code.coset_dimension(), 6u);
    std::size_t total = 0;
    for (std::uint64_t b = 0; b < code.bins(); ++b) {
      std::set<std::uint64_t> seen;
      code.for_each_in_bin(b, [&](std::uint64_t x) {
        EXPECT_EQ(code.bin_of(x), b);
        seen.insert(x);
      });
      EXPECT_EQ(seen.size(), std::size_t{1} << 6);
      total += seen.size();
    }
    EXPECT_EQ(total, std::size_t{1} << 10);
  }
}

TEST(Binning, TruncationKeepsLowBits) {
  const auto code = BinningCode::with_bits(16, 10, 9);
  const auto t = code.truncated(4);
  for (std::uint64_t x = 0; x < (1u << 16); x += 37) EXPECT_EQ(t.bin_of(x), code.bin_of(x) & 0xF);
  EXPECT_THROW(code.truncated(11), DomainError);
}

TEST(Binning, FullRankCodeIsLossless) {
  const auto code = BinningCode::with_bits(12, 12, 3);
  EXPECT_EQ(code.coset_dimension(), 0u);
  std::set<std::uint64_t> bins;
  for (std::uint64_t x = 0; x < (1u << 12); ++x) bins.insert(code.bin_of(x));
  EXPECT_EQ(bins.size(), std::size_t{1} << 12);
}

TEST(Binning, RateBitsRoundsUp) {
  EXPECT_EQ(rate_bits(10, 0.25), 3u);
  EXPECT_EQ(rate_bits(8, 0.25), 2u);
  EXPECT_EQ(rate_bits(8, -0.1), 0u);
  EXPECT_NEAR(BinningCode(8, 0.25, 1).rate(), 0.25, 1e-15);
}

TEST(Binning, SameSeedSameCode) {
  const auto a = BinningCode::with_bits(24, 12, 77);
  const auto b = BinningCode::with_bits(24, 12, 77);
  const auto c = BinningCode::with_bits(24, 12, 78);
  bool differs = false;
  for (std::uint64_t x = 1; x < (1u << 24); x = x * 3 + 1) {
    EXPECT_EQ(a.bin_of(x), b.bin_of(x));
    differs = differs || a.bin_of(x) != c.bin_of(x);
  }
  EXPECT_TRUE(differs);
}

TEST(MapDecode, PicksTheMostLikelyMemberAndRefusesTies) {
  const auto code = BinningCode::with_bits(8, 4, 11);
  BitScores s;
  for (int i = 0; i < 8; ++i) s.push(std::log(0.9), std::log(0.1));
  // The all-zero word is the unique best in bin 0.
  EXPECT_EQ(map_decode(code, 0, s), std::optional<std::uint64_t>{0});
  BitScores flat;
  for (int i = 0; i < 8; ++i) flat.push(std::log(0.5), std::log(0.5));
  EXPECT_EQ(map_decode(code, 0, flat), std::nullopt);
}
