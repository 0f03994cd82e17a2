#include <gtest/gtest.h>

#include <cmath>

#include "action_rdc/probcore.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

TEST(Pmf, RejectsBadTables) {
  EXPECT_THROW(Pmf(Alphabet::binary(), {0.5, 0.4}), InvalidDistribution);
  EXPECT_THROW(Pmf(Alphabet::binary(), {1.2, -0.2}), InvalidDistribution);
  EXPECT_THROW(Pmf(Alphabet::binary(), {1.0}), InvalidDistribution);
  EXPECT_THROW(Pmf(Alphabet::binary(), {NAN, 1.0}), InvalidDistribution);
  EXPECT_NO_THROW(Pmf(Alphabet::binary(), {0.5, 0.5 + 1e-12}));
}

TEST(Alphabet, RejectsDuplicates) { EXPECT_THROW(Alphabet({"a", "a"}), Error); }

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(entropy(Pmf::uniform(Alphabet::range(8))), 3.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.11), h2(0.11), 1e-15);
  EXPECT_THROW(binary_entropy(1.5), DomainError);
}

TEST(Entropy, InverseBinaryEntropy) {
  for (double q : {0.0, 0.01, 0.11, 0.3, 0.5}) EXPECT_NEAR(binary_entropy_inv(binary_entropy(q)), q, 1e-9);
}

TEST(Joint, MarginalsAndConditioning) {
  const JointPmf j({Alphabet::binary(), Alphabet::range(3)}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
  const auto mx = j.marginal({0});
  EXPECT_NEAR(mx.probs()[0], 0.4, 1e-15);
  const auto c = j.condition_on(0, 1);
  EXPECT_NEAR(c.probs()[0], 0.5, 1e-12);
  EXPECT_THROW(j.marginal({2}), DomainError);
}

TEST(Compose, IdentityChannelCopiesTheSource) {
  const auto p = Pmf(Alphabet::range(3), {0.2, 0.3, 0.5});
  const auto j = compose(JointPmf(p), Channel::identity(p.alphabet()));
  EXPECT_NEAR(mutual_information(j, {0}, {1}), entropy(p), 1e-12);
  EXPECT_NEAR(conditional_entropy(j, {0}, {1}), 0.0, 1e-12);
}

// --- properties ----------------------------------------------------------------

TEST(EntropyProperty, BoundsAndChainRule) {
  Rng rng(11);
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const std::size_t nx = random_size(rng, 1, 5);
    const std::size_t ny = random_size(rng, 1, 5);
    const auto j = random_joint(rng, nx, ny, true);
    const double hx = entropy(j, {0});
    const double hy = entropy(j, {1});
    const double hxy = entropy(j);
    EXPECT_GE(hx, 0.0);
    EXPECT_LE(hx, std::log2(static_cast<double>(nx)) + 1e-12);
    EXPECT_NEAR(hxy, hx + conditional_entropy(j, {1}, {0}), 1e-12);
    EXPECT_LE(conditional_entropy(j, {0}, {1}), hx + 1e-12);
    const double i = mutual_information(j, {0}, {1});
    EXPECT_GE(i, -1e-12);
    EXPECT_NEAR(i, hx + hy - hxy, 1e-12);
    std::vector<double> flat(j.probs().begin(), j.probs().end());
    EXPECT_NEAR(hxy, h(flat), 1e-12);
  }
}

TEST(EntropyProperty, DataProcessing) {
  Rng rng(12);
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const auto px = random_pmf(rng, random_size(rng, 2, 4));
    const std::size_t ny = random_size(rng, 2, 4);
    const std::size_t nz = random_size(rng, 2, 4);
    const auto w1 = random_table(rng, px.size(), ny);
    const auto w2 = random_table(rng, ny, nz);
    const Channel c1({px.alphabet()}, {Alphabet::range(ny)}, std::vector<double>(w1.data().begin(), w1.data().end()));
    const Channel c2({Alphabet::range(ny)}, {Alphabet::range(nz)}, std::vector<double>(w2.data().begin(), w2.data().end()));
    const auto xyz = compose(compose(JointPmf(px), c1), c2, {1});
    EXPECT_LE(mutual_information(xyz, {0}, {2}), mutual_information(xyz, {0}, {1}) + 1e-12);
    EXPECT_NEAR(conditional_mutual_information(xyz, {0}, {2}, {1}), 0.0, 1e-12);
  }
}
