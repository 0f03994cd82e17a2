#include <gtest/gtest.h>

#include "action_rdc/codingsim.hpp"
#include "action_rdc/regions.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

TEST(IdentitySwitch, ExactRecoveryAtTheExactRate) {
  for (std::size_t k : {2u, 3u, 4u}) {
    const auto r = simulate_identity_switch(120, k, Pmf::uniform(Alphabet::binary()), 50, 1);
    EXPECT_EQ(r.block_errors, 0u);
    EXPECT_DOUBLE_EQ(r.rate, (static_cast<double>(k) - 1.0) / static_cast<double>(k));
  }
  EXPECT_THROW(simulate_identity_switch(10, 3, Pmf::uniform(Alphabet::binary()), 5, 1), DomainError);
  EXPECT_THROW(simulate_identity_switch(10, 2, Pmf::bernoulli(0.3), 5, 1), DomainError);
}

TEST(SwModulo, SameSeedSameReport) {
  const auto j = example1_joint();
  const auto a = simulate_sw_modulo(j, 16, {0.1, std::nullopt}, 40, 9);
  const auto b = simulate_sw_modulo(j, 16, {0.1, std::nullopt}, 40, 9);
  EXPECT_EQ(a.block_errors, b.block_errors);
  EXPECT_EQ(a.rate, b.rate);
}

TEST(SwModulo, MarginDrivesErrorsDownAndStarvingRateFails) {
  const auto j = example1_joint();
  const auto good = simulate_sw_modulo(j, 32, {0.15, std::nullopt}, 200, 4);
  EXPECT_LE(good.error_rate, 0.1);
  const auto starved = simulate_sw_modulo(j, 32, {0.0, 0.5}, 200, 4);
  EXPECT_GT(starved.error_rate, 0.5);
  EXPECT_THROW(simulate_sw_modulo(j, 15, {}, 10, 1), DomainError);
}

TEST(DsbsSimulation, BothDecodersSeeTheSameError) {
  const auto r = simulate_dsbs_compdel(0.25, 0.4, 16, 50, 2);
  ASSERT_EQ(r.distortion.size(), 2u);
  EXPECT_EQ(r.trial_distortions[0], r.trial_distortions[1]);
  EXPECT_GE(r.distortion[0], dsbs_compdel(0.25, 0.0, 0.0).distortions[0]);
  EXPECT_LE(r.distortion[0], 0.25);
}

TEST(DsbsSimulation, RejectsHugeCodebooks) {
  EXPECT_THROW(simulate_dsbs_compdel(0.25, 0.9, 64, 1, 1), BudgetExhausted);
  EXPECT_THROW(simulate_dsbs_compdel(0.0, 0.4, 16, 1, 1), DomainError);
}

TEST(FourStatePartitionSim, BothDecodersSeeingAnIdentityNeedNothing) {
  const JointPmf j({Alphabet::binary(), Alphabet::binary()}, {0.5, 0.0, 0.0, 0.5});
  const ConditionalTable always_both(2, 4, {0, 0, 0, 1, 0, 0, 0, 1});
  const auto r = simulate_cor2_partition(j, always_both, {0, 0, 0, 1}, 24, 0.05, 30, 6);
  EXPECT_EQ(r.block_errors, 0u);
  EXPECT_NEAR(r.cost, 1.0, 1e-12);
}
