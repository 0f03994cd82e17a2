#include <gtest/gtest.h>

#include <limits>

#include "action_rdc/regions.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

namespace {

Channel random_binary_channel(Rng& rng) {
  const auto t = random_table(rng, 2, 2);
  return Channel({Alphabet::binary()}, {Alphabet::binary()}, std::vector<double>(t.data().begin(), t.data().end()));
}

}  // namespace

TEST(RateLimitedActionsProperty, DecompositionMatchesJointSearch) {
  Rng rng(61);
  const CostFn cost(Alphabet::binary(), {0.0, 1.0});
  for (std::size_t c = 0; c < 5; ++c) {
    const auto s = Pmf::bernoulli(0.15 + 0.35 * uniform01(rng));
    const auto d = DistortionFn::hamming(s.alphabet());
    const double D = 0.1 * uniform01(rng);
    const auto ch = random_binary_channel(rng);
    const double budget = 0.2 + 0.6 * uniform01(rng);
    const double ra = 0.3 * uniform01(rng);
    // The distortion constraint is tangent to coarse grids; 41 points per edge resolves it.
    SearchConfig cfg;
    cfg.grid_resolution = 41;
    const double a = prop_rlimit_rate(s, d, D, ch, cost, budget, ra, cfg, RlimitMode::Decomposition).rate;
    const double b = prop_rlimit_rate(s, d, D, ch, cost, budget, ra, cfg, RlimitMode::JointSearch).rate;
    EXPECT_NEAR(a, b, 5e-3) << "case " << c;
  }
}

TEST(RateLimitedActions, LimitsInTheLinkRate) {
  const auto s = Pmf::bernoulli(0.5);
  const auto d = DistortionFn::hamming(s.alphabet());
  const Channel bsc(Alphabet::binary(), Alphabet::binary(), {{0.9, 0.1}, {0.1, 0.9}});
  const auto cost = CostFn::zero(Alphabet::binary());
  const double rd = h2(0.5) - h2(0.05);
  const double cap = 1.0 - h2(0.1);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(prop_rlimit_rate(s, d, 0.05, bsc, cost, 0.0, 0.0, SearchConfig{}).rate, rd, 1e-4);
  EXPECT_NEAR(prop_rlimit_rate(s, d, 0.05, bsc, cost, 0.0, inf, SearchConfig{}).rate, rd - cap, 1e-4);
  EXPECT_NEAR(prop_rlimit_rate(s, d, 0.05, bsc, cost, 0.0, 0.1, SearchConfig{}).rate, rd - 0.1, 1e-4);
  EXPECT_THROW(prop_rlimit_rate(s, d, 0.05, bsc, cost, 0.0, -1.0, SearchConfig{}), DomainError);
}

TEST(SuccessiveRefinement, SmallRunMeetsItsConstraints) {
  // X uniform; action 1 (cost 1) shows X through a BSC(0.2), action 0 shows an erasure.
  const Alphabet b = Alphabet::binary();
  std::vector<double> t;
  for (std::size_t x = 0; x < 2; ++x) {
    t.insert(t.end(), {0.0, 0.0, 1.0});
    t.insert(t.end(), {x == 0 ? 0.8 : 0.2, x == 0 ? 0.2 : 0.8, 0.0});
  }
  const ActionModel m(b, CostFn(b, {0.0, 1.0}), Channel({b, b}, {Alphabet({"0", "1", "e"})}, t));
  const auto s = Pmf::uniform(Alphabet::binary());
  const auto d = DistortionFn::hamming(s.alphabet());
  SearchConfig cfg;
  cfg.grid_resolution = 11;
  cfg.refinement_rounds = 1;
  SrOptions opt;
  opt.r1_values = {0.5};
  opt.u_size = 1;
  opt.inner_resolution = 5;
  const auto pts = prop_sr_region(s, m, d, d, 0.25, 0.1, 0.5, cfg, opt);
  ASSERT_EQ(pts.size(), 1u);
  for (const auto& p : pts) {
    EXPECT_LE(p.details.at("I(X;Xhat1)"), p.rate + 1e-9);
    EXPECT_GE(p.sum_rate, p.details.at("I(X;Xhat1)") - 1e-9);
    EXPECT_LE(p.distortions[0], 0.25 + 1e-6);
    EXPECT_LE(p.distortions[1], 0.1 + 1e-6);
    EXPECT_LE(p.cost, 0.5 + 1e-9);
    // Even with Y at every symbol the sum cannot beat the conditional R(D): H2(0.2) - H2(0.1).
    EXPECT_GE(p.sum_rate, h2(0.2) - h2(0.1) - 1e-6);
  }
  opt.r1_values = {0.1};
  EXPECT_THROW(prop_sr_region(s, m, d, d, 0.25, 0.1, 0.5, cfg, opt), InfeasibleError);
}
