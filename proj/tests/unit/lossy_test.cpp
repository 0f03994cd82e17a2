#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "action_rdc/regions.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

namespace {

// Brute-force scan over alpha of the switching lossy example expression.
double example2_oracle(double d1, double d2) {
  auto term = [](double w, double d) {
    if (w <= 0.0) return 0.0;
    const double r = d / w;
    return r <= 0.5 ? w * (1.0 - h2(r)) : 0.0;
  };
  double best = std::numeric_limits<double>::infinity();
  const int steps = 200000;
  for (int i = 0; i <= steps; ++i) {
    const double a = static_cast<double>(i) / steps;
    best = std::min(best, std::max(term(a, d1), term(1.0 - a, d2)));
  }
  return best;
}

std::array<DistortionFn, 2> hamming2(const Alphabet& a) { return {DistortionFn::hamming(a), DistortionFn::hamming(a)}; }

ConditionalTable constant_table(std::size_t rows) { return ConditionalTable(rows, 1, std::vector<double>(rows, 1.0)); }

// Y1 is X through a BSC whose crossover depends on the action; Y2 erases Y1.
ActionModel degraded_model(double eps0, double eps1, double erase, std::vector<double> costs) {
  const Alphabet x = Alphabet::binary();
  const Alphabet a = Alphabet::binary();
  const Alphabet y2({"0", "1", "e"});
  std::vector<double> t;
  for (std::size_t xi = 0; xi < 2; ++xi) {
    for (std::size_t ai = 0; ai < 2; ++ai) {
      const double eps = ai == 0 ? eps0 : eps1;
      for (std::size_t y1 = 0; y1 < 2; ++y1) {
        const double p1 = y1 == xi ? 1.0 - eps : eps;
        for (std::size_t y2i = 0; y2i < 3; ++y2i) {
          const double q = y2i == 2 ? erase : (y2i == y1 ? 1.0 - erase : 0.0);
          t.push_back(p1 * q);
        }
      }
    }
  }
  return ActionModel(x, CostFn(a, std::move(costs)), Channel({x, a}, {Alphabet::binary(), y2}, t));
}

}  // namespace

TEST(SwitchingLossyExample, Anchors) {
  EXPECT_EQ(example2_rate(0.0, 0.0), 0.5);
  for (double d = 0.0; d <= 0.5; d += 0.05) {
    EXPECT_EQ(example2_rate(0.5, d), 0.0) << d;
    EXPECT_EQ(example2_rate(d, 0.5), 0.0) << d;
  }
  EXPECT_NEAR(example2_rate(0.25, 0.25), 0.0, 1e-6);
}

TEST(SwitchingLossyExample, OracleValuesAreFrozen) {
  EXPECT_NEAR(example2_oracle(0.1, 0.1), 0.1390359, 1e-6);
  EXPECT_NEAR(example2_oracle(0.0, 0.0), 0.5, 1e-12);
}

TEST(SwitchingLossyExample, MatchesBruteForceScan) {
  for (double d1 : {0.0, 0.03, 0.1, 0.2, 0.3}) {
    for (double d2 : {0.0, 0.05, 0.15, 0.4}) {
      EXPECT_NEAR(example2_rate(d1, d2), example2_oracle(d1, d2), 2e-5) << d1 << "," << d2;
    }
  }
}

TEST(SwitchingLossyExampleProperty, SymmetricAndNonincreasing) {
  for (double d1 = 0.0; d1 <= 0.5; d1 += 0.05) {
    for (double d2 = 0.0; d2 <= 0.5; d2 += 0.05) {
      const double r = example2_rate(d1, d2);
      EXPECT_GE(r, 0.0);
      EXPECT_NEAR(r, example2_rate(d2, d1), 1e-9);
      if (d1 + 0.05 <= 0.5) {
        EXPECT_LE(example2_rate(d1 + 0.05, d2), r + 1e-9);
      }
    }
  }
}

TEST(SwitchingLossyExample, RejectsOutOfRangeTargets) { EXPECT_THROW(example2_rate(0.6, 0.1), DomainError); }

TEST(SwitchingLossy, SearchMatchesExampleClosedForm) {
  const auto j = example2_joint();
  for (auto [d1, d2] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.1, 0.2}}) {
    const auto r = prop2_switching_lossy(j, hamming2(j.axis(0)), d1, d2, 0.0, {0.0, 0.0}, SearchConfig{});
    EXPECT_NEAR(r.rate, example2_rate(d1, d2), 5e-3);
    EXPECT_LE(r.distortions[0], d1 + 1e-6);
    EXPECT_LE(r.distortions[1], d2 + 1e-6);
  }
}

TEST(SwitchingLossy, SideInformationEqualToSourceNeedsNoRate) {
  // Y = X: whichever decoder lacks X still sees it through Y.
  const JointPmf j({Alphabet::binary(), Alphabet::binary()}, {0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(prop2_switching_lossy(j, hamming2(j.axis(0)), 0.0, 0.0, 0.0, {0.0, 0.0}, SearchConfig{}).rate, 0.0,
              1e-9);
}

TEST(SwitchingLossyProperty, EvalEqualsLayeredSchemeOnSwitchingModel) {
  Rng rng(41);
  for (std::size_t c = 0; c < 30; ++c) {
    const auto joint = random_joint(rng, 2, random_size(rng, 1, 3));
    const Pmf source(joint.axis(0), joint.marginal_values({0}));
    const auto pa = random_table(rng, 2, 2);
    const auto pu1 = random_table(rng, 2, 3);
    const auto pu2 = random_table(rng, 2, 3);
    const auto d = hamming2(joint.axis(0));
    const auto direct = prop2_eval(joint, d, pa, pu1, pu2);
    // U follows p(u2|x) under action 1 and p(u1|x) under action 2; V is constant.
    std::vector<double> pu;
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t u = 0; u < 3; ++u) pu.push_back(pu2(x, u));
      for (std::size_t u = 0; u < 3; ++u) pu.push_back(pu1(x, u));
    }
    const LayeredTables t{pa, ConditionalTable(4, 3, pu), constant_table(12), constant_table(12)};
    const auto layered = thm2_lossy_achievable_eval(source, prop2_model(joint), d, t);
    EXPECT_NEAR(direct.rate, layered.rate, 1e-10);
    EXPECT_NEAR(direct.distortions[0], layered.distortions[0], 1e-10);
    EXPECT_NEAR(direct.distortions[1], layered.distortions[1], 1e-10);
  }
}

TEST(Degraded, DetectsMarkovStructure) {
  EXPECT_TRUE(degraded_side_information(degraded_model(0.1, 0.2, 0.3, {0.0, 1.0})));
  EXPECT_FALSE(degraded_side_information(prop2_model(example1_joint())));
  EXPECT_FALSE(degraded_side_information(example1_model()));
}

TEST(DegradedProperty, HeegardBergerKaspiEqualsLayeredWithTrivialV2) {
  Rng rng(42);
  for (std::size_t c = 0; c < 30; ++c) {
    const auto m = degraded_model(0.05 + 0.4 * uniform01(rng), 0.05 + 0.4 * uniform01(rng), uniform01(rng), {0.0, 1.0});
    const auto source = random_pmf(rng, 2);
    const auto d = hamming2(source.alphabet());
    const auto pa = random_table(rng, 2, 2);
    const auto pu = random_table(rng, 4, 2);
    const auto pv1 = random_table(rng, 8, 2);
    const auto hb = hb_kaspi_eval(source, m, d, pa, pu, pv1);
    const auto layered = thm2_lossy_achievable_eval(source, m, d, {pa, pu, pv1, constant_table(8)});
    EXPECT_NEAR(hb.rate, layered.rate, 1e-10);
    EXPECT_NEAR(hb.distortions[1], layered.distortions[1], 1e-10);
  }
}

TEST(Degraded, SearchRejectsNonDegradedModels) {
  const auto j = example1_joint();
  const Pmf s(j.axis(0), j.marginal_values({0}));
  EXPECT_THROW(hb_kaspi_search(s, example1_model(), hamming2(s.alphabet()), {0.1, 0.1}, 1.0, SearchConfig{}),
               DomainError);
}

TEST(CausalLossy, NoSideInformationAtZeroDistortionCostsTheEntropy) {
  const auto j = example2_joint();
  const Pmf s(j.axis(0), j.marginal_values({0}));
  const auto m = switching_model(j, 2);
  const std::vector<DistortionFn> d(2, DistortionFn::hamming(s.alphabet()));
  EXPECT_NEAR(thm3_causal_lossy(s, m, d, {0.0, 0.0}, 0.0, SearchConfig{}).rate, 1.0, 1e-3);
  EXPECT_NEAR(thm3_causal_lossy(s, m, d, {0.5, 0.5}, 0.0, SearchConfig{}).rate, 0.0, 1e-9);
}

TEST(CausalLossyProperty, RateIsNonincreasingInTheTargets) {
  const auto m = example1_model();
  const Pmf s = Pmf::uniform(Alphabet::binary());
  const std::vector<DistortionFn> d(2, DistortionFn::hamming(s.alphabet()));
  double prev = std::numeric_limits<double>::infinity();
  for (double D : {0.0, 0.1, 0.2, 0.3, 0.5}) {
    const auto r = thm3_causal_lossy(s, m, d, {D, D}, 1.0, SearchConfig{});
    EXPECT_GE(r.rate, 0.0);
    EXPECT_LE(r.rate, prev + 2e-3) << "D=" << D;
    for (double dj : r.distortions) EXPECT_LE(dj, D + 1e-6);
    prev = r.rate;
  }
}
