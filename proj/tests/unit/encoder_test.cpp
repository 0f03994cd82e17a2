#include <gtest/gtest.h>

#include <cmath>

#include "action_rdc/regions.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

namespace {

// One decoder whose side information is the action itself; action 1 costs 1.
ActionModel action_is_side_info() {
  const Alphabet x = Alphabet::binary();
  const Alphabet a = Alphabet::binary();
  std::vector<double> t;
  for (std::size_t xi = 0; xi < 2; ++xi) {
    for (std::size_t ai = 0; ai < 2; ++ai) {
      for (std::size_t y = 0; y < 2; ++y) t.push_back(y == ai ? 1.0 : 0.0);
    }
  }
  return ActionModel(x, CostFn(a, {0.0, 1.0}), Channel({x, a}, {a}, t));
}

}  // namespace

TEST(EncoderActions, ActionCarriedThroughSideInformation) {
  // The encoder can push up to H2(b) bits through the action, so the rate is
  // [H(X) - H2(min(b, 1/2))]+.
  const auto m = action_is_side_info();
  for (double p : {0.5, 0.3}) {
    const auto s = Pmf::bernoulli(p);
    for (double b : {0.0, 0.05, 0.15, 0.4}) {
      const auto r = thm_enc_lossless_rate(s, m, b, SearchConfig{});
      EXPECT_NEAR(r.rate, std::max(0.0, h2(p) - h2(std::min(b, 0.5))), 5e-3) << "p=" << p << " b=" << b;
      EXPECT_LE(r.cost, b + 1e-9);
    }
  }
}

TEST(EncoderActions, BijectiveActionNeedsNoRate) {
  const auto r = thm_enc_eval(Pmf::uniform(Alphabet::binary()), action_is_side_info(),
                              ConditionalTable(2, 2, {1.0, 0.0, 0.0, 1.0}));
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_NEAR(r.details.at("max_j H(X|Yj,A)"), 0.0, 1e-12);
}

TEST(EncoderActions, ClampedOptimumPrefersLeastRandomness) {
  const auto r = thm_enc_lossless_rate(Pmf::bernoulli(0.2), action_is_side_info(), 1.0, SearchConfig{});
  ASSERT_TRUE(r.clamped);
  EXPECT_LT(r.details.at("unclamped_rate"), 0.0);
  EXPECT_NEAR(r.details.at("H(A|X)"), 0.0, 1e-6);
}

TEST(EncoderActions, RequiresRecoverableActions) {
  // Both actions give Y = X, so the decoder cannot tell them apart.
  const Alphabet b = Alphabet::binary();
  const ActionModel m(b, CostFn::zero(b), Channel({b, b}, {b}, {1, 0, 1, 0, 0, 1, 0, 1}));
  const auto s = Pmf::uniform(b);
  EXPECT_THROW(require_action_recoverable(s, m), DomainError);
  EXPECT_THROW(thm_enc_lossless_rate(s, m, 0.0, SearchConfig{}), DomainError);
  EXPECT_NO_THROW(require_action_recoverable(s, switching_model(example1_joint(), 2)));
}

TEST(EncoderSwitchExampleProperty, FormulaEqualsGenericEvaluation) {
  Rng rng(51);
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const auto joint = random_joint(rng, random_size(rng, 2, 3), random_size(rng, 2, 3));
    const auto pa = random_table(rng, joint.dims()[0], 2);
    const auto r = example3_eval(joint, pa, 0.0, 0.0, 0.0);
    EXPECT_NEAR(r.details.at("formula"), r.details.at("generic"), 1e-10);
  }
}

TEST(EncoderSwitchExample, PrintedFormDiffersOnAsymmetricInstances) {
  const auto joint = example1_joint();
  const auto r = example3_eval(joint, ConditionalTable(2, 2, {0.9, 0.1, 0.3, 0.7}), 0.0, 0.0, 0.0);
  EXPECT_GT(std::abs(r.details.at("formula_as_printed") - r.details.at("formula")), 1e-3);
}

TEST(EncoderSwitchExample, BudgetIsEnforced) {
  EXPECT_THROW(example3_eval(example1_joint(), ConditionalTable(2, 2, {1.0, 0.0, 1.0, 0.0}), 1.0, 0.0, 0.5),
               InfeasibleError);
  const auto r = example3_rate(example1_joint(), 1.0, 0.0, 0.3, SearchConfig{});
  EXPECT_LE(r.cost, 0.3 + 1e-9);
  EXPECT_LE(r.details.at("alpha"), 0.3 + 1e-9);
}
