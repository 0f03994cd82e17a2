#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "action_rdc/optim.hpp"
#include "support.hpp"

using namespace action_rdc;
using namespace testsupport;

namespace {

double sq(double v) { return v * v; }

}  // namespace

TEST(GridSearch, FindsInteriorMinimum) {
  SimplexProduct space;
  space.add_block(1, 3);
  PointObjective f = [](std::span<const double> x) { return sq(x[0] - 0.2) + sq(x[1] - 0.3) + sq(x[2] - 0.5); };
  const auto r = grid_search(space, f, {}, SearchConfig{});
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.argmin[0], 0.2, 1e-3);
  EXPECT_NEAR(r.argmin[1], 0.3, 1e-3);
  EXPECT_LT(r.value, 1e-6);
}

TEST(GridSearch, RespectsDisallowedCells) {
  SimplexProduct space;
  space.add_block(2, 2, {true, false});
  PointObjective f = [](std::span<const double> x) { return x[0]; };
  const auto r = grid_search(space, f, {}, SearchConfig{});
  EXPECT_DOUBLE_EQ(r.argmin[1], 0.0);
  EXPECT_DOUBLE_EQ(r.argmin[3], 0.0);
}

TEST(GridSearch, ReportsInfeasibility) {
  SimplexProduct space;
  space.add_block(1, 2);
  PointObjective f = [](std::span<const double>) { return 0.0; };
  PointPredicate never = [](std::span<const double>) { return false; };
  EXPECT_FALSE(grid_search(space, f, never, SearchConfig{}).feasible);
}

TEST(GridSearch, ThrowsWhenTheBudgetEndsBeforeAFeasiblePoint) {
  SimplexProduct space;
  space.add_block(3, 3);
  SearchConfig cfg;
  cfg.max_evals = 5;
  PointObjective f = [](std::span<const double> x) {
    return x[0] > 0.99 && x[3] > 0.99 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  EXPECT_THROW(grid_search(space, f, {}, cfg), BudgetExhausted);
}

TEST(GridSearch, DeterministicForASeed) {
  SimplexProduct space;
  space.add_block(3, 3);
  PointObjective f = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::sin(3.0 * x[i] + static_cast<double>(i));
    return s;
  };
  SearchConfig cfg;
  cfg.seed = 99;
  const auto a = grid_search(space, f, {}, cfg);
  const auto b = grid_search(space, f, {}, cfg);
  EXPECT_EQ(a.argmin, b.argmin);
  EXPECT_EQ(a.evals, b.evals);
}

TEST(GridSearch, SeedPointIsNeverBeaten) {
  SimplexProduct space;
  space.add_block(1, 2);
  PointObjective f = [](std::span<const double> x) { return std::abs(x[0] - 0.123456); };
  SearchConfig cfg;
  cfg.refinement_rounds = 0;
  const auto r = grid_search(space, f, {}, cfg, {{0.123456, 1.0 - 0.123456}});
  EXPECT_DOUBLE_EQ(r.value, 0.0);
}

TEST(ConfigValidation, RejectsDegenerateSettings) {
  SearchConfig c;
  c.grid_resolution = 1;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(ScalarSearch, GoldenSectionOnAParabola) {
  const auto r = golden_section([](double x) { return sq(x - 0.37); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.x, 0.37, 1e-8);
}

// Bernoulli sources under Hamming distortion have R(D) = H(p) - H(D).
TEST(BlahutArimoto, RateDistortionMatchesBinaryClosedForm) {
  for (auto [p, D] : std::vector<std::pair<double, double>>{{0.5, 0.11}, {0.25, 0.05}, {0.4, 0.2}, {0.1, 0.01}}) {
    const auto src = Pmf::bernoulli(p);
    EXPECT_NEAR(blahut_arimoto_rd(src, DistortionFn::hamming(src.alphabet()), D), h2(p) - h2(D), 1e-4)
        << "p=" << p << " D=" << D;
  }
}

TEST(BlahutArimoto, RateIsZeroBeyondMaxDistortion) {
  const auto src = Pmf::bernoulli(0.3);
  EXPECT_DOUBLE_EQ(blahut_arimoto_rd(src, DistortionFn::hamming(src.alphabet()), 0.3), 0.0);
}

TEST(BlahutArimoto, CapacityOfBinarySymmetricChannel) {
  const Channel bsc(Alphabet::binary(), Alphabet::binary(), {{0.9, 0.1}, {0.1, 0.9}});
  EXPECT_NEAR(blahut_arimoto_capacity_cost(bsc, CostFn::zero(Alphabet::binary()), 0.0), 1.0 - h2(0.1), 1e-6);
}

TEST(BlahutArimoto, CostConstraintBindsOnTheZChannel) {
  // Noiseless binary channel, input 1 costs 1: C(b) = H2(min(b, 1/2)).
  const Channel id = Channel::identity(Alphabet::binary());
  const CostFn cost(Alphabet::binary(), {0.0, 1.0});
  for (double b : {0.05, 0.2, 0.4, 0.8}) {
    EXPECT_NEAR(blahut_arimoto_capacity_cost(id, cost, b), h2(std::min(b, 0.5)), 1e-5) << "b=" << b;
  }
}

TEST(BlahutArimotoProperty, RateDistortionIsNonincreasingAndConvexish) {
  Rng rng(21);
  for (std::size_t c = 0; c < 15; ++c) {
    const auto src = random_pmf(rng, random_size(rng, 2, 4));
    const auto d = DistortionFn::hamming(src.alphabet());
    double prev = std::numeric_limits<double>::infinity();
    for (double D = 0.0; D <= 0.6; D += 0.1) {
      const double r = blahut_arimoto_rd(src, d, D);
      EXPECT_GE(r, -1e-9);
      EXPECT_LE(r, prev + 1e-6);
      EXPECT_LE(r, entropy(src) + 1e-9);
      prev = r;
    }
  }
}
