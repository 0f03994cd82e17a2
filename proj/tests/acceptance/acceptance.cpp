// One PASS/FAIL line per acceptance criterion. Tolerances and budgets are
// pinned here; exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "action_rdc/codingsim.hpp"
#include "action_rdc/regions.hpp"

using namespace action_rdc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [fail: " << what << "]";
    }
  }
};

double h2(double q) { return binary_entropy(q); }

JointPmf seeded_joint(std::size_t nx, std::size_t ny, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(nx * ny);
  double s = 0.0;
  for (auto& v : p) s += (v = 0.05 + uniform01(rng));
  for (auto& v : p) v /= s;
  return JointPmf({Alphabet::range(nx), Alphabet::range(ny)}, p);
}

Pmf x_marginal(const JointPmf& j) { return Pmf(j.axis(0), j.marginal_values({0})); }

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0.0) o.check(secs < limit_seconds, "runtime over " + std::to_string(limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.note.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "S-channel point values", 1.0, [](Outcome& o) {
    const double a = example1_rate(0.4, 0.0);
    const double b = example1_rate(0.4, -0.05);
    o.note << " R(0.4,0)=" << a << " R(0.4,-0.05)=" << b;
    o.check(std::abs(a - 0.9568) <= 1e-3, "R(0.4,0)");
    o.check(std::abs(b - 0.9554) <= 1e-3, "R(0.4,-0.05)");
  });

  criterion(2, "S-channel rate-cost curve", 120.0, [](Outcome& o) {
    std::vector<double> budgets;
    for (int i = 0; i < 26; ++i) budgets.push_back(0.5 * i / 25.0);
    budgets.back() = 0.5;
    SearchConfig cfg;
    cfg.grid_resolution = 41;
    cfg.seed = 1;
    const auto rows = example1_curve(budgets, cfg);
    const double cor1 = cor1_switching_rate(example1_joint(), 2).rate;
    for (const auto& r : rows) o.check(r.rate_opt <= r.rate_indep + 1e-9, "above independent curve at C=" + std::to_string(r.budget));
    o.note << " R(0.02)=" << rows[1].rate_opt << " R(0.5)=" << rows.back().rate_opt << " closed form " << cor1;
    o.check(rows[1].rate_opt >= 0.99, "R(0.02)");
    o.check(std::abs(rows.back().rate_opt - 0.946) <= 2e-3, "R(0.5) vs 0.946");
    o.check(std::abs(rows.back().rate_opt - cor1) <= 2e-3, "R(0.5) vs closed form");
  });

  criterion(3, "closed form vs grid search (10 joints)", 120.0, [](Outcome& o) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const std::size_t nx = 2 + i % 2;
      const std::size_t ny = 2 + (i / 2) % 2;
      const auto j = seeded_joint(nx, ny, derive_seed(2024, "acceptance.c3", i));
      SearchConfig cfg;
      cfg.seed = i;
      const double search = thm1_lossless_decoder_actions(x_marginal(j), switching_model(j, 2), 0.0, cfg).rate;
      worst = std::max(worst, std::abs(search - cor1_switching_rate(j, 2).rate));
    }
    o.note << " max |delta|=" << worst;
    o.check(worst <= 5e-3, "max delta");
  });

  criterion(4, "switching lossy anchors and search", 0.0, [](Outcome& o) {
    o.check(example2_rate(0.0, 0.0) == 0.5, "R(0,0)");
    for (double d = 0.0; d <= 0.5 + 1e-12; d += 0.05) o.check(example2_rate(0.5, d) == 0.0, "R(0.5,d)");
    o.check(std::abs(example2_rate(0.25, 0.25)) <= 1e-6, "R(0.25,0.25)");
    const auto j = example2_joint();
    const std::array<DistortionFn, 2> d{DistortionFn::hamming(j.axis(0)), DistortionFn::hamming(j.axis(0))};
    double worst = 0.0;
    for (double d1 : {0.0, 0.1, 0.2}) {
      for (double d2 : {0.0, 0.1, 0.2}) {
        const double s = prop2_switching_lossy(j, d, d1, d2, 0.0, {0.0, 0.0}, SearchConfig{}).rate;
        worst = std::max(worst, std::abs(s - example2_rate(d1, d2)));
      }
    }
    o.note << " 3x3 max |delta|=" << worst;
    o.check(worst <= 5e-3, "prop2 vs closed form");
  });

  criterion(5, "Blahut-Arimoto oracles", 0.0, [](Outcome& o) {
    double worst = 0.0;
    for (auto [p, D] : std::vector<std::pair<double, double>>{{0.5, 0.11}, {0.5, 0.25}, {0.3, 0.1}, {0.2, 0.05}, {0.1, 0.02}}) {
      const auto s = Pmf::bernoulli(p);
      worst = std::max(worst, std::abs(blahut_arimoto_rd(s, DistortionFn::hamming(s.alphabet()), D) - (h2(p) - h2(D))));
    }
    const Channel bsc(Alphabet::binary(), Alphabet::binary(), {{0.9, 0.1}, {0.1, 0.9}});
    const double cap = blahut_arimoto_capacity_cost(bsc, CostFn::zero(Alphabet::binary()), 0.0);
    o.note << " R(D) max |delta|=" << worst << " C(BSC 0.1)=" << cap;
    o.check(worst <= 1e-3, "R(D)");
    o.check(std::abs(cap - 0.5310) <= 1e-3, "capacity");
  });

  criterion(6, "complementary delivery closed forms", 0.0, [](Outcome& o) {
    const double g = gaussian_compdel_rate(1.0, 1.0, 0.25, 0.25);
    const double b = dsbs_compdel_rate(0.25, 0.05, 0.05);
    o.note << " gaussian=" << g << " dsbs=" << b;
    o.check(g == 1.0, "gaussian");
    o.check(std::abs(b - 0.52489) <= 1e-5, "dsbs");
  });

  criterion(7, "rate-limited actions decomposition", 0.0, [](Outcome& o) {
    Rng rng(derive_seed(7, "acceptance.c7"));
    const CostFn cost(Alphabet::binary(), {0.0, 1.0});
    // 41 points per edge: the distortion constraint is tangent to coarser grids.
    SearchConfig cfg;
    cfg.grid_resolution = 41;
    double worst = 0.0;
    for (int c = 0; c < 5; ++c) {
      const auto s = Pmf::bernoulli(0.15 + 0.35 * uniform01(rng));
      const auto d = DistortionFn::hamming(s.alphabet());
      const double D = 0.1 * uniform01(rng);
      const double e0 = 0.4 * uniform01(rng);
      const double e1 = 0.4 * uniform01(rng);
      const Channel ch(Alphabet::binary(), Alphabet::binary(), {{1.0 - e0, e0}, {e1, 1.0 - e1}});
      const double budget = 0.2 + 0.6 * uniform01(rng);
      const double ra = 0.3 * uniform01(rng);
      const double a = prop_rlimit_rate(s, d, D, ch, cost, budget, ra, cfg, RlimitMode::Decomposition).rate;
      const double b = prop_rlimit_rate(s, d, D, ch, cost, budget, ra, cfg, RlimitMode::JointSearch).rate;
      worst = std::max(worst, std::abs(a - b));
    }
    const auto s = Pmf::bernoulli(0.5);
    const auto d = DistortionFn::hamming(s.alphabet());
    const Channel bsc(Alphabet::binary(), Alphabet::binary(), {{0.9, 0.1}, {0.1, 0.9}});
    const auto zero = CostFn::zero(Alphabet::binary());
    // A noisier action channel keeps the large-R_A limit away from the clamp.
    const Channel noisy(Alphabet::binary(), Alphabet::binary(), {{0.7, 0.3}, {0.3, 0.7}});
    const auto big = prop_rlimit_rate(s, d, 0.11, noisy, zero, 0.0, std::numeric_limits<double>::infinity(), cfg);
    const double limit = blahut_arimoto_rd(s, d, 0.11) - blahut_arimoto_capacity_cost(noisy, zero, 0.0);
    const double r02 = prop_rlimit_rate(s, d, 0.11, bsc, zero, 0.0, 0.2, cfg).rate;
    o.note << " max |decomp-joint|=" << worst << " R_A=inf " << big.rate << " vs " << std::max(0.0, limit)
           << " R_A=0.2 " << r02;
    o.check(worst <= 5e-3, "decomposition vs joint");
    o.check(std::abs(big.rate - std::max(0.0, limit)) <= 1e-6, "large R_A limit");
    o.check(std::abs(r02 - 0.30009) <= 2e-3, "R_A=0.2 point");
  });

  criterion(8, "encoder-actions clamp and switch formula", 0.0, [](Outcome& o) {
    const JointPmf yx({Alphabet::binary(), Alphabet::binary()}, {0.5, 0.0, 0.0, 0.5});
    const auto r = thm_enc_lossless_rate(x_marginal(yx), switching_model(yx, 2), 0.0, SearchConfig{});
    const auto* pa = r.table("p(a|x)");
    const bool bijective = pa && std::abs((*pa)(0, 0) - (*pa)(1, 1)) < 1e-9 &&
                           std::min(std::abs((*pa)(0, 0)), std::abs((*pa)(0, 0) - 1.0)) < 1e-9;
    o.note << " rate=" << r.rate;
    o.check(r.rate == 0.0, "rate");
    o.check(bijective && std::abs((*pa)(0, 0) - (*pa)(1, 0)) > 0.5, "A a bijection of X");
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 3; ++i) {
      const auto j = seeded_joint(2, 2, derive_seed(8, "acceptance.c8", i));
      const auto e = example3_rate(j, 1.0, 0.0, 0.5, SearchConfig{});
      worst = std::max(worst, std::abs(e.details.at("formula") - e.details.at("generic")));
    }
    o.note << " switch max |formula-generic|=" << worst;
    o.check(worst <= 5e-3, "switch formula");
  });

  criterion(9, "identity switch exact invariant", 5.0, [](Outcome& o) {
    const auto u = Pmf::uniform(Alphabet::binary());
    const auto k2 = simulate_identity_switch(1000, 2, u, 100, 9);
    const auto k4 = simulate_identity_switch(1000, 4, u, 100, 9);
    o.note << " K=2 rate " << k2.rate << " errors " << k2.block_errors << "; K=4 rate " << k4.rate << " errors "
           << k4.block_errors;
    o.check(k2.rate == 0.5 && k2.block_errors == 0, "K=2");
    o.check(k4.rate == 0.75 && k4.block_errors == 0, "K=4");
  });

  criterion(10, "simulator statistics", 300.0, [](Outcome& o) {
    const auto j = example1_joint();
    const auto good = simulate_sw_modulo(j, 32, {0.15, std::nullopt}, 200, 10);
    const auto starved = simulate_sw_modulo(j, 32, {0.0, 0.5}, 200, 10);
    o.note << " sw margin .15 err " << good.error_rate << ", total .5 err " << starved.error_rate << ";";
    o.check(good.error_rate < 0.1, "sw margin");
    o.check(starved.error_rate > 0.5, "sw starved");
    double prev = std::numeric_limits<double>::infinity();
    bool identical = true;
    bool monotone = true;
    o.note << " dsbs";
    double last = 0.0;
    for (std::size_t n : {8u, 12u, 16u, 20u, 24u}) {
      const auto r = simulate_dsbs_compdel(0.25, 0.4, n, 200, 10);
      identical = identical && r.trial_distortions[0] == r.trial_distortions[1];
      monotone = monotone && r.distortion[0] <= prev + 1e-12;
      prev = last = r.distortion[0];
      o.note << " n=" << n << ":" << r.distortion[0];
    }
    o.check(identical, "decoders differ");
    o.check(monotone, "mean distortion increased with n");
    o.check(std::abs(last - 0.0866) <= 0.1, "n=24 within 0.1 of the floor");
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
