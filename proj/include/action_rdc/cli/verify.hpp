#pragma once

// Oracle-equivalence suites: each check compares a value against an
// independent reference and passes when the gap is within tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "action_rdc/cli/config.hpp"
#include "action_rdc/codingsim.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/regions.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;

  double delta() const { return std::abs(value - reference); }
  bool pass() const { return std::isfinite(value) && delta() <= tolerance; }
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }

  json to_json() const {
    json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["pass"] = pass();
    j["checks"] = json::array();
    for (const auto& c : checks) {
      j["checks"].push_back({{"name", c.name},
                             {"value", c.value},
                             {"reference", c.reference},
                             {"delta", c.delta()},
                             {"tolerance", c.tolerance},
                             {"pass", c.pass()}});
    }
    return j;
  }
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"closed-form-vs-search", "ba-vs-gridsearch", "sim-vs-theory"};
  return s;
}

namespace detail {

inline std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Random strictly positive joint over an nx x ny alphabet.
inline JointPmf random_joint(std::size_t nx, std::size_t ny, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(nx * ny);
  double total = 0.0;
  for (auto& v : p) {
    v = 0.05 + uniform01(rng);
    total += v;
  }
  for (auto& v : p) v /= total;
  return JointPmf({Alphabet::range(nx), Alphabet::range(ny)}, p);
}

inline double info_from_joint(std::span<const double> pxy, std::size_t nx, std::size_t ny) {
  std::vector<double> px(nx, 0.0);
  std::vector<double> py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      px[x] += pxy[x * ny + y];
      py[y] += pxy[x * ny + y];
    }
  }
  return std::max(0.0, entropy_bits(px) + entropy_bits(py) - entropy_bits(pxy));
}

/// Binary Hamming R(D) as max over s >= 0 of min over p(xhat|x) of
/// I(X;Xhat) + s (E d - D). The inner problem is unconstrained, which suits
/// grid search better than a hard distortion constraint.
inline double grid_rd_dual(std::span<const double> px, double D, SearchConfig cfg) {
  // Two free parameters, so a fine grid is cheap. Coarse grids stall at
  // corners where the minimizer needs very unequal steps in the two rows.
  cfg.grid_resolution = std::max<std::size_t>(cfg.grid_resolution, 201);
  cfg.refinement_rounds = std::max<std::size_t>(cfg.refinement_rounds, 6);
  SimplexProduct space;
  space.add_block(2, 2);
  auto inner = [&](double s) {
    PointObjective f = [&](std::span<const double> x) {
      const auto q = space.view(x, 0);
      std::vector<double> pxy(4);
      double dist = 0.0;
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
          pxy[a * 2 + b] = px[a] * q(a, b);
          if (a != b) dist += pxy[a * 2 + b];
        }
      }
      return info_from_joint(pxy, 2, 2) + s * (dist - D);
    };
    return grid_search(space, f, {}, cfg).value;
  };
  return -scan_then_golden([&](double s) { return -inner(s); }, 0.0, 20.0, 41, 1e-6).value;
}

inline VerifyReport closed_form_vs_search(std::uint64_t seed) {
  VerifyReport rep;
  SearchConfig cfg;
  cfg.seed = seed;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::size_t nx = i < 5 ? 2 : 3;
    const std::size_t ny = i % 2 == 0 ? 2 : 3;
    const std::size_t k = 2 + i % 2;
    const auto joint = random_joint(nx, ny, derive_seed(seed, "verify.joint", i));
    const Pmf source(joint.axis(0), joint.marginal_values({0}));
    const auto model = switching_model(joint, k);
    const double search = thm1_lossless_decoder_actions(source, model, 0.0, cfg).rate;
    rep.checks.push_back({"cor1_vs_thm1[" + std::to_string(i) + "] |X|=" + std::to_string(nx) +
                              " |Y|=" + std::to_string(ny) + " K=" + std::to_string(k),
                          search, cor1_switching_rate(joint, k).rate, 5e-3});
  }
  const auto ex1 = example1_joint();
  rep.checks.push_back({"example1_full_budget_vs_cor1", example1_rate(0.5, 0.0), cor1_switching_rate(ex1, 2).rate,
                        1e-9});
  const auto ex2 = example2_joint();
  const std::array<DistortionFn, 2> ham{DistortionFn::hamming(ex2.axis(0)), DistortionFn::hamming(ex2.axis(0))};
  for (const auto& [d1, d2] : std::vector<std::pair<double, double>>{{0.1, 0.1}, {0.2, 0.1}}) {
    const double s = prop2_switching_lossy(ex2, ham, d1, d2, 0.0, {0.0, 0.0}, cfg).rate;
    rep.checks.push_back({"example2_vs_prop2(" + fmt_short(d1) + "," + fmt_short(d2) + ")", s, example2_rate(d1, d2),
                          5e-3});
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto joint = random_joint(2, 2, derive_seed(seed, "verify.example3", i));
    const auto r = example3_rate(joint, 1.0, 0.0, 0.5, cfg);
    rep.checks.push_back({"example3_formula_vs_generic[" + std::to_string(i) + "]", r.details.at("formula"),
                          r.details.at("generic"), 5e-3});
  }
  return rep;
}

inline VerifyReport ba_vs_gridsearch(std::uint64_t seed) {
  VerifyReport rep;
  SearchConfig cfg;
  cfg.seed = seed;
  Rng rng(derive_seed(seed, "verify.ba"));
  for (std::size_t i = 0; i < 5; ++i) {
    const double p = 0.05 + 0.45 * uniform01(rng);
    const double D = (0.05 + 0.9 * uniform01(rng)) * p;
    const auto src = Pmf::bernoulli(p);
    const auto ham = DistortionFn::hamming(src.alphabet());
    const double ba = blahut_arimoto_rd(src, ham, D);
    const double grid = grid_rd_dual(src.probs(), D, cfg);
    const std::string tag = "[" + std::to_string(i) + "] p=" + fmt_short(p) + " D=" + fmt_short(D);
    rep.checks.push_back({"ba_rd_vs_grid" + tag, ba, grid, 2e-3});
    rep.checks.push_back({"ba_rd_vs_closed_form" + tag, ba, binary_entropy(p) - binary_entropy(D), 1e-3});
  }
  for (double eps : {0.1, 0.25}) {
    const Channel bsc(Alphabet::binary(), Alphabet::binary(), {{1.0 - eps, eps}, {eps, 1.0 - eps}});
    const double ba = blahut_arimoto_capacity_cost(bsc, CostFn::zero(Alphabet::binary()), 0.0);
    SimplexProduct space;
    space.add_block(1, 2);
    PointObjective f = [&](std::span<const double> x) {
      std::vector<double> pxy{x[0] * (1.0 - eps), x[0] * eps, x[1] * eps, x[1] * (1.0 - eps)};
      return -info_from_joint(pxy, 2, 2);
    };
    const auto g = grid_search(space, f, {}, cfg);
    const std::string tag = "(BSC " + fmt_short(eps) + ")";
    rep.checks.push_back({"ba_capacity_vs_grid" + tag, ba, -g.value, 2e-3});
    rep.checks.push_back({"ba_capacity_vs_closed_form" + tag, ba, 1.0 - binary_entropy(eps), 1e-3});
  }
  return rep;
}

inline VerifyReport sim_vs_theory(std::uint64_t seed) {
  VerifyReport rep;
  const auto uni = Pmf::uniform(Alphabet::binary());
  for (std::size_t k : {2, 4}) {
    const auto r = simulate_identity_switch(1000, k, uni, 100, derive_seed(seed, "verify.identity", k));
    const std::string tag = "(K=" + std::to_string(k) + ")";
    rep.checks.push_back({"identity_switch_errors" + tag, static_cast<double>(r.block_errors), 0.0, 0.0});
    rep.checks.push_back({"identity_switch_rate" + tag, r.rate, 1.0 - 1.0 / static_cast<double>(k), 0.0});
  }
  // Error-rate checks: value is the empirical rate, reference 0 or 1, tolerance the allowed slack.
  const auto sch = example1_joint();
  SwModuloOptions above;
  above.margin = 0.15;
  const auto ok = simulate_sw_modulo(sch, 32, above, 200, derive_seed(seed, "verify.sw"));
  rep.checks.push_back({"sw_modulo_error_above_rate", ok.error_rate, 0.0, 0.1});
  SwModuloOptions below;
  below.total_rate = 0.5;
  const auto bad = simulate_sw_modulo(sch, 32, below, 200, derive_seed(seed, "verify.sw"));
  rep.checks.push_back({"sw_modulo_error_below_rate", bad.error_rate, 1.0, 0.5});
  const auto ds = simulate_dsbs_compdel(0.25, 0.4, 16, 50, derive_seed(seed, "verify.dsbs"));
  double gap = 0.0;
  for (std::size_t t = 0; t < ds.trials; ++t) {
    gap = std::max(gap, std::abs(ds.trial_distortions[0][t] - ds.trial_distortions[1][t]));
  }
  rep.checks.push_back({"dsbs_decoders_identical", gap, 0.0, 0.0});
  return rep;
}

}  // namespace detail

inline VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
  VerifyReport rep;
  if (suite == "closed-form-vs-search") {
    rep = detail::closed_form_vs_search(seed);
  } else if (suite == "ba-vs-gridsearch") {
    rep = detail::ba_vs_gridsearch(seed);
  } else if (suite == "sim-vs-theory") {
    rep = detail::sim_vs_theory(seed);
  } else {
    throw ConfigError("suite", "unknown verify suite '" + suite +
                                   "' (expected closed-form-vs-search, ba-vs-gridsearch or sim-vs-theory)");
  }
  rep.suite = suite;
  rep.seed = seed;
  return rep;
}

}  // namespace action_rdc::cli
