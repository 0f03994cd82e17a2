#pragma once

// Lossless description with actions taken at the decoders: the general
// min over p(a|x) of I(X;A) + max_j H(X|Y_j,A), its switching specializations
// and the binary S-channel example.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/parallel.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/model.hpp"

namespace action_rdc {

namespace detail {

inline double thm1_objective(const ActionModel& m, std::span<const double> px, const TableView& pa_x) {
  const auto pxa = joint_xa(px, pa_x);
  double worst = 0.0;
  for (std::size_t j = 0; j < m.decoders(); ++j) worst = std::max(worst, cond_entropy_x_given_ya(m, j, pxa));
  return info_xa(pxa, px.size(), pa_x.cols) + worst;
}

inline bool within_budget(double cost, double budget) { return cost <= budget + 1e-12; }

}  // namespace detail

/// I(X;A) + max_j H(X|Y_j,A) at a given p(a|x).
inline RatePoint thm1_eval(const Pmf& source, const ActionModel& model, const ConditionalTable& pa_x) {
  detail::require_source_matches(source, model, "thm1_eval");
  if (pa_x.rows() != source.size() || pa_x.cols() != model.actions().size()) {
    throw DomainError("thm1_eval: p(a|x) must be |X| x |A|");
  }
  const TableView v{pa_x.data(), pa_x.rows(), pa_x.cols()};
  const auto pxa = detail::joint_xa(source.probs(), v);
  RatePoint p;
  p.rate = detail::thm1_objective(model, source.probs(), v);
  p.cost = detail::expected_cost(model.cost(), pxa, source.size());
  p.method = Method::Evaluation;
  p.achieving.push_back({"p(a|x)", pa_x});
  p.details["I(X;A)"] = detail::info_xa(pxa, source.size(), pa_x.cols());
  for (std::size_t j = 0; j < model.decoders(); ++j) {
    p.details["H(X|Y" + std::to_string(j + 1) + ",A)"] = detail::cond_entropy_x_given_ya(model, j, pxa);
  }
  return p;
}

/// Minimum lossless rate with actions at the decoders under E Λ(A) ≤ budget,
/// by grid search over p(a|x). `seeds` are extra candidate tables.
inline RatePoint thm1_lossless_decoder_actions(const Pmf& source, const ActionModel& model, double budget,
                                               const SearchConfig& cfg,
                                               const std::vector<ConditionalTable>& seeds = {}) {
  detail::require_source_matches(source, model, "thm1_lossless_decoder_actions");
  detail::require_feasible_budget(model.cost(), budget, "thm1_lossless_decoder_actions");
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const auto px = source.probs();

  SimplexProduct space;
  space.add_block(nx, na, model.cost().allowed());
  PointObjective f = [&](std::span<const double> x) {
    return detail::thm1_objective(model, px, space.view(x, 0));
  };
  PointPredicate ok;
  if (std::isfinite(budget)) {
    ok = [&](std::span<const double> x) {
      const auto v = space.view(x, 0);
      double c = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < na; ++a) {
          if (v(i, a) > 0.0) c += px[i] * v(i, a) * model.cost()(a);
        }
      }
      return detail::within_budget(c, budget);
    };
  }
  std::vector<std::vector<double>> seed_points;
  for (const auto& s : seeds) seed_points.emplace_back(s.data().begin(), s.data().end());
  const auto res = grid_search(space, f, ok, cfg, seed_points);
  if (!res.feasible) throw InfeasibleError("thm1_lossless_decoder_actions: no p(a|x) meets the budget");
  auto p = thm1_eval(source, model, ConditionalTable(nx, na, res.argmin));
  p.rate = res.value;
  p.method = Method::Search;
  p.evals = res.evals;
  return p;
}

/// H(X|Y) + (K-1)/K I(X;Y): K decoders, one of which sees Y per letter, no cost.
inline RatePoint cor1_switching_rate(const JointPmf& joint, std::size_t k) {
  require_xy(joint, "cor1_switching_rate");
  if (k < 1) throw DomainError("cor1_switching_rate: K must be >= 1");
  const double hxy = conditional_entropy(joint, {0}, {1});
  const double ixy = mutual_information(joint, {0}, {1});
  RatePoint p;
  p.rate = hxy + static_cast<double>(k - 1) / static_cast<double>(k) * ixy;
  p.method = Method::ClosedForm;
  p.details["H(X|Y)"] = hxy;
  p.details["I(X;Y)"] = ixy;
  const std::vector<double> uniform(k, 1.0 / static_cast<double>(k));
  p.achieving.push_back({"p(a|x)", ConditionalTable::constant_rows(joint.dims()[0], uniform)});
  return p;
}

namespace detail {

// The four-state switching expression at p(a|x), actions ordered 0..3.
inline double cor2_objective(std::span<const double> px, std::span<const double> wyx, std::size_t ny,
                             const TableView& pa_x) {
  const std::size_t nx = px.size();
  const auto pxa = joint_xa(px, pa_x);
  double value = info_xa(pxa, nx, 4);
  std::array<double, 4> pj{};
  std::array<double, 4> h_given_a{};
  std::array<double, 4> h_given_ya{};
  std::vector<double> col(nx);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t x = 0; x < nx; ++x) pj[a] += pxa[x * 4 + a];
    if (pj[a] <= 0.0) continue;
    // Weighted by P(A=a): p_a H(X|A=a) and p_a H(X|Y,A=a).
    for (std::size_t x = 0; x < nx; ++x) col[x] = pxa[x * 4 + a];
    h_given_a[a] = entropy_bits(col) + pj[a] * std::log2(pj[a]);
    double h = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      double tot = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        col[x] = pxa[x * 4 + a] * wyx[x * ny + y];
        tot += col[x];
      }
      if (tot <= 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x) {
        if (col[x] > 0.0) h -= col[x] * std::log2(col[x] / tot);
      }
    }
    h_given_ya[a] = h;
  }
  value += h_given_a[0] + h_given_ya[1] + h_given_ya[2] + h_given_ya[3];
  const double t1 = std::max(0.0, h_given_a[1] - h_given_ya[1]);
  const double t2 = std::max(0.0, h_given_a[2] - h_given_ya[2]);
  return value + std::max(t1, t2);
}

}  // namespace detail

/// Four-state switching rate at a given p(a|x) (|X| x 4, actions 0..3).
inline RatePoint cor2_eval(const JointPmf& joint, std::array<double, 4> costs, const ConditionalTable& pa_x) {
  require_xy(joint, "cor2_eval");
  const std::size_t nx = joint.dims()[0];
  if (pa_x.rows() != nx || pa_x.cols() != 4) throw DomainError("cor2_eval: p(a|x) must be |X| x 4");
  const auto px = joint.marginal_values({0});
  const auto wyx = conditional_y_given_x(joint);
  const TableView v{pa_x.data(), nx, 4};
  RatePoint p;
  p.rate = detail::cor2_objective(px, wyx, joint.dims()[1], v);
  const auto pxa = detail::joint_xa(px, v);
  p.cost = detail::expected_cost(CostFn(Alphabet({"0", "1", "2", "3"}), {costs.begin(), costs.end()}), pxa, nx);
  p.method = Method::Evaluation;
  p.achieving.push_back({"p(a|x)", pa_x});
  return p;
}

/// Four-state switching with costs C0..C3 (+inf forbids a state) under a budget.
inline RatePoint cor2_switching_cost_rate(const JointPmf& joint, std::array<double, 4> costs, double budget,
                                          const SearchConfig& cfg) {
  require_xy(joint, "cor2_switching_cost_rate");
  const CostFn cost(Alphabet({"0", "1", "2", "3"}), {costs.begin(), costs.end()});
  detail::require_feasible_budget(cost, budget, "cor2_switching_cost_rate");
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  const auto px = joint.marginal_values({0});
  const auto wyx = conditional_y_given_x(joint);

  SimplexProduct space;
  space.add_block(nx, 4, cost.allowed());
  PointObjective f = [&](std::span<const double> x) {
    return detail::cor2_objective(px, wyx, ny, space.view(x, 0));
  };
  PointPredicate ok;
  if (std::isfinite(budget)) {
    ok = [&](std::span<const double> x) {
      const auto pxa = detail::joint_xa(px, space.view(x, 0));
      return detail::within_budget(detail::expected_cost(cost, pxa, nx), budget);
    };
  }
  const auto res = grid_search(space, f, ok, cfg);
  if (!res.feasible) throw InfeasibleError("cor2_switching_cost_rate: no p(a|x) meets the budget");
  auto p = cor2_eval(joint, costs, ConditionalTable(nx, 4, res.argmin));
  p.rate = res.value;
  p.method = Method::Search;
  p.evals = res.evals;
  return p;
}

// --- binary S-channel example ------------------------------------------------

/// X ~ Bern(1/2) through the S-channel P(Y=0|X=0)=0.2, P(Y=1|X=1)=1.
inline JointPmf example1_joint() {
  return JointPmf({Alphabet::binary(), Alphabet::binary()}, {0.5 * 0.2, 0.5 * 0.8, 0.0, 0.5});
}

/// The S-channel example's switching model with Λ(1)=1, Λ(2)=0.
inline ActionModel example1_model() { return switching_model(example1_joint(), 2, {1.0, 0.0}); }

/// p(a|x) for P(A=1)=p1, P(X=0|A=1)=1/2+δ, P(X=0|A=2)=1/2-κδ, κ=p1/(1-p1).
inline ConditionalTable example1_action_table(double p1, double delta) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("example1: p1 must lie in [0,1]");
  if (!std::isfinite(delta)) throw DomainError("example1: delta must be finite");
  if (p1 == 1.0 && delta != 0.0) throw DomainError("example1: p1 = 1 forces delta = 0");
  const double kappa = p1 < 1.0 ? p1 / (1.0 - p1) : 0.0;
  const double x0_a1 = 0.5 + delta;
  const double x0_a2 = 0.5 - kappa * delta;
  const double eps = 1e-12;
  if (x0_a1 < -eps || x0_a1 > 1.0 + eps || x0_a2 < -eps || x0_a2 > 1.0 + eps) {
    throw DomainError("example1: delta puts a conditional outside [0,1]");
  }
  // p(x, a) then divide by p(x) = 1/2.
  const double p01 = p1 * std::clamp(x0_a1, 0.0, 1.0);
  const double p11 = p1 * (1.0 - std::clamp(x0_a1, 0.0, 1.0));
  const double p02 = (1.0 - p1) * std::clamp(x0_a2, 0.0, 1.0);
  const double p12 = (1.0 - p1) * (1.0 - std::clamp(x0_a2, 0.0, 1.0));
  return ConditionalTable(2, 2, {2.0 * p01, 2.0 * p02, 2.0 * p11, 2.0 * p12});
}

/// Rate of the S-channel example at (p1, δ), computed on the composed joint
/// p(x) p(a|x) p(y1,y2|x,a).
inline double example1_rate(double p1, double delta) {
  const auto model = example1_model();
  const auto pa_x = example1_action_table(p1, delta);
  std::vector<double> pxa(4);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 2; ++a) pxa[x * 2 + a] = 0.5 * pa_x(x, a);
  }
  const JointPmf xa({model.source(), model.actions()}, pxa);
  const JointPmf full = compose(xa, model.channel());  // axes X, A, Y1, Y2
  const double ixa = mutual_information(full, {0}, {1});
  const double h1 = conditional_entropy(full, {0}, {2, 1});
  const double h2 = conditional_entropy(full, {0}, {3, 1});
  return ixa + std::max(h1, h2);
}

struct Example1Row {
  double budget = 0.0;
  double rate_opt = 0.0;    // δ free
  double rate_indep = 0.0;  // actions independent of the source (δ = 0)
  double p1_opt = 0.0;
  double delta_opt = 0.0;
  double p1_indep = 0.0;
  std::size_t evals = 0;
};

/// Best rate with actions independent of the source: min over p1 ≤ budget.
inline ScalarMin example1_independent(double budget) {
  const double hi = std::min(std::max(budget, 0.0), 1.0);
  return scan_then_golden([](double p1) { return example1_rate(p1, 0.0); }, 0.0, hi, 101, 1e-10);
}

/// Rate-versus-cost curve: the searched optimum (seeded with the independent
/// optimum, so it never exceeds it) alongside the independent-action rate.
inline std::vector<Example1Row> example1_curve(std::span<const double> budgets, const SearchConfig& cfg) {
  const auto model = example1_model();
  const Pmf source = Pmf::uniform(Alphabet::binary());
  return parallel_map(budgets.size(), [&](std::size_t i) {
    const double c = budgets[i];
    if (!(c >= 0.0)) throw DomainError("example1_curve: budgets must be >= 0");
    Example1Row row;
    row.budget = c;
    const auto indep = example1_independent(c);
    row.rate_indep = indep.value;
    row.p1_indep = indep.x;
    const std::vector<double> seed_row{indep.x, 1.0 - indep.x};
    const auto p = thm1_lossless_decoder_actions(source, model, c, cfg,
                                                 {ConditionalTable::constant_rows(2, seed_row)});
    row.rate_opt = p.rate;
    row.evals = p.evals;
    const auto& t = *p.table("p(a|x)");
    row.p1_opt = 0.5 * (t(0, 0) + t(1, 0));
    row.delta_opt = row.p1_opt > 0.0 ? 0.5 * t(0, 0) / row.p1_opt - 0.5 : 0.0;
    return row;
  });
}

}  // namespace action_rdc
