#pragma once

// Lossless coding when the encoder chooses the actions and every decoder can
// read the action off its own side information.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/lossless.hpp"
#include "action_rdc/regions/model.hpp"

namespace action_rdc {

/// Throws DomainError unless, for every decoder j, each side-information
/// symbol that can occur is produced by a single action.
inline void require_action_recoverable(const Pmf& source, const ActionModel& model, double tol = 1e-9) {
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const auto px = source.probs();
  const auto allowed = model.cost().allowed();
  for (std::size_t j = 0; j < model.decoders(); ++j) {
    const std::size_t ny = model.side_info_size(j);
    for (std::size_t y = 0; y < ny; ++y) {
      std::optional<std::size_t> seen;
      for (std::size_t a = 0; a < na; ++a) {
        if (!allowed[a]) continue;
        bool occurs = false;
        for (std::size_t x = 0; x < nx && !occurs; ++x) occurs = px[x] > tol && model.w(j, x, a, y) > tol;
        if (!occurs) continue;
        if (seen && *seen != a) {
          throw DomainError("encoder actions: decoder " + std::to_string(j + 1) + " cannot recover the action from "
                            "side-information symbol '" + model.side_info(j)[y] + "'");
        }
        seen = a;
      }
    }
  }
}

namespace detail {

struct EncTerms {
  double worst = 0.0;  // max_j H(X|Y_j,A)
  double h_a_given_x = 0.0;
  double cost = 0.0;
};

inline EncTerms enc_terms(std::span<const double> px, const ActionModel& m, const TableView& pa_x) {
  const auto pxa = joint_xa(px, pa_x);
  EncTerms t;
  for (std::size_t j = 0; j < m.decoders(); ++j) t.worst = std::max(t.worst, cond_entropy_x_given_ya(m, j, pxa));
  t.h_a_given_x = std::max(0.0, entropy_bits(pxa) - entropy_bits(px));
  t.cost = expected_cost(m.cost(), pxa, px.size());
  return t;
}

}  // namespace detail

/// [max_j H(X|Y_j,A) - H(A|X)]+ at a given p(a|x).
inline RatePoint thm_enc_eval(const Pmf& source, const ActionModel& model, const ConditionalTable& pa_x) {
  detail::require_source_matches(source, model, "thm_enc_eval");
  require_action_recoverable(source, model);
  if (pa_x.rows() != source.size() || pa_x.cols() != model.actions().size()) {
    throw DomainError("thm_enc_eval: p(a|x) must be |X| x |A|");
  }
  const auto t = detail::enc_terms(source.probs(), model, detail::view_of(pa_x));
  RatePoint p;
  p.rate = clamp_rate(t.worst - t.h_a_given_x, p);
  p.cost = t.cost;
  p.method = Method::Evaluation;
  p.details["max_j H(X|Yj,A)"] = t.worst;
  p.details["H(A|X)"] = t.h_a_given_x;
  p.achieving.push_back({"p(a|x)", pa_x});
  return p;
}

/// min over p(a|x) of [max_j H(X|Y_j,A) - H(A|X)]+ subject to the budget.
/// When the optimum clamps to zero, the reported p(a|x) is the one with the
/// least H(A|X) among those whose unclamped value is <= 0.
inline RatePoint thm_enc_lossless_rate(const Pmf& source, const ActionModel& model, double budget,
                                       const SearchConfig& cfg) {
  detail::require_source_matches(source, model, "thm_enc_lossless_rate");
  detail::require_feasible_budget(model.cost(), budget, "thm_enc_lossless_rate");
  require_action_recoverable(source, model);
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const auto px = source.probs();
  SimplexProduct space;
  space.add_block(nx, na, model.cost().allowed());
  PointObjective unclamped = [&](std::span<const double> x) {
    const auto t = detail::enc_terms(px, model, space.view(x, 0));
    if (t.cost > budget + 1e-12) return std::numeric_limits<double>::infinity();
    return t.worst - t.h_a_given_x;
  };
  const auto res = grid_search(space, unclamped, {}, cfg);
  if (!res.feasible) throw InfeasibleError("thm_enc_lossless_rate: no p(a|x) meets the budget");
  std::vector<double> best = res.argmin;
  std::size_t evals = res.evals;
  if (res.value < 0.0) {
    PointObjective randomness = [&](std::span<const double> x) {
      const auto t = detail::enc_terms(px, model, space.view(x, 0));
      if (t.cost > budget + 1e-12 || t.worst - t.h_a_given_x > cfg.tolerance) {
        return std::numeric_limits<double>::infinity();
      }
      return t.h_a_given_x;
    };
    const auto tie = grid_search(space, randomness, {}, cfg, {res.argmin});
    evals += tie.evals;
    if (tie.feasible) best = tie.argmin;
  }
  auto p = thm_enc_eval(source, model, space.view(best, 0).to_table());
  if (res.value < 0.0) {
    p.clamped = true;
    p.details["unclamped_rate"] = res.value;
  }
  p.method = Method::Search;
  p.evals = evals;
  return p;
}

// --- switching example with encoder actions ---------------------------------

namespace detail {

// P(A=a) H(X|A=a) and P(A=a) H(X|A=a,Y) from unnormalized weights.
struct Ex3Weighted {
  std::array<double, 2> h_x{};
  std::array<double, 2> h_xy{};
  std::array<double, 2> mass{};
};

inline Ex3Weighted example3_weighted(const JointPmf& joint, const ConditionalTable& pa_x) {
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  const auto pxy = joint.probs();
  Ex3Weighted w;
  for (std::size_t a = 0; a < 2; ++a) {
    std::vector<double> rx(nx, 0.0);
    std::vector<double> rxy(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        rxy[x * ny + y] = pxy[x * ny + y] * pa_x(x, a);
        rx[x] += rxy[x * ny + y];
      }
    }
    double m = 0.0;
    for (double v : rx) m += v;
    w.mass[a] = m;
    for (double v : rx) {
      if (v > 0.0) w.h_x[a] -= v * std::log2(v / m);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      double ry = 0.0;
      for (std::size_t x = 0; x < nx; ++x) ry += rxy[x * ny + y];
      for (std::size_t x = 0; x < nx; ++x) {
        const double v = rxy[x * ny + y];
        if (v > 0.0) w.h_xy[a] -= v * std::log2(v / ry);
      }
    }
  }
  return w;
}

}  // namespace detail

/// Example evaluation for the two-decoder switch with encoder actions
/// (A=1: decoder 1 sees Y; A=2: decoder 2 sees Y). Reports the closed
/// expression and the generic formula; both are clamped at zero.
inline RatePoint example3_eval(const JointPmf& joint, const ConditionalTable& pa_x, double C1, double C2,
                               double budget) {
  require_xy(joint, "example3_eval");
  const std::size_t nx = joint.dims()[0];
  if (pa_x.rows() != nx || pa_x.cols() != 2) throw DomainError("example3_eval: p(a|x) must be |X| x 2");
  const Pmf source(joint.axis(0), joint.marginal_values({0}));
  const auto model = switching_model(joint, 2, {C1, C2});
  const auto w = detail::example3_weighted(joint, pa_x);
  const double alpha = w.mass[0];
  auto p = thm_enc_eval(source, model, pa_x);
  if (p.cost > budget + 1e-12) {
    throw InfeasibleError("example3_eval: alpha*C1 + (1-alpha)*C2 exceeds the budget");
  }
  const double hx = entropy(source);
  const double formula = std::max(w.h_xy[0] + w.h_x[1], w.h_xy[1] + w.h_x[0]) + hx - binary_entropy(alpha) -
                         w.h_x[0] - w.h_x[1];
  const double generic = p.clamped ? p.details["unclamped_rate"] : p.rate;
  p.clamped = false;
  p.details.erase("unclamped_rate");
  p.rate = clamp_rate(formula, p);
  p.details["alpha"] = alpha;
  p.details["formula"] = formula;
  p.details["generic"] = generic;
  if (alpha > 0.0 && alpha < 1.0) {
    // Literal display, with H(X|A=1) and H(X|A=2) interchanged inside the max.
    const double h1 = w.h_x[0] / alpha;
    const double h2 = w.h_x[1] / (1.0 - alpha);
    p.details["formula_as_printed"] = std::max(w.h_xy[0] + (1.0 - alpha) * h1, w.h_xy[1] + alpha * h2) + hx -
                                      binary_entropy(alpha) - w.h_x[0] - w.h_x[1];
  }
  return p;
}

/// Searches p(a|x) under αC1 + (1-α)C2 <= budget and reports the example
/// expression at the optimum.
inline RatePoint example3_rate(const JointPmf& joint, double C1, double C2, double budget, const SearchConfig& cfg) {
  require_xy(joint, "example3_rate");
  const Pmf source(joint.axis(0), joint.marginal_values({0}));
  const auto model = switching_model(joint, 2, {C1, C2});
  const auto s = thm_enc_lossless_rate(source, model, budget, cfg);
  auto p = example3_eval(joint, *s.table("p(a|x)"), C1, C2, budget);
  p.method = Method::Search;
  p.evals = s.evals;
  if (s.clamped) p.details["search_unclamped_rate"] = s.details.at("unclamped_rate");
  return p;
}

}  // namespace action_rdc
