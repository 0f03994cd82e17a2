#pragma once

// Two variations: a rate-limited link feeding the action encoder, and
// successive refinement where the refining decoder takes actions.

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
#include "action_rdc/regions/model.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc {

// --- rate-limited action link ------------------------------------------------

enum class RlimitMode { Decomposition, JointSearch };

namespace detail {

inline void check_action_channel(const Channel& ch, const CostFn& cost, std::string_view op) {
  if (ch.inputs().size() != 1 || !(ch.inputs()[0] == cost.actions())) {
    throw DomainError(std::string(op) + ": action channel input must be the action alphabet");
  }
}

// I(A;Y) for p(a) through p(y|a).
inline double channel_information(std::span<const double> pa, const Channel& ch) {
  const std::size_t na = ch.rows();
  const std::size_t ny = ch.cols();
  std::vector<double> pay(na * ny);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) pay[a * ny + y] = pa[a] * ch(a, y);
  }
  const std::array<std::size_t, 2> dims{na, ny};
  return std::max(0.0, entropy_bits(pa) + entropy_of(pay, dims, {1}) - entropy_bits(pay));
}

// I(X;X̂) and E d for p(x) p(x̂|x).
inline std::pair<double, double> test_channel_terms(std::span<const double> px, const TableView& q,
                                                    const DistortionFn& d) {
  const std::size_t nx = px.size();
  const std::size_t nh = q.cols;
  std::vector<double> p(nx * nh);
  double dist = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t h = 0; h < nh; ++h) {
      p[x * nh + h] = px[x] * q(x, h);
      dist += p[x * nh + h] * d(x, h);
    }
  }
  const std::array<std::size_t, 2> dims{nx, nh};
  const double info = std::max(0.0, entropy_bits(px) + entropy_of(p, dims, {1}) - entropy_bits(p));
  return {info, dist};
}

}  // namespace detail

/// Rate with a link of rate R_A from the source encoder to the action encoder
/// and actions sent through p(y|a) to the decoder: min over p(a) p(x̂|x) of
/// max{I(X;X̂) - R_A, I(X;X̂) - I(A;Y)}, clamped at zero. R_A may be +inf.
inline RatePoint prop_rlimit_rate(const Pmf& source, const DistortionFn& d, double D, const Channel& action_channel,
                                  const CostFn& cost, double budget, double R_A, const SearchConfig& cfg,
                                  RlimitMode mode = RlimitMode::Decomposition) {
  detail::check_action_channel(action_channel, cost, "prop_rlimit_rate");
  if (!(d.source() == source.alphabet())) throw DomainError("prop_rlimit_rate: distortion source alphabet mismatch");
  if (std::isnan(R_A) || R_A < 0.0) throw DomainError("prop_rlimit_rate: R_A must be >= 0");
  if (!std::isfinite(D) || D < 0.0) throw DomainError("prop_rlimit_rate: distortion target must be >= 0");
  detail::require_feasible_budget(cost, budget, "prop_rlimit_rate");
  const auto px = source.probs();
  if (D < rd_distortion_range(px, d).first - 1e-12) {
    throw InfeasibleError("prop_rlimit_rate: distortion target below the minimum achievable");
  }

  RatePoint p;
  p.details["R_A"] = R_A;
  if (mode == RlimitMode::Decomposition) {
    const auto rd = blahut_arimoto_rd_solve(source, d, D);
    const auto cap = blahut_arimoto_capacity_cost_detail(action_channel, cost, budget);
    const double help = std::min(R_A, cap.capacity);
    p.rate = clamp_rate(rd.rate - help, p);
    p.distortions = {rd.distortion};
    p.cost = cap.cost;
    p.method = Method::ClosedForm;
    p.details["R_X(D)"] = rd.rate;
    p.details["C(budget)"] = cap.capacity;
    p.achieving.push_back({"p(a)", ConditionalTable(1, cap.input.size(), cap.input)});
    p.achieving.push_back({"p(xhat|x)", ConditionalTable(source.size(), d.recon_size(), rd.test_channel)});
    return p;
  }

  const std::size_t nx = source.size();
  const std::size_t nh = d.recon_size();
  const std::size_t na = cost.size();
  SimplexProduct space;
  space.add_block(1, na, cost.allowed());
  space.add_block(nx, nh);
  PointObjective f = [&](std::span<const double> x) {
    const auto pa = space.view(x, 0).row(0);
    double c = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      if (pa[a] > 0.0) c += pa[a] * cost(a);
    }
    if (c > budget + 1e-12) return std::numeric_limits<double>::infinity();
    const auto [info, dist] = detail::test_channel_terms(px, space.view(x, 1), d);
    if (dist > D + 1e-9) return std::numeric_limits<double>::infinity();
    const double iay = detail::channel_information(pa, action_channel);
    return std::max(info - R_A, info - iay);
  };
  const auto res = grid_search(space, f, {}, cfg);
  if (!res.feasible) throw InfeasibleError("prop_rlimit_rate: no distributions meet the targets");
  const auto pa = space.view(res.argmin, 0);
  const auto [info, dist] = detail::test_channel_terms(px, space.view(res.argmin, 1), d);
  p.rate = clamp_rate(res.value, p);
  p.distortions = {dist};
  p.cost = cost.expected(pa.row(0));
  p.method = Method::Search;
  p.evals = res.evals;
  p.details["I(X;Xhat)"] = info;
  p.details["I(A;Y)"] = detail::channel_information(pa.row(0), action_channel);
  p.achieving.push_back({"p(a)", pa.to_table()});
  p.achieving.push_back({"p(xhat|x)", space.view(res.argmin, 1).to_table()});
  return p;
}

// --- successive refinement with actions at the refining decoder -------------

struct SrOptions {
  std::vector<double> r1_values;      // empty: a default sweep starting just above R(D1)
  std::optional<std::size_t> u_size;  // default |X||X̂1||A|+1
  double r1_slack = 1e-3;
  std::size_t inner_resolution = 11;
};

namespace detail {

struct SrTerms {
  double r1 = 0.0;   // I(X;X̂1)
  double sum = 0.0;  // I(X;X̂1,A) + I(X;U|X̂1,Y,A)
  double d1 = 0.0;
  double d2 = 0.0;
  double cost = 0.0;
  std::vector<std::size_t> recon;  // x̂2 indexed [a][u][y]
};

inline SrTerms sr_eval(std::span<const double> px, const ActionModel& m, const DistortionFn& d1,
                       const DistortionFn& d2, const TableView& p1, const TableView& pa, const TableView& pu,
                       bool want_recon) {
  const std::size_t nx = px.size();
  const std::size_t n1 = p1.cols;
  const std::size_t na = pa.cols;
  const std::size_t nu = pu.cols;
  const std::size_t ny = m.side_info_size(0);
  const auto wy = m.decoder_channel(0);
  const std::array<std::size_t, 5> dims{nx, n1, na, nu, ny};  // X X̂1 A U Y
  std::vector<double> p(nx * n1 * na * nu * ny);
  SrTerms t;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t h = 0; h < n1; ++h) {
      const double pxh = px[x] * p1(x, h);
      t.d1 += pxh * d1(x, h);
      for (std::size_t a = 0; a < na; ++a) {
        const double pxha = pxh * pa(x * n1 + h, a);
        if (pxha > 0.0) t.cost += pxha * m.cost()(a);
        for (std::size_t u = 0; u < nu; ++u) {
          const double v = pxha * pu((x * n1 + h) * na + a, u);
          for (std::size_t y = 0; y < ny; ++y) {
            p[(((x * n1 + h) * na + a) * nu + u) * ny + y] = v * wy[(x * na + a) * ny + y];
          }
        }
      }
    }
  }
  const double hx = entropy_bits(px);
  const double h_xhat = entropy_of(p, dims, {0, 1});
  t.r1 = std::max(0.0, hx + entropy_of(p, dims, {1}) - h_xhat);
  const double i_xa = hx + entropy_of(p, dims, {1, 2}) - entropy_of(p, dims, {0, 1, 2});
  const double i_u = entropy_of(p, dims, {0, 1, 2, 4}) + entropy_of(p, dims, {1, 2, 3, 4}) -
                     entropy_of(p, dims, {1, 2, 4}) - entropy_bits(p);
  t.sum = std::max(0.0, i_xa) + std::max(0.0, i_u);
  if (want_recon) t.recon.assign(na * nu * ny, 0);
  std::vector<double> w(nx);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t x = 0; x < nx; ++x) {
          double s = 0.0;
          for (std::size_t h = 0; h < n1; ++h) s += p[(((x * n1 + h) * na + a) * nu + u) * ny + y];
          w[x] = s;
        }
        const auto [xh, val] = d2.best_recon(w);
        t.d2 += val;
        if (want_recon) t.recon[(a * nu + u) * ny + y] = xh;
      }
    }
  }
  return t;
}

}  // namespace detail

/// Boundary of the (R1, R1+R2) region: for each R1 in the sweep, the least
/// I(X;X̂1,A) + I(X;U|X̂1,Y,A) over p(x̂1|x) p(a|x,x̂1) p(u|x,x̂1,a) with
/// I(X;X̂1) <= R1 and the distortion and cost constraints. Decoder 2 sees Y
/// through the model (one decoder) and reconstructs x̂2(U,Y,A).
inline std::vector<RatePoint> prop_sr_region(const Pmf& source, const ActionModel& model, const DistortionFn& d1,
                                             const DistortionFn& d2, double D1, double D2, double budget,
                                             const SearchConfig& cfg, SrOptions opt = {}) {
  detail::require_source_matches(source, model, "prop_sr_region");
  if (model.decoders() != 1) throw DomainError("prop_sr_region: model must have one side-information output");
  if (!(d1.source() == source.alphabet()) || !(d2.source() == source.alphabet())) {
    throw DomainError("prop_sr_region: distortion source alphabet mismatch");
  }
  if (!(D1 >= 0.0 && D2 >= 0.0)) throw DomainError("prop_sr_region: distortion targets must be >= 0");
  detail::require_feasible_budget(model.cost(), budget, "prop_sr_region");
  const std::size_t nx = source.size();
  const std::size_t n1 = d1.recon_size();
  const std::size_t na = model.actions().size();
  const std::size_t nu = opt.u_size.value_or(nx * n1 * na + 1);
  const auto px = source.probs();
  const double dtol = std::max(1e-9, cfg.tolerance);

  const auto base = blahut_arimoto_rd_solve(source, d1, D1);
  if (opt.r1_values.empty()) {
    const double lo = base.rate + opt.r1_slack;
    const double hi = std::max(lo, entropy(source));
    for (int k = 0; k < 3; ++k) opt.r1_values.push_back(lo + (hi - lo) * k / 2.0);
  }

  SearchConfig inner = cfg;
  inner.grid_resolution = std::min(cfg.grid_resolution, opt.inner_resolution);
  inner.seed = derive_seed(cfg.seed, "sr.inner");

  SimplexProduct in_space;
  in_space.add_block(nx * n1, na, model.cost().allowed());
  in_space.add_block(nx * n1 * na, nu);

  struct InnerResult {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    std::size_t evals = 0;
  };
  auto solve_inner = [&](const TableView& p1) {
    PointObjective f = [&](std::span<const double> x) {
      const auto t = detail::sr_eval(px, model, d1, d2, p1, in_space.view(x, 0), in_space.view(x, 1), false);
      if (t.cost > budget + 1e-12 || t.d2 > D2 + dtol) return std::numeric_limits<double>::infinity();
      return t.sum;
    };
    InnerResult r;
    const auto res = grid_search(in_space, f, {}, inner);
    r.evals = res.evals;
    if (res.feasible) {
      r.value = res.value;
      r.argmin = res.argmin;
    }
    return r;
  };

  SimplexProduct outer;
  outer.add_block(nx, n1);
  std::vector<RatePoint> out;
  for (std::size_t i = 0; i < opt.r1_values.size(); ++i) {
    const double r1 = opt.r1_values[i];
    if (r1 < base.rate - 1e-9) {
      throw InfeasibleError("prop_sr_region: R1=" + std::to_string(r1) + " is below R(D1)=" +
                            std::to_string(base.rate));
    }
    PointObjective f = [&](std::span<const double> x) {
      const auto p1 = outer.view(x, 0);
      const auto [info, dist] = detail::test_channel_terms(px, p1, d1);
      if (info > r1 + 1e-12 || dist > D1 + dtol) return std::numeric_limits<double>::infinity();
      return solve_inner(p1).value;
    };
    SearchConfig c = cfg;
    c.seed = derive_seed(cfg.seed, "sr.outer", i);
    const auto res = grid_search(outer, f, {}, c, {base.test_channel});
    if (!res.feasible) throw InfeasibleError("prop_sr_region: no distributions meet the targets");
    const auto p1 = outer.view(res.argmin, 0);
    const auto in = solve_inner(p1);
    const auto pa = in_space.view(in.argmin, 0);
    const auto pu = in_space.view(in.argmin, 1);
    const auto t = detail::sr_eval(px, model, d1, d2, p1, pa, pu, true);
    RatePoint p;
    p.rate = r1;
    p.sum_rate = res.value;
    p.cost = t.cost;
    p.distortions = {t.d1, t.d2};
    p.method = Method::Search;
    p.evals = res.evals;
    p.details["I(X;Xhat1)"] = t.r1;
    p.details["R2"] = std::max(0.0, res.value - r1);
    p.details["aux_size"] = static_cast<double>(nu);
    p.achieving = {{"p(xhat1|x)", p1.to_table()}, {"p(a|x,xhat1)", pa.to_table()}, {"p(u|x,xhat1,a)", pu.to_table()}};
    p.achieving.push_back({"xhat2(a,u,y)", ConditionalTable::deterministic(t.recon, d2.recon_size())});
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace action_rdc
