#pragma once

// Lossy description with actions at the decoders: causal reconstruction for K
// decoders, the layered two-decoder scheme (common U, private V1/V2), its
// degraded side-information case, and the switching special case with its
// binary Hamming example.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/parallel.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/model.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc {

namespace detail {

inline constexpr double kDistortionSlack = 1e-9;

inline void require_distortion_shape(const DistortionFn& d, const Alphabet& source, std::string_view op) {
  if (!(d.source() == source)) throw DomainError(std::string(op) + ": distortion source alphabet mismatch");
}

inline ConditionalTable recon_table(const std::vector<std::size_t>& recon, std::size_t cols) {
  return ConditionalTable::deterministic(recon, cols);
}

}  // namespace detail

// --- causal reconstruction -------------------------------------------------

namespace detail {

struct CausalEval {
  double rate = 0.0;
  double cost = 0.0;
  std::vector<double> distortions;
  std::vector<std::vector<std::size_t>> recon;  // per decoder, indexed [u][y]
};

inline CausalEval causal_eval(std::span<const double> px, const ActionModel& m, const std::vector<DistortionFn>& d,
                              const std::vector<std::size_t>& f, const TableView& pu_x, bool want_recon) {
  const std::size_t nx = px.size();
  const std::size_t nu = pu_x.cols;
  const std::size_t na = m.actions().size();
  CausalEval out;
  std::vector<double> pxu(nx * nu);
  std::vector<double> pu(nu, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      pxu[x * nu + u] = px[x] * pu_x(x, u);
      pu[u] += pxu[x * nu + u];
      if (pxu[x * nu + u] > 0.0) out.cost += pxu[x * nu + u] * m.cost()(f[u]);
    }
  }
  out.rate = std::max(0.0, entropy_bits(px) + entropy_bits(pu) - entropy_bits(pxu));
  std::vector<double> w(nx);
  for (std::size_t j = 0; j < m.decoders(); ++j) {
    const std::size_t ny = m.side_info_size(j);
    const auto wj = m.decoder_channel(j);
    double dist = 0.0;
    std::vector<std::size_t> recon;
    if (want_recon) recon.assign(nu * ny, 0);
    for (std::size_t u = 0; u < nu; ++u) {
      if (pu[u] <= 0.0 && !want_recon) continue;
      const std::size_t a = f[u];
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t x = 0; x < nx; ++x) w[x] = pxu[x * nu + u] * wj[(x * na + a) * ny + y];
        const auto [xh, val] = d[j].best_recon(w);
        dist += val;
        if (want_recon) recon[u * ny + y] = xh;
      }
    }
    out.distortions.push_back(dist);
    if (want_recon) out.recon.push_back(std::move(recon));
  }
  return out;
}

// Non-decreasing maps {0..n-1} -> {0..k-1}: one representative per multiset of
// action counts, which covers every map up to relabeling of U.
inline std::vector<std::vector<std::size_t>> monotone_maps(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(n, 0);
  for (;;) {
    out.push_back(cur);
    std::size_t i = n;
    while (i-- > 0) {
      if (cur[i] + 1 < k) {
        const std::size_t v = cur[i] + 1;
        for (std::size_t t = i; t < n; ++t) cur[t] = v;
        break;
      }
    }
    if (i == std::numeric_limits<std::size_t>::max()) break;
  }
  return out;
}

}  // namespace detail

/// Causal reconstruction with K decoders: min I(U;X) over p(u|x), A = f(U)
/// and per-decoder reconstructions x̂_j(U, Y_j), subject to distortion and
/// cost. f is enumerated; p(u|x) is searched. |U| defaults to |X||A|+K.
inline RatePoint thm3_causal_lossy(const Pmf& source, const ActionModel& model, const std::vector<DistortionFn>& d,
                                   const std::vector<double>& targets, double budget, const SearchConfig& cfg,
                                   std::optional<std::size_t> aux_size = std::nullopt) {
  detail::require_source_matches(source, model, "thm3_causal_lossy");
  detail::require_feasible_budget(model.cost(), budget, "thm3_causal_lossy");
  const std::size_t k = model.decoders();
  if (d.size() != k || targets.size() != k) {
    throw DomainError("thm3_causal_lossy: need one distortion function and target per decoder");
  }
  for (std::size_t j = 0; j < k; ++j) {
    detail::require_distortion_shape(d[j], model.source(), "thm3_causal_lossy");
    if (!(targets[j] >= 0.0)) throw DomainError("thm3_causal_lossy: distortion targets must be >= 0");
  }
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const std::size_t nu = aux_size.value_or(nx * na + k);
  if (nu == 0) throw DomainError("thm3_causal_lossy: |U| must be positive");
  const auto px = source.probs();

  RatePoint best;
  best.rate = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  std::size_t map_index = 0;
  for (const auto& f : detail::monotone_maps(nu, na)) {
    std::vector<bool> allowed(nu);
    bool any = false;
    for (std::size_t u = 0; u < nu; ++u) {
      allowed[u] = !model.cost().forbidden(f[u]);
      any = any || allowed[u];
    }
    if (!any) continue;
    SimplexProduct space;
    space.add_block(nx, nu, allowed);
    PointObjective obj = [&](std::span<const double> x) {
      const auto e = detail::causal_eval(px, model, d, f, space.view(x, 0), false);
      if (e.cost > budget + 1e-12) return std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        if (e.distortions[j] > targets[j] + detail::kDistortionSlack) return std::numeric_limits<double>::infinity();
      }
      return e.rate;
    };
    SearchConfig c = cfg;
    c.seed = derive_seed(cfg.seed, "thm3.map", map_index++);
    const auto res = grid_search(space, obj, {}, c);
    evals += res.evals;
    if (!res.feasible || !(res.value < best.rate)) continue;
    const ConditionalTable pu_x(nx, nu, res.argmin);
    const auto e = detail::causal_eval(px, model, d, f, space.view(res.argmin, 0), true);
    best = RatePoint{};
    best.rate = res.value;
    best.cost = e.cost;
    best.distortions = e.distortions;
    best.achieving.push_back({"p(u|x)", pu_x});
    best.achieving.push_back({"a=f(u)", ConditionalTable::deterministic(f, na)});
    for (std::size_t j = 0; j < k; ++j) {
      best.achieving.push_back({"xhat" + std::to_string(j + 1) + "(u,y)",
                                detail::recon_table(e.recon[j], d[j].recon_size())});
    }
  }
  if (!std::isfinite(best.rate)) throw InfeasibleError("thm3_causal_lossy: no p(u|x), f meets the targets");
  best.method = Method::Search;
  best.evals = evals;
  best.details["aux_size"] = static_cast<double>(nu);
  return best;
}

// --- layered two-decoder scheme ---------------------------------------------

/// Conditional tables of the layered scheme. Row orders: p(a|x) by x;
/// p(u|x,a) by (x,a); p(v_j|x,a,u) by (x,a,u).
struct LayeredTables {
  ConditionalTable pa_x;
  ConditionalTable pu_xa;
  ConditionalTable pv1_xau;
  ConditionalTable pv2_xau;
};

/// Reconstruction map x̂_j(u, v_j, a, y_j), flattened in that index order.
using ReconMap = std::vector<std::size_t>;

namespace detail {

struct LayerTerms {
  double i_u = 0.0;  // I(X;U|A,Y_j)
  double i_v = 0.0;  // I(X;V_j|U,A,Y_j)
  double distortion = 0.0;
  ReconMap recon;
};

inline LayerTerms layered_decoder(std::span<const double> px, const ActionModel& m, std::size_t j,
                                  const TableView& pa_x, const TableView& pu_xa, const TableView& pv_xau,
                                  const DistortionFn& d, const ReconMap* given, bool want_recon) {
  const std::size_t nx = px.size();
  const std::size_t na = pa_x.cols;
  const std::size_t nu = pu_xa.cols;
  const std::size_t nv = pv_xau.cols;
  const std::size_t ny = m.side_info_size(j);
  const auto wj = m.decoder_channel(j);
  const std::array<std::size_t, 5> dims{nx, na, nu, nv, ny};  // X A U V Y
  std::vector<double> p(nx * na * nu * nv * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      const double pxa = px[x] * pa_x(x, a);
      for (std::size_t u = 0; u < nu; ++u) {
        const double pxau = pxa * pu_xa(x * na + a, u);
        for (std::size_t v = 0; v < nv; ++v) {
          const double pxauv = pxau * pv_xau((x * na + a) * nu + u, v);
          for (std::size_t y = 0; y < ny; ++y) {
            p[(((x * na + a) * nu + u) * nv + v) * ny + y] = pxauv * wj[(x * na + a) * ny + y];
          }
        }
      }
    }
  }
  LayerTerms t;
  const double h_xay = entropy_of(p, dims, {0, 1, 4});
  const double h_uay = entropy_of(p, dims, {1, 2, 4});
  const double h_ay = entropy_of(p, dims, {1, 4});
  const double h_xuay = entropy_of(p, dims, {0, 1, 2, 4});
  const double h_vuay = entropy_of(p, dims, {1, 2, 3, 4});
  const double h_all = entropy_bits(p);
  t.i_u = std::max(0.0, h_xay + h_uay - h_ay - h_xuay);
  t.i_v = std::max(0.0, h_xuay + h_vuay - h_uay - h_all);

  if (want_recon) t.recon.assign(nu * nv * na * ny, 0);
  std::vector<double> w(nx);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t y = 0; y < ny; ++y) {
          for (std::size_t x = 0; x < nx; ++x) w[x] = p[(((x * na + a) * nu + u) * nv + v) * ny + y];
          const std::size_t slot = ((u * nv + v) * na + a) * ny + y;
          std::size_t xh;
          double val;
          if (given) {
            xh = (*given)[slot];
            if (xh >= d.recon_size()) throw DomainError("reconstruction map entry out of range");
            val = 0.0;
            for (std::size_t x = 0; x < nx; ++x) val += w[x] * d(x, xh);
          } else {
            std::tie(xh, val) = d.best_recon(w);
          }
          t.distortion += val;
          if (want_recon) t.recon[slot] = xh;
        }
      }
    }
  }
  return t;
}

inline void require_two_decoders(const ActionModel& m, std::string_view op) {
  if (m.decoders() != 2) throw DomainError(std::string(op) + ": model must have exactly two decoders");
}

inline void check_layered_shapes(const LayeredTables& t, std::size_t nx, std::size_t na, std::string_view op) {
  if (t.pa_x.rows() != nx || t.pa_x.cols() != na) throw DomainError(std::string(op) + ": p(a|x) must be |X| x |A|");
  if (t.pu_xa.rows() != nx * na) throw DomainError(std::string(op) + ": p(u|x,a) needs |X||A| rows");
  const std::size_t nu = t.pu_xa.cols();
  if (t.pv1_xau.rows() != nx * na * nu || t.pv2_xau.rows() != nx * na * nu) {
    throw DomainError(std::string(op) + ": p(v|x,a,u) needs |X||A||U| rows");
  }
}

}  // namespace detail

/// Rate, distortions and cost of the layered scheme at given distributions.
/// Missing reconstruction maps are replaced by the posterior-optimal ones.
inline RatePoint thm2_lossy_achievable_eval(const Pmf& source, const ActionModel& model,
                                            const std::array<DistortionFn, 2>& d, const LayeredTables& t,
                                            const std::array<std::optional<ReconMap>, 2>& recon = {}) {
  detail::require_source_matches(source, model, "thm2_lossy_achievable_eval");
  detail::require_two_decoders(model, "thm2_lossy_achievable_eval");
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  detail::check_layered_shapes(t, nx, na, "thm2_lossy_achievable_eval");
  const auto px = source.probs();
  const auto pa = detail::view_of(t.pa_x);
  const auto pu = detail::view_of(t.pu_xa);
  const auto l1 = detail::layered_decoder(px, model, 0, pa, pu, detail::view_of(t.pv1_xau), d[0],
                                          recon[0] ? &*recon[0] : nullptr, true);
  const auto l2 = detail::layered_decoder(px, model, 1, pa, pu, detail::view_of(t.pv2_xau), d[1],
                                          recon[1] ? &*recon[1] : nullptr, true);
  const auto pxa = detail::joint_xa(px, pa);
  RatePoint p;
  const double ixa = detail::info_xa(pxa, nx, na);
  p.rate = ixa + std::max(l1.i_u, l2.i_u) + l1.i_v + l2.i_v;
  p.cost = detail::expected_cost(model.cost(), pxa, nx);
  p.distortions = {l1.distortion, l2.distortion};
  p.method = Method::Evaluation;
  p.details["I(X;A)"] = ixa;
  p.details["I(X;U|A,Y1)"] = l1.i_u;
  p.details["I(X;U|A,Y2)"] = l2.i_u;
  p.details["I(X;V1|U,A,Y1)"] = l1.i_v;
  p.details["I(X;V2|U,A,Y2)"] = l2.i_v;
  p.achieving = {{"p(a|x)", t.pa_x}, {"p(u|x,a)", t.pu_xa}, {"p(v1|x,a,u)", t.pv1_xau}, {"p(v2|x,a,u)", t.pv2_xau}};
  p.achieving.push_back({"xhat1(u,v1,a,y1)", detail::recon_table(l1.recon, d[0].recon_size())});
  p.achieving.push_back({"xhat2(u,v2,a,y2)", detail::recon_table(l2.recon, d[1].recon_size())});
  return p;
}

/// Auxiliary alphabet sizes for the layered search. The scheme itself gives
/// no bounds; |X|+1 each is a heuristic default.
struct LayeredSizes {
  std::optional<std::size_t> u;
  std::optional<std::size_t> v1;
  std::optional<std::size_t> v2;
};

/// Thin search wrapper over all four tables; practical only for tiny alphabets.
inline RatePoint thm2_search(const Pmf& source, const ActionModel& model, const std::array<DistortionFn, 2>& d,
                             std::array<double, 2> targets, double budget, const SearchConfig& cfg,
                             LayeredSizes sizes = {}) {
  detail::require_source_matches(source, model, "thm2_search");
  detail::require_two_decoders(model, "thm2_search");
  detail::require_feasible_budget(model.cost(), budget, "thm2_search");
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const std::size_t nu = sizes.u.value_or(nx + 1);
  const std::size_t nv1 = sizes.v1.value_or(nx + 1);
  const std::size_t nv2 = sizes.v2.value_or(nx + 1);
  const auto px = source.probs();

  SimplexProduct space;
  space.add_block(nx, na, model.cost().allowed());
  space.add_block(nx * na, nu);
  space.add_block(nx * na * nu, nv1);
  space.add_block(nx * na * nu, nv2);
  struct Parts {
    double rate, cost, d1, d2;
  };
  auto parts = [&](std::span<const double> x) {
    const auto pa = space.view(x, 0);
    const auto pu = space.view(x, 1);
    const auto l1 = detail::layered_decoder(px, model, 0, pa, pu, space.view(x, 2), d[0], nullptr, false);
    const auto l2 = detail::layered_decoder(px, model, 1, pa, pu, space.view(x, 3), d[1], nullptr, false);
    const auto pxa = detail::joint_xa(px, pa);
    return Parts{detail::info_xa(pxa, nx, na) + std::max(l1.i_u, l2.i_u) + l1.i_v + l2.i_v,
                 detail::expected_cost(model.cost(), pxa, nx), l1.distortion, l2.distortion};
  };
  PointObjective f = [&](std::span<const double> x) {
    const auto q = parts(x);
    if (q.cost > budget + 1e-12 || q.d1 > targets[0] + detail::kDistortionSlack ||
        q.d2 > targets[1] + detail::kDistortionSlack) {
      return std::numeric_limits<double>::infinity();
    }
    return q.rate;
  };
  const auto res = grid_search(space, f, {}, cfg);
  if (!res.feasible) throw InfeasibleError("thm2_search: no distributions meet the targets");
  const auto x = std::span<const double>(res.argmin);
  LayeredTables t{space.view(x, 0).to_table(), space.view(x, 1).to_table(), space.view(x, 2).to_table(),
                  space.view(x, 3).to_table()};
  auto p = thm2_lossy_achievable_eval(source, model, d, t);
  p.rate = res.value;
  p.method = Method::Search;
  p.evals = res.evals;
  return p;
}

// --- degraded side information ---------------------------------------------

/// True when p(y2 | x, a, y1) does not depend on x, i.e. (X,A) - (A,Y1) - (A,Y2).
inline bool degraded_side_information(const ActionModel& model, double tol = 1e-9) {
  if (model.decoders() != 2) return false;
  const auto& ch = model.channel();
  const std::size_t nx = model.source().size();
  const std::size_t na = model.actions().size();
  const std::size_t n1 = model.side_info_size(0);
  const std::size_t n2 = model.side_info_size(1);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y1 = 0; y1 < n1; ++y1) {
      std::optional<std::vector<double>> ref;
      for (std::size_t x = 0; x < nx; ++x) {
        const auto row = ch.row(x * na + a);
        double m = 0.0;
        for (std::size_t y2 = 0; y2 < n2; ++y2) m += row[y1 * n2 + y2];
        if (m <= tol) continue;
        std::vector<double> cond(n2);
        for (std::size_t y2 = 0; y2 < n2; ++y2) cond[y2] = row[y1 * n2 + y2] / m;
        if (!ref) {
          ref = std::move(cond);
          continue;
        }
        for (std::size_t y2 = 0; y2 < n2; ++y2) {
          if (std::abs(cond[y2] - (*ref)[y2]) > tol) return false;
        }
      }
    }
  }
  return true;
}

/// Degraded-side-information rate I(X;A) + I(X;U|A,Y2) + I(X;V1|U,A,Y1) at
/// given p(a|x), p(u|x,a), p(v1|x,a,u). Decoder 2 reconstructs from (U,A,Y2).
inline RatePoint hb_kaspi_eval(const Pmf& source, const ActionModel& model, const std::array<DistortionFn, 2>& d,
                               const ConditionalTable& pa_x, const ConditionalTable& pu_xa,
                               const ConditionalTable& pv1_xau) {
  detail::require_source_matches(source, model, "hb_kaspi_eval");
  if (!degraded_side_information(model)) {
    throw DomainError("hb_kaspi_eval: side information is not degraded, (X,A)-(A,Y1)-(A,Y2) fails");
  }
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const std::size_t nu = pu_xa.cols();
  const ConditionalTable none = ConditionalTable::constant_rows(nx * na * nu, std::vector<double>{1.0});
  detail::check_layered_shapes({pa_x, pu_xa, pv1_xau, none}, nx, na, "hb_kaspi_eval");
  const auto px = source.probs();
  const auto pa = detail::view_of(pa_x);
  const auto pu = detail::view_of(pu_xa);
  const auto l1 = detail::layered_decoder(px, model, 0, pa, pu, detail::view_of(pv1_xau), d[0], nullptr, true);
  const auto l2 = detail::layered_decoder(px, model, 1, pa, pu, detail::view_of(none), d[1], nullptr, true);
  const auto pxa = detail::joint_xa(px, pa);
  RatePoint p;
  const double ixa = detail::info_xa(pxa, nx, na);
  p.rate = ixa + l2.i_u + l1.i_v;
  p.cost = detail::expected_cost(model.cost(), pxa, nx);
  p.distortions = {l1.distortion, l2.distortion};
  p.method = Method::Evaluation;
  p.details["I(X;A)"] = ixa;
  p.details["I(X;U|A,Y2)"] = l2.i_u;
  p.details["I(X;V1|U,A,Y1)"] = l1.i_v;
  p.achieving = {{"p(a|x)", pa_x}, {"p(u|x,a)", pu_xa}, {"p(v1|x,a,u)", pv1_xau}};
  p.achieving.push_back({"xhat1(u,v1,a,y1)", detail::recon_table(l1.recon, d[0].recon_size())});
  p.achieving.push_back({"xhat2(u,a,y2)", detail::recon_table(l2.recon, d[1].recon_size())});
  return p;
}

/// Search for the degraded-side-information region. Default auxiliary sizes
/// are |U| = |X||A|+2 and |V1| = |U|(|X||A|+1); both can be overridden.
inline RatePoint hb_kaspi_search(const Pmf& source, const ActionModel& model, const std::array<DistortionFn, 2>& d,
                                 std::array<double, 2> targets, double budget, const SearchConfig& cfg,
                                 std::optional<std::size_t> u_size = std::nullopt,
                                 std::optional<std::size_t> v1_size = std::nullopt) {
  detail::require_source_matches(source, model, "hb_kaspi_search");
  if (!degraded_side_information(model)) {
    throw DomainError("hb_kaspi_search: side information is not degraded, (X,A)-(A,Y1)-(A,Y2) fails");
  }
  detail::require_feasible_budget(model.cost(), budget, "hb_kaspi_search");
  const std::size_t nx = source.size();
  const std::size_t na = model.actions().size();
  const std::size_t nu = u_size.value_or(nx * na + 2);
  const std::size_t nv = v1_size.value_or(nu * (nx * na + 1));
  const auto px = source.probs();
  const ConditionalTable none = ConditionalTable::constant_rows(nx * na * nu, std::vector<double>{1.0});

  SimplexProduct space;
  space.add_block(nx, na, model.cost().allowed());
  space.add_block(nx * na, nu);
  space.add_block(nx * na * nu, nv);
  PointObjective f = [&](std::span<const double> x) {
    const auto pa = space.view(x, 0);
    const auto pu = space.view(x, 1);
    const auto pxa = detail::joint_xa(px, pa);
    if (detail::expected_cost(model.cost(), pxa, nx) > budget + 1e-12) return std::numeric_limits<double>::infinity();
    const auto l2 = detail::layered_decoder(px, model, 1, pa, pu, detail::view_of(none), d[1], nullptr, false);
    if (l2.distortion > targets[1] + detail::kDistortionSlack) return std::numeric_limits<double>::infinity();
    const auto l1 = detail::layered_decoder(px, model, 0, pa, pu, space.view(x, 2), d[0], nullptr, false);
    if (l1.distortion > targets[0] + detail::kDistortionSlack) return std::numeric_limits<double>::infinity();
    return detail::info_xa(pxa, nx, na) + l2.i_u + l1.i_v;
  };
  const auto res = grid_search(space, f, {}, cfg);
  if (!res.feasible) throw InfeasibleError("hb_kaspi_search: no distributions meet the targets");
  const auto x = std::span<const double>(res.argmin);
  auto p = hb_kaspi_eval(source, model, d, space.view(x, 0).to_table(), space.view(x, 1).to_table(),
                         space.view(x, 2).to_table());
  p.rate = res.value;
  p.method = Method::Search;
  p.evals = res.evals;
  p.details["aux_size_u"] = static_cast<double>(nu);
  p.details["aux_size_v1"] = static_cast<double>(nv);
  return p;
}

// --- switching lossy --------------------------------------------------------

/// Two decoders, actions "1","2": under action 1 decoder 1 sees X and decoder
/// 2 sees Y; under action 2 the roles swap. Side-information symbols are
/// tagged "x:<s>" or "y:<s>".
inline ActionModel prop2_model(const JointPmf& joint, std::array<double, 2> costs = {0.0, 0.0}) {
  require_xy(joint, "prop2_model");
  const auto& ax = joint.axis(0);
  const auto& ay = joint.axis(1);
  std::vector<std::string> sym;
  for (const auto& s : ax.symbols()) sym.push_back("x:" + s);
  for (const auto& s : ay.symbols()) sym.push_back("y:" + s);
  const Alphabet side(sym);
  const Alphabet actions({"1", "2"});
  const std::size_t nx = ax.size();
  const std::size_t ny = ay.size();
  const std::size_t ns = nx + ny;
  const auto wyx = conditional_y_given_x(joint);
  std::vector<double> table(nx * 2 * ns * ns, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      // action 1: (Y1, Y2) = (x, y); action 2: (y, x)
      table[(x * 2 + 0) * ns * ns + x * ns + (nx + y)] += wyx[x * ny + y];
      table[(x * 2 + 1) * ns * ns + (nx + y) * ns + x] += wyx[x * ny + y];
    }
  }
  return ActionModel(ax, CostFn(actions, {costs[0], costs[1]}),
                     Channel({ax, actions}, {side, side}, std::move(table)));
}

namespace detail {

// r(x,y) = p(x) p(a|x) p(y|x) for one action value (unnormalized).
inline std::vector<double> prop2_weights(std::span<const double> px, std::span<const double> wyx, std::size_t ny,
                                         const TableView& pa_x, std::size_t a) {
  std::vector<double> r(px.size() * ny);
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t y = 0; y < ny; ++y) r[x * ny + y] = px[x] * pa_x(x, a) * wyx[x * ny + y];
  }
  return r;
}

struct SwitchTerm {
  double info = 0.0;        // P(A=a) I(X;U|A=a,Y)
  double distortion = 0.0;  // P(A=a) E[d(X, x̂(Y,U)) | A=a]
  std::vector<std::size_t> recon;  // [y][u]
};

// Both quantities are homogeneous of degree one in r, so the unnormalized
// weights give the P(A=a)-scaled values directly.
inline SwitchTerm prop2_term(std::span<const double> rxy, std::size_t nx, std::size_t ny, const TableView& pu_x,
                             const DistortionFn& d, bool want_recon) {
  const std::size_t nu = pu_x.cols;
  thread_local std::vector<double> rxyu;
  thread_local std::vector<double> ryu;
  thread_local std::vector<double> ry;
  thread_local std::vector<double> w;
  rxyu.assign(nx * ny * nu, 0.0);
  ryu.assign(ny * nu, 0.0);
  ry.assign(ny, 0.0);
  w.assign(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      ry[y] += rxy[x * ny + y];
      for (std::size_t u = 0; u < nu; ++u) {
        const double v = rxy[x * ny + y] * pu_x(x, u);
        rxyu[(x * ny + y) * nu + u] = v;
        ryu[y * nu + u] += v;
      }
    }
  }
  SwitchTerm t;
  double info = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double rxy_v = rxy[x * ny + y];
      for (std::size_t u = 0; u < nu; ++u) {
        const double v = rxyu[(x * ny + y) * nu + u];
        if (v > 0.0) info += v * std::log2(v * ry[y] / (rxy_v * ryu[y * nu + u]));
      }
    }
  }
  t.info = std::max(0.0, info);
  if (want_recon) t.recon.assign(ny * nu, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t x = 0; x < nx; ++x) w[x] = rxyu[(x * ny + y) * nu + u];
      const auto [xh, val] = d.best_recon(w);
      t.distortion += val;
      if (want_recon) t.recon[y * nu + u] = xh;
    }
  }
  return t;
}

inline void require_zero_distortion(const DistortionFn& d, std::string_view op) {
  if (!d.has_zero_distortion_recon()) {
    throw DomainError(std::string(op) + ": every source letter needs a zero-distortion reconstruction");
  }
}

}  // namespace detail

/// Switching lossy rate at given p(a|x), p(u1|x) (used when A=2) and
/// p(u2|x) (used when A=1).
inline RatePoint prop2_eval(const JointPmf& joint, const std::array<DistortionFn, 2>& d,
                            const ConditionalTable& pa_x, const ConditionalTable& pu1_x,
                            const ConditionalTable& pu2_x, std::array<double, 2> costs = {0.0, 0.0}) {
  require_xy(joint, "prop2_eval");
  for (const auto& dj : d) {
    detail::require_distortion_shape(dj, joint.axis(0), "prop2_eval");
    detail::require_zero_distortion(dj, "prop2_eval");
  }
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  if (pa_x.rows() != nx || pa_x.cols() != 2 || pu1_x.rows() != nx || pu2_x.rows() != nx) {
    throw DomainError("prop2_eval: table shapes must be |X| x 2, |X| x |U1|, |X| x |U2|");
  }
  const auto px = joint.marginal_values({0});
  const auto wyx = conditional_y_given_x(joint);
  const auto pa = detail::view_of(pa_x);
  const auto r2 = detail::prop2_weights(px, wyx, ny, pa, 1);
  const auto r1 = detail::prop2_weights(px, wyx, ny, pa, 0);
  const auto t1 = detail::prop2_term(r2, nx, ny, detail::view_of(pu1_x), d[0], true);
  const auto t2 = detail::prop2_term(r1, nx, ny, detail::view_of(pu2_x), d[1], true);
  const auto pxa = detail::joint_xa(px, pa);
  RatePoint p;
  const double ixa = detail::info_xa(pxa, nx, 2);
  p.rate = ixa + std::max(t1.info, t2.info);
  p.cost = detail::expected_cost(CostFn(Alphabet({"1", "2"}), {costs[0], costs[1]}), pxa, nx);
  p.distortions = {t1.distortion, t2.distortion};
  p.method = Method::Evaluation;
  p.details["I(X;A)"] = ixa;
  p.details["P(A=2)I(X;U1|A=2,Y)"] = t1.info;
  p.details["P(A=1)I(X;U2|A=1,Y)"] = t2.info;
  double pa2 = 0.0;
  for (std::size_t x = 0; x < nx; ++x) pa2 += pxa[x * 2 + 1];
  p.details["P(A=2)"] = pa2;
  p.achieving = {{"p(a|x)", pa_x}, {"p(u1|x,a=2)", pu1_x}, {"p(u2|x,a=1)", pu2_x}};
  p.achieving.push_back({"xhat1(y,u1)", detail::recon_table(t1.recon, d[0].recon_size())});
  p.achieving.push_back({"xhat2(y,u2)", detail::recon_table(t2.recon, d[1].recon_size())});
  return p;
}

/// Switching lossy search: outer grid over p(a|x); for each candidate the two
/// max-terms decouple and are minimized separately over p(u1|x), p(u2|x).
/// |U_j| defaults to |X|+1. `inner_resolution` sets the inner grid.
inline RatePoint prop2_switching_lossy(const JointPmf& joint, const std::array<DistortionFn, 2>& d, double D1,
                                       double D2, double budget, std::array<double, 2> costs,
                                       const SearchConfig& cfg, std::optional<std::size_t> aux_size = std::nullopt,
                                       std::size_t inner_resolution = 11) {
  require_xy(joint, "prop2_switching_lossy");
  for (const auto& dj : d) {
    detail::require_distortion_shape(dj, joint.axis(0), "prop2_switching_lossy");
    detail::require_zero_distortion(dj, "prop2_switching_lossy");
  }
  if (!(D1 >= 0.0 && D2 >= 0.0)) throw DomainError("prop2_switching_lossy: distortion targets must be >= 0");
  const CostFn cost(Alphabet({"1", "2"}), {costs[0], costs[1]});
  detail::require_feasible_budget(cost, budget, "prop2_switching_lossy");
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  const std::size_t nu = aux_size.value_or(nx + 1);
  const auto px = joint.marginal_values({0});
  const auto wyx = conditional_y_given_x(joint);

  SearchConfig inner = cfg;
  inner.grid_resolution = std::min(cfg.grid_resolution, inner_resolution);

  struct Inner {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    std::size_t evals = 0;
  };
  // min over p(u|x) of the scaled information term subject to its distortion target.
  auto solve_inner = [&](const std::vector<double>& r, const DistortionFn& dj, double target, std::uint64_t seed) {
    Inner out;
    double mass = 0.0;
    for (double v : r) mass += v;
    if (mass <= 0.0) {
      out.value = 0.0;
      out.argmin.assign(nx * nu, 0.0);
      for (std::size_t x = 0; x < nx; ++x) out.argmin[x * nu] = 1.0;
      return out;
    }
    SimplexProduct sp;
    sp.add_block(nx, nu);
    PointObjective f = [&](std::span<const double> x) {
      const auto t = detail::prop2_term(r, nx, ny, sp.view(x, 0), dj, false);
      if (t.distortion > target + detail::kDistortionSlack) return std::numeric_limits<double>::infinity();
      return t.info;
    };
    SearchConfig c = inner;
    c.seed = seed;
    const auto res = grid_search(sp, f, {}, c);
    out.evals = res.evals;
    if (res.feasible) {
      out.value = res.value;
      out.argmin = res.argmin;
    }
    return out;
  };

  SimplexProduct outer;
  outer.add_block(nx, 2, cost.allowed());
  std::atomic<std::size_t> inner_evals{0};
  PointObjective f = [&](std::span<const double> x) {
    const auto pa = outer.view(x, 0);
    const auto pxa = detail::joint_xa(px, pa);
    if (detail::expected_cost(cost, pxa, nx) > budget + 1e-12) return std::numeric_limits<double>::infinity();
    const auto a1 = solve_inner(detail::prop2_weights(px, wyx, ny, pa, 1), d[0], D1, derive_seed(cfg.seed, "u1"));
    if (!std::isfinite(a1.value)) return a1.value;
    const auto a2 = solve_inner(detail::prop2_weights(px, wyx, ny, pa, 0), d[1], D2, derive_seed(cfg.seed, "u2"));
    inner_evals += a1.evals + a2.evals;
    return detail::info_xa(pxa, nx, 2) + std::max(a1.value, a2.value);
  };
  const auto res = grid_search(outer, f, {}, cfg);
  if (!res.feasible) throw InfeasibleError("prop2_switching_lossy: no distributions meet the targets");

  const auto pa = outer.view(res.argmin, 0);
  const auto a1 = solve_inner(detail::prop2_weights(px, wyx, ny, pa, 1), d[0], D1, derive_seed(cfg.seed, "u1"));
  const auto a2 = solve_inner(detail::prop2_weights(px, wyx, ny, pa, 0), d[1], D2, derive_seed(cfg.seed, "u2"));
  auto p = prop2_eval(joint, d, pa.to_table(), ConditionalTable(nx, nu, a1.argmin), ConditionalTable(nx, nu, a2.argmin),
                      costs);
  p.rate = res.value;
  p.method = Method::Search;
  p.evals = res.evals + inner_evals.load();
  p.details["aux_size"] = static_cast<double>(nu);
  return p;
}

// --- binary Hamming example without side information --------------------------

namespace detail {

inline double example2_term(double weight, double target) {
  if (weight <= 0.0) return 0.0;
  const double ratio = target / weight;
  if (ratio > 0.5) return 0.0;
  return weight * (1.0 - binary_entropy(ratio));
}

}  // namespace detail

struct Example2Point {
  double rate = 0.0;
  double alpha = 0.0;  // P(A=2)
};

/// min over α of max{α(1-H2(D1/α)) 1(D1/α ≤ 1/2), (1-α)(1-H2(D2/(1-α))) 1(D2/(1-α) ≤ 1/2)}.
inline Example2Point example2_solve(double D1, double D2) {
  if (!(D1 >= 0.0 && D1 <= 0.5 && D2 >= 0.0 && D2 <= 0.5)) {
    throw DomainError("example2_rate: D1 and D2 must lie in [0, 1/2]");
  }
  auto f = [&](double alpha) {
    return std::max(detail::example2_term(alpha, D1), detail::example2_term(1.0 - alpha, D2));
  };
  const auto m = scan_then_golden(f, 0.0, 1.0, 401, 1e-12);
  return {m.value, m.x};
}

inline double example2_rate(double D1, double D2) { return example2_solve(D1, D2).rate; }

struct Example2Row {
  double d1 = 0.0;
  double d2 = 0.0;
  double rate = 0.0;
  double alpha = 0.0;
};

inline std::vector<Example2Row> example2_surface(std::span<const double> d1_values, std::span<const double> d2_values) {
  const std::size_t n2 = d2_values.size();
  return parallel_map(d1_values.size() * n2, [&](std::size_t i) {
    const double a = d1_values[i / n2];
    const double b = d2_values[i % n2];
    const auto s = example2_solve(a, b);
    return Example2Row{a, b, s.rate, s.alpha};
  });
}

/// Binary uniform source with no side information, in the (X, Y) form the
/// switching evaluators take.
inline JointPmf example2_joint() { return JointPmf({Alphabet::binary(), Alphabet({"0"})}, {0.5, 0.5}); }

}  // namespace action_rdc
