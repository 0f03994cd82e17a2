#pragma once

// Minimization over products of probability simplices (grid enumeration plus
// shrinking pattern search), 1-D golden section, and Blahut-Arimoto solvers
// for rate-distortion and cost-constrained capacity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/parallel.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc {

struct SearchConfig {
  std::size_t grid_resolution = 21;  // points per simplex edge, including both ends
  std::size_t refinement_rounds = 3;
  double refinement_shrink = 0.25;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  std::size_t max_evals = 2'000'000;

  void validate() const {
    if (grid_resolution < 2) throw DomainError("search.grid_resolution must be >= 2");
    if (!(refinement_shrink > 0.0 && refinement_shrink < 1.0)) {
      throw DomainError("search.refinement_shrink must lie in (0,1)");
    }
    if (!(tolerance > 0.0)) throw DomainError("search.tolerance must be positive");
    if (max_evals == 0) throw DomainError("search.max_evals must be positive");
  }
};

/// Read-only view of one row-stochastic block inside a search point.
struct TableView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const noexcept { return data.subspan(r * cols, cols); }
  ConditionalTable to_table() const { return ConditionalTable(rows, cols, {data.begin(), data.end()}); }
};

/// Product of row simplices, grouped into blocks (one block per conditional
/// table). Cells can be masked out, which pins them to zero.
class SimplexProduct {
 public:
  std::size_t add_block(std::size_t rows, std::size_t cols, std::vector<bool> allowed = {}) {
    if (rows == 0 || cols == 0) throw DomainError("simplex block must be nonempty");
    if (allowed.empty()) allowed.assign(rows * cols, true);
    if (allowed.size() == cols && rows > 1) {
      std::vector<bool> full;
      for (std::size_t r = 0; r < rows; ++r) full.insert(full.end(), allowed.begin(), allowed.end());
      allowed = std::move(full);
    }
    if (allowed.size() != rows * cols) throw DomainError("simplex mask size mismatch");
    Block b{rows, cols, dim_};
    for (std::size_t r = 0; r < rows; ++r) {
      Row row;
      row.offset = dim_ + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        if (allowed[r * cols + c]) row.cells.push_back(row.offset + c);
      }
      if (row.cells.empty()) throw DomainError("simplex row has no allowed cell");
      rows_.push_back(std::move(row));
    }
    dim_ += rows * cols;
    blocks_.push_back(b);
    return blocks_.size() - 1;
  }

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t row_count() const noexcept { return rows_.size(); }

  TableView view(std::span<const double> point, std::size_t block) const {
    const auto& b = blocks_.at(block);
    return TableView{point.subspan(b.offset, b.rows * b.cols), b.rows, b.cols};
  }

  struct Row {
    std::size_t offset = 0;
    std::vector<std::size_t> cells;  // absolute indices of allowed cells
  };
  const std::vector<Row>& rows() const noexcept { return rows_; }

  /// Uniform over the allowed cells of every row.
  std::vector<double> center() const {
    std::vector<double> x(dim_, 0.0);
    for (const auto& r : rows_) {
      for (auto c : r.cells) x[c] = 1.0 / static_cast<double>(r.cells.size());
    }
    return x;
  }

  bool contains(std::span<const double> x, double tol = 1e-9) const {
    if (x.size() != dim_) return false;
    std::vector<bool> allowed(dim_, false);
    for (const auto& r : rows_) {
      for (auto c : r.cells) allowed[c] = true;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] < -tol || (!allowed[i] && x[i] > tol)) return false;
    }
    for (const auto& b : blocks_) {
      for (std::size_t r = 0; r < b.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < b.cols; ++c) s += x[b.offset + r * b.cols + c];
        if (std::abs(s - 1.0) > tol) return false;
      }
    }
    return true;
  }

 private:
  struct Block {
    std::size_t rows, cols, offset;
  };
  std::vector<Block> blocks_;
  std::vector<Row> rows_;
  std::size_t dim_ = 0;
};

struct SearchResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  std::size_t evals = 0;
  bool feasible = false;
  std::size_t resolution_used = 0;
  std::vector<double> round_values;  // grid value, then after each refinement round
};

using PointObjective = std::function<double(std::span<const double>)>;
using PointPredicate = std::function<bool(std::span<const double>)>;

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double grid_size(const SimplexProduct& space, std::size_t units) {
  double total = 1.0;
  for (const auto& r : space.rows()) {
    const std::size_t k = r.cells.size();
    total *= binomial(units + k - 1, k - 1);
  }
  return total;
}

// All ways to write `units` as an ordered sum of k nonnegative parts, in
// lexicographic order.
inline void compositions(std::size_t units, std::size_t k, std::vector<std::size_t>& cur,
                         std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == k) {
    std::size_t used = 0;
    for (auto v : cur) used += v;
    cur.push_back(units - used);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  std::size_t used = 0;
  for (auto v : cur) used += v;
  for (std::size_t v = 0; v + used <= units; ++v) {
    cur.push_back(v);
    compositions(units, k, cur, out);
    cur.pop_back();
  }
}

class Evaluator {
 public:
  Evaluator(const PointObjective& f, const PointPredicate& feasible, std::size_t budget)
      : f_(f), feasible_(feasible), budget_(budget) {}

  // Objective value, or +inf when infeasible.
  double operator()(std::span<const double> x) {
    ++evals_;
    return score(f_, feasible_, x);
  }
  static double score(const PointObjective& f, const PointPredicate& feasible, std::span<const double> x) {
    if (feasible && !feasible(x)) return std::numeric_limits<double>::infinity();
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
  bool exhausted() const noexcept { return evals_ >= budget_; }
  std::size_t evals() const noexcept { return evals_; }
  void add(std::size_t n) noexcept { evals_ += n; }

 private:
  const PointObjective& f_;
  const PointPredicate& feasible_;
  std::size_t budget_;
  std::size_t evals_ = 0;
};

// Move `amount` of mass from cell `from` to cell `to` (clamped to what is there).
inline bool transfer(std::vector<double>& x, std::size_t from, std::size_t to, double amount) {
  const double a = std::min(amount, x[from]);
  if (a <= 0.0) return false;
  x[from] -= a;
  x[to] += a;
  if (x[from] < 1e-15) x[from] = 0.0;
  return true;
}

}  // namespace detail

/// Minimizes `objective` over the simplex product. Infeasible points (by the
/// predicate, or a non-finite objective) are rejected. `seeds` are extra
/// starting candidates that only win when strictly better than the grid.
inline SearchResult grid_search(const SimplexProduct& space, const PointObjective& objective,
                                const PointPredicate& feasible, const SearchConfig& cfg,
                                const std::vector<std::vector<double>>& seeds = {}) {
  cfg.validate();
  SearchResult result;
  detail::Evaluator eval(objective, feasible, cfg.max_evals);

  // Coarsen until the grid uses at most half the budget; the remaining rounds
  // make up the lost resolution.
  const std::size_t nominal_units = cfg.grid_resolution - 1;
  std::size_t units = nominal_units;
  const double grid_budget = static_cast<double>(cfg.max_evals) / 2.0;
  while (units > 1 && detail::grid_size(space, units) > grid_budget) --units;
  std::size_t rounds = cfg.refinement_rounds;
  if (units < nominal_units) {
    const double ratio = static_cast<double>(nominal_units) / static_cast<double>(units);
    rounds += static_cast<std::size_t>(std::ceil(std::log(ratio) / std::log(1.0 / cfg.refinement_shrink) - 1e-9));
  }
  result.resolution_used = units + 1;

  // Per-row composition lists.
  const auto& rows = space.rows();
  std::vector<std::vector<std::vector<std::size_t>>> comps(rows.size());
  std::vector<std::size_t> radix(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::size_t> cur;
    detail::compositions(units, rows[r].cells.size(), cur, comps[r]);
    radix[r] = comps[r].size();
  }
  const double total_d = detail::grid_size(space, units);
  const std::size_t total = total_d > static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)
                                ? std::numeric_limits<std::size_t>::max() / 2
                                : static_cast<std::size_t>(total_d);
  const std::size_t limit = std::min(total, cfg.max_evals);

  auto write_row = [&](std::vector<double>& x, std::size_t r, std::size_t which) {
    const auto& comp = comps[r][which];
    const auto& cells = rows[r].cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      x[cells[i]] = static_cast<double>(comp[i]) / static_cast<double>(units);
    }
  };

  // Grid sweep in chunks; each chunk keeps its first strict minimum and the
  // reduction prefers the lowest index, so ties resolve to the earliest point.
  const std::size_t chunk_count = std::min<std::size_t>(std::max<std::size_t>(1, limit / 4096 + 1), 256);
  struct ChunkBest {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
  };
  std::vector<ChunkBest> best_of(chunk_count);
  parallel_for(chunk_count, [&](std::size_t c) {
    const std::size_t begin = limit * c / chunk_count;
    const std::size_t end = limit * (c + 1) / chunk_count;
    if (begin >= end) return;
    std::vector<double> x(space.dimension(), 0.0);
    std::vector<std::size_t> digit(rows.size(), 0);
    std::size_t rem = begin;
    for (std::size_t r = rows.size(); r-- > 0;) {
      digit[r] = rem % radix[r];
      rem /= radix[r];
    }
    for (std::size_t r = 0; r < rows.size(); ++r) write_row(x, r, digit[r]);
    ChunkBest best;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = detail::Evaluator::score(objective, feasible, x);
      if (v < best.value) {
        best.value = v;
        best.index = i;
      }
      for (std::size_t r = rows.size(); r-- > 0;) {
        if (++digit[r] < radix[r]) {
          write_row(x, r, digit[r]);
          break;
        }
        digit[r] = 0;
        write_row(x, r, 0);
      }
    }
    best_of[c] = best;
  });
  eval.add(limit);

  ChunkBest best;
  for (const auto& b : best_of) {
    if (b.value < best.value) best = b;
  }
  std::vector<double> x(space.dimension(), 0.0);
  double fx = std::numeric_limits<double>::infinity();
  if (best.index != std::numeric_limits<std::size_t>::max()) {
    std::size_t rem = best.index;
    for (std::size_t r = rows.size(); r-- > 0;) {
      write_row(x, r, rem % radix[r]);
      rem /= radix[r];
    }
    fx = best.value;
  }
  for (const auto& s : seeds) {
    if (!space.contains(s)) throw DomainError("grid_search: seed point outside the simplex product");
    const double v = eval(s);
    if (v < fx) {
      fx = v;
      x = s;
    }
  }

  if (!std::isfinite(fx)) {
    result.evals = eval.evals();
    if (limit < total) throw BudgetExhausted("grid_search: evaluation budget exhausted before a feasible point");
    result.feasible = false;
    return result;
  }
  result.round_values.push_back(fx);

  // Pattern search around the incumbent with step h, shrinking each round.
  const std::size_t dim_rows = rows.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pair_moves(dim_rows);
  for (std::size_t r = 0; r < dim_rows; ++r) {
    const auto& cells = rows[r].cells;
    for (auto from : cells) {
      for (auto to : cells) {
        if (from != to) pair_moves[r].emplace_back(from, to);
      }
    }
  }
  Rng rng(derive_seed(cfg.seed, "grid_search.refine"));
  double h = 1.0 / static_cast<double>(units);
  for (std::size_t round = 0; round < rounds && !eval.exhausted(); ++round) {
    h *= cfg.refinement_shrink;
    if (h < 1e-12) break;

    // Joint neighborhood size with steps {h, 2h}; fall back to w = 1, then to
    // coordinate moves plus random joint directions.
    auto joint_size = [&](std::size_t w) {
      double n = 1.0;
      for (const auto& m : pair_moves) n *= 1.0 + static_cast<double>(m.size() * w);
      return n;
    };
    std::size_t w = 0;
    if (joint_size(2) <= 4096.0) {
      w = 2;
    } else if (joint_size(1) <= 4096.0) {
      w = 1;
    }

    for (std::size_t iter = 0; iter < 200 && !eval.exhausted(); ++iter) {
      bool improved = false;
      if (w > 0) {
        std::vector<std::size_t> per_row(dim_rows);
        for (std::size_t r = 0; r < dim_rows; ++r) per_row[r] = 1 + pair_moves[r].size() * w;
        std::vector<std::size_t> digit(dim_rows, 0);
        std::vector<double> best_x;
        double best_v = fx;
        for (;;) {
          std::size_t r = dim_rows;
          while (r-- > 0) {
            if (++digit[r] < per_row[r]) break;
            digit[r] = 0;
          }
          if (r == std::numeric_limits<std::size_t>::max()) break;  // wrapped: done
          std::vector<double> y = x;
          bool moved = false;
          for (std::size_t q = 0; q < dim_rows; ++q) {
            if (digit[q] == 0) continue;
            const std::size_t m = digit[q] - 1;
            const auto [from, to] = pair_moves[q][m % pair_moves[q].size()];
            const double amount = h * static_cast<double>(m / pair_moves[q].size() + 1);
            moved = detail::transfer(y, from, to, amount) || moved;
          }
          if (!moved) continue;
          const double v = eval(y);
          if (v < best_v - cfg.tolerance * 1e-3) {
            best_v = v;
            best_x = std::move(y);
          }
          if (eval.exhausted()) break;
        }
        if (!best_x.empty()) {
          x = std::move(best_x);
          fx = best_v;
          improved = true;
        }
      } else {
        for (std::size_t r = 0; r < dim_rows && !eval.exhausted(); ++r) {
          std::vector<double> best_x;
          double best_v = fx;
          for (std::size_t t = 1; t <= 2; ++t) {
            for (const auto& [from, to] : pair_moves[r]) {
              std::vector<double> y = x;
              if (!detail::transfer(y, from, to, h * static_cast<double>(t))) continue;
              const double v = eval(y);
              if (v < best_v - cfg.tolerance * 1e-3) {
                best_v = v;
                best_x = std::move(y);
              }
            }
          }
          if (!best_x.empty()) {
            x = std::move(best_x);
            fx = best_v;
            improved = true;
          }
        }
        // Random zero-sum directions touching every row at once.
        for (std::size_t d = 0; d < 16 && !eval.exhausted(); ++d) {
          std::vector<double> dir(space.dimension(), 0.0);
          for (const auto& row : rows) {
            if (row.cells.size() < 2) continue;
            double mean = 0.0;
            for (auto c : row.cells) {
              dir[c] = 2.0 * uniform01(rng) - 1.0;
              mean += dir[c];
            }
            mean /= static_cast<double>(row.cells.size());
            double amax = 0.0;
            for (auto c : row.cells) {
              dir[c] -= mean;
              amax = std::max(amax, std::abs(dir[c]));
            }
            if (amax > 0.0) {
              for (auto c : row.cells) dir[c] *= h / amax;
            }
          }
          for (double sign : {1.0, -1.0}) {
            double t = 1.0;
            for (std::size_t i = 0; i < dir.size(); ++i) {
              const double step = sign * dir[i];
              if (step < 0.0 && x[i] + step < 0.0) t = std::min(t, x[i] / -step);
            }
            if (t <= 0.0) continue;
            std::vector<double> y = x;
            for (std::size_t i = 0; i < dir.size(); ++i) y[i] = std::max(0.0, y[i] + t * sign * dir[i]);
            const double v = eval(y);
            if (v < fx - cfg.tolerance * 1e-3) {
              x = std::move(y);
              fx = v;
              improved = true;
              break;
            }
          }
        }
      }
      if (!improved) break;
    }
    result.round_values.push_back(fx);
  }

  result.value = fx;
  result.argmin = std::move(x);
  result.evals = eval.evals();
  result.feasible = true;
  return result;
}

/// Single conditional table p(col | row) searched on its own.
using TableObjective = std::function<double(const TableView&)>;
using TablePredicate = std::function<bool(const TableView&)>;

inline SearchResult grid_search_conditional(const TableObjective& objective, std::size_t rows, std::size_t cols,
                                            const std::vector<TablePredicate>& constraints, const SearchConfig& cfg,
                                            std::vector<bool> allowed = {}) {
  SimplexProduct space;
  space.add_block(rows, cols, std::move(allowed));
  PointObjective f = [&](std::span<const double> x) { return objective(space.view(x, 0)); };
  PointPredicate ok;
  if (!constraints.empty()) {
    ok = [&](std::span<const double> x) {
      const auto v = space.view(x, 0);
      return std::all_of(constraints.begin(), constraints.end(), [&](const auto& c) { return c(v); });
    };
  }
  return grid_search(space, f, ok, cfg);
}

// --- one-dimensional minimization -----------------------------------------

struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a local minimum on [lo, hi]; the endpoints are
/// also compared so a boundary minimum is returned exactly.
inline ScalarMin golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-9) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi) throw DomainError("golden_section: invalid interval");
  if (!(tol > 0.0)) throw DomainError("golden_section: tolerance must be positive");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  ScalarMin best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double e : {lo, hi}) {
    const double v = f(e);
    if (v < best.value) best = {e, v};
  }
  return best;
}

/// Uniform scan followed by golden section on the bracket around the best
/// scan point; tolerates non-unimodal objectives.
inline ScalarMin scan_then_golden(const std::function<double(double)>& f, double lo, double hi,
                                  std::size_t scan_points = 201, double tol = 1e-10) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi) throw DomainError("scan_then_golden: invalid interval");
  if (lo == hi) return {lo, f(lo)};
  scan_points = std::max<std::size_t>(scan_points, 3);
  const double step = (hi - lo) / static_cast<double>(scan_points - 1);
  ScalarMin best{lo, f(lo)};
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < scan_points; ++i) {
    const double xi = i + 1 == scan_points ? hi : lo + step * static_cast<double>(i);
    const double v = f(xi);
    if (v < best.value) {
      best = {xi, v};
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + step * static_cast<double>(best_i - 1);
  const double b = best_i + 1 >= scan_points ? hi : lo + step * static_cast<double>(best_i + 1);
  const auto g = golden_section(f, a, b, tol);
  if (g.value < best.value) best = g;
  return best;
}

// --- Blahut-Arimoto -------------------------------------------------------

struct BaRdPoint {
  double slope = 0.0;                  // Lagrange multiplier s (nats per unit distortion)
  double rate = 0.0;                   // bits
  double distortion = 0.0;
  std::vector<double> recon_marginal;  // q(x̂)
  std::vector<double> test_channel;    // p(x̂|x), row-major
  std::vector<double> trace;           // Lagrangian value per iteration (nats), non-increasing
  std::size_t iterations = 0;
};

/// Blahut-Arimoto at a fixed slope: minimizes I(X;X̂) + s E d over p(x̂|x).
inline BaRdPoint ba_rd_at_slope(std::span<const double> px, const DistortionFn& d, double s, std::size_t iters = 10000,
                                double tol = 1e-13) {
  const std::size_t nx = px.size();
  const std::size_t ny = d.recon_size();
  if (d.source_size() != nx) throw DomainError("blahut_arimoto: distortion/source alphabet mismatch");
  BaRdPoint out;
  out.slope = s;
  std::vector<double> q(ny, 1.0 / static_cast<double>(ny));
  std::vector<double> cond(nx * ny);
  for (std::size_t it = 0; it < iters; ++it) {
    // p(x̂|x) ∝ q(x̂) exp(-s d), with the exponent shifted for stability.
    double lagrangian = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t y = 0; y < ny; ++y) {
        if (q[y] > 0.0) dmin = std::min(dmin, d(x, y));
      }
      double z = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        cond[x * ny + y] = q[y] > 0.0 ? q[y] * std::exp(-s * (d(x, y) - dmin)) : 0.0;
        z += cond[x * ny + y];
      }
      for (std::size_t y = 0; y < ny; ++y) cond[x * ny + y] /= z;
      if (px[x] > 0.0) lagrangian += px[x] * (s * dmin - std::log(z));
    }
    out.trace.push_back(lagrangian);
    std::vector<double> qn(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) qn[y] += px[x] * cond[x * ny + y];
    }
    double change = 0.0;
    for (std::size_t y = 0; y < ny; ++y) change = std::max(change, std::abs(qn[y] - q[y]));
    q = std::move(qn);
    out.iterations = it + 1;
    if (change < tol) break;
  }
  double rate = 0.0;
  double dist = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double pj = px[x] * cond[x * ny + y];
      if (pj <= 0.0) continue;
      rate += pj * std::log2(cond[x * ny + y] / q[y]);
      dist += pj * d(x, y);
    }
  }
  out.rate = std::max(0.0, rate);
  out.distortion = dist;
  out.recon_marginal = std::move(q);
  out.test_channel = std::move(cond);
  return out;
}

/// Smallest and largest distortions that matter: below D_min nothing is
/// feasible, at D_max the rate is zero.
inline std::pair<double, double> rd_distortion_range(std::span<const double> px, const DistortionFn& d) {
  double dmin = 0.0;
  for (std::size_t x = 0; x < px.size(); ++x) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < d.recon_size(); ++y) m = std::min(m, d(x, y));
    dmin += px[x] * m;
  }
  double dmax = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < d.recon_size(); ++y) {
    double e = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) e += px[x] * d(x, y);
    dmax = std::min(dmax, e);
  }
  return {dmin, dmax};
}

struct RdSolution {
  double rate = 0.0;
  double distortion = 0.0;
  std::vector<double> test_channel;  // p(x̂|x), row-major
};

/// R(D) in bits via slope bisection, with the achieving test channel.
inline RdSolution blahut_arimoto_rd_solve(const Pmf& source, const DistortionFn& d, double D,
                                          std::size_t iters = 10000, double tol = 1e-7) {
  if (!std::isfinite(D) || D < 0.0) throw DomainError("blahut_arimoto_rd: distortion target must be >= 0");
  const auto px = source.probs();
  const auto [dmin, dmax] = rd_distortion_range(px, d);
  if (D >= dmax - 1e-12) {
    // Zero rate: every x maps to the best constant reconstruction.
    std::vector<double> w(px.begin(), px.end());
    const auto [xh, dist] = d.best_recon(w);
    std::vector<double> ch(px.size() * d.recon_size(), 0.0);
    for (std::size_t x = 0; x < px.size(); ++x) ch[x * d.recon_size() + xh] = 1.0;
    return {0.0, dist, std::move(ch)};
  }
  if (D < dmin - 1e-12) throw InfeasibleError("blahut_arimoto_rd: target below the minimum distortion");

  double s_lo = 0.0;
  double s_hi = 1.0;
  BaRdPoint hi = ba_rd_at_slope(px, d, s_hi, iters);
  while (hi.distortion > D + tol * 1e-2) {
    s_hi *= 2.0;
    if (s_hi > 1e5) {
      // D sits at D_min; the large-slope point is the limit.
      if (D <= dmin + 1e-9) return {hi.rate, hi.distortion, hi.test_channel};
      throw NonConvergence("blahut_arimoto_rd: slope bracket [" + std::to_string(s_lo) + ", " +
                           std::to_string(s_hi) + "] never reached the target");
    }
    hi = ba_rd_at_slope(px, d, s_hi, iters);
  }
  BaRdPoint mid = hi;
  for (int k = 0; k < 200; ++k) {
    const double s = 0.5 * (s_lo + s_hi);
    mid = ba_rd_at_slope(px, d, s, iters);
    if (std::abs(mid.distortion - D) < tol * 1e-2) break;
    if (mid.distortion > D) {
      s_lo = s;
    } else {
      s_hi = s;
      hi = mid;
    }
    if (s_hi - s_lo < 1e-12 * std::max(1.0, s_hi)) {
      mid = hi;
      break;
    }
  }
  // First-order correction along the supporting line of slope -s / ln 2.
  const double r = mid.rate - mid.slope / std::log(2.0) * (D - mid.distortion);
  return {std::max(0.0, r), mid.distortion, mid.test_channel};
}

inline double blahut_arimoto_rd(const Pmf& source, const DistortionFn& d, double D, std::size_t iters = 10000,
                                double tol = 1e-7) {
  return blahut_arimoto_rd_solve(source, d, D, iters, tol).rate;
}

struct BaCapacityPoint {
  double multiplier = 0.0;        // λ, bits per unit cost
  double information = 0.0;       // I(A;Y) in bits
  double cost = 0.0;              // E Λ(A)
  std::vector<double> input;      // p(a), over the channel's full input alphabet
  std::vector<double> trace;      // I - λ E Λ per iteration (bits), non-decreasing
  std::size_t iterations = 0;
};

/// Blahut-Arimoto at a fixed multiplier over the inputs marked `active`.
inline BaCapacityPoint ba_capacity_at_multiplier(const Channel& ch, std::span<const double> costs,
                                                 const std::vector<bool>& active, double lambda,
                                                 std::size_t iters = 20000, double tol = 1e-12) {
  const std::size_t na = ch.rows();
  const std::size_t ny = ch.cols();
  std::size_t n_active = 0;
  for (std::size_t a = 0; a < na; ++a) n_active += active[a] ? 1 : 0;
  if (n_active == 0) throw InfeasibleError("capacity: no admissible input");
  std::vector<double> r(na, 0.0);
  for (std::size_t a = 0; a < na; ++a) r[a] = active[a] ? 1.0 / static_cast<double>(n_active) : 0.0;

  auto divergences = [&](const std::vector<double>& input, std::vector<double>& div) {
    std::vector<double> qy(ny, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t y = 0; y < ny; ++y) qy[y] += input[a] * ch(a, y);
    }
    div.assign(na, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      if (!active[a]) continue;
      double v = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        const double w = ch(a, y);
        if (w > 0.0) v += w * std::log2(w / qy[y]);
      }
      div[a] = v;
    }
  };

  BaCapacityPoint out;
  out.multiplier = lambda;
  std::vector<double> div;
  for (std::size_t it = 0; it < iters; ++it) {
    divergences(r, div);
    double value = 0.0;
    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < na; ++a) {
      if (!active[a]) continue;
      value += r[a] * (div[a] - lambda * costs[a]);
      upper = std::max(upper, div[a] - lambda * costs[a]);
    }
    out.trace.push_back(value);
    out.iterations = it + 1;
    if (upper - value < tol) break;
    double z = 0.0;
    std::vector<double> rn(na, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      if (!active[a] || r[a] <= 0.0) continue;
      rn[a] = r[a] * std::exp2(div[a] - lambda * costs[a] - upper);
      z += rn[a];
    }
    for (auto& v : rn) v /= z;
    r = std::move(rn);
  }
  divergences(r, div);
  double info = 0.0;
  double cost = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    if (r[a] <= 0.0) continue;
    info += r[a] * div[a];
    cost += r[a] * costs[a];
  }
  out.information = std::max(0.0, info);
  out.cost = cost;
  out.input = std::move(r);
  return out;
}

struct CapacityCostResult {
  double capacity = 0.0;
  std::vector<double> input;
  double cost = 0.0;
};

/// max I(A;Y) over p(a) with E Λ(A) ≤ budget. Infinite-cost inputs are excluded.
inline CapacityCostResult blahut_arimoto_capacity_cost_detail(const Channel& ch, const CostFn& cost, double budget,
                                                              std::size_t iters = 20000, double tol = 1e-9) {
  if (ch.rows() != cost.size()) throw DomainError("capacity: channel inputs and cost table disagree in size");
  if (std::isnan(budget)) throw DomainError("capacity: budget is NaN");
  auto active = cost.allowed();
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cost.size(); ++a) {
    if (active[a]) min_cost = std::min(min_cost, cost(a));
  }
  if (budget < min_cost - 1e-12) throw InfeasibleError("capacity: no input meets the cost budget");
  std::vector<double> costs(cost.costs().begin(), cost.costs().end());
  for (std::size_t a = 0; a < costs.size(); ++a) {
    if (!active[a]) costs[a] = 0.0;  // masked anyway; keeps arithmetic finite
  }

  if (budget <= min_cost + 1e-12) {
    for (std::size_t a = 0; a < cost.size(); ++a) active[a] = active[a] && cost(a) <= min_cost + 1e-12;
    const auto p = ba_capacity_at_multiplier(ch, costs, active, 0.0, iters, tol * 1e-3);
    return {p.information, p.input, p.cost};
  }
  auto free = ba_capacity_at_multiplier(ch, costs, active, 0.0, iters, tol * 1e-3);
  if (free.cost <= budget + 1e-12) return {free.information, free.input, free.cost};

  double lo = 0.0;
  double hi = 1.0;
  auto at_hi = ba_capacity_at_multiplier(ch, costs, active, hi, iters, tol * 1e-3);
  while (at_hi.cost > budget) {
    hi *= 2.0;
    if (hi > 1e6) {
      throw NonConvergence("capacity: multiplier bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] never met the budget");
    }
    at_hi = ba_capacity_at_multiplier(ch, costs, active, hi, iters, tol * 1e-3);
  }
  auto best = at_hi;
  for (int k = 0; k < 200 && hi - lo > 1e-12; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto p = ba_capacity_at_multiplier(ch, costs, active, mid, iters, tol * 1e-3);
    if (p.cost > budget) {
      lo = mid;
    } else {
      hi = mid;
      best = p;
    }
    if (std::abs(p.cost - budget) < tol) {
      best = p;
      break;
    }
  }
  // Concave in the budget: the supporting line at λ bounds the gap.
  const double c = best.information + best.multiplier * (budget - best.cost);
  return {std::max(0.0, c), best.input, best.cost};
}

inline double blahut_arimoto_capacity_cost(const Channel& ch, const CostFn& cost, double budget,
                                           std::size_t iters = 20000, double tol = 1e-9) {
  return blahut_arimoto_capacity_cost_detail(ch, cost, budget, iters, tol).capacity;
}

}  // namespace action_rdc
