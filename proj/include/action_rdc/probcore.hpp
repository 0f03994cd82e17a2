#pragma once

// Finite-alphabet probability tables and the Shannon measures computed on them.
// All logarithms are base 2. Tables are dense and row-major with the last axis
// varying fastest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "action_rdc/error.hpp"

namespace action_rdc {

inline constexpr double kPmfTolerance = 1e-9;
inline constexpr std::string_view kErasureSymbol = "e";

using AxisList = std::vector<std::size_t>;

namespace detail {

inline std::string describe_index(std::size_t i) { return "[" + std::to_string(i) + "]"; }

// Entries must be finite and nonnegative; the sum must be within tolerance of
// one. Accepted vectors are renormalized in place.
inline void normalize_probabilities(std::vector<double>& p, std::string_view what) {
  if (p.empty()) throw InvalidDistribution(std::string(what) + ": empty probability vector");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) {
      throw InvalidDistribution(std::string(what) + ": non-finite entry at " + describe_index(i));
    }
    if (p[i] < 0.0) {
      throw InvalidDistribution(std::string(what) + ": negative entry " + std::to_string(p[i]) +
                                " at " + describe_index(i));
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw InvalidDistribution(std::string(what) + ": entries sum to " + std::to_string(total) +
                              ", expected 1");
  }
  for (auto& v : p) v /= total;
}

inline std::size_t product(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

}  // namespace detail

/// Shannon entropy in bits of a nonnegative vector summing to one; 0 log 0 = 0.
inline double entropy_bits(std::span<const double> p) noexcept {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

/// Marginal of a dense row-major table with extents `dims` onto the axes in
/// `keep`, output axes in the order given. No validation.
inline std::vector<double> marginalize(std::span<const double> probs, std::span<const std::size_t> dims,
                                       const AxisList& keep) {
  const std::size_t rank = dims.size();
  std::vector<std::size_t> out_stride(rank, 0);
  std::size_t out_size = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = out_size;
    out_size *= dims[keep[k]];
  }
  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t out_index = 0;
  for (std::size_t flat = 0; flat < probs.size(); ++flat) {
    out[out_index] += probs[flat];
    for (std::size_t ax = rank; ax-- > 0;) {
      if (++idx[ax] < dims[ax]) {
        out_index += out_stride[ax];
        break;
      }
      out_index -= out_stride[ax] * (dims[ax] - 1);
      idx[ax] = 0;
    }
  }
  return out;
}

/// Entropy of the marginal on `axes` of a dense table; 0 for an empty set.
inline double entropy_of(std::span<const double> probs, std::span<const std::size_t> dims, const AxisList& axes) {
  if (axes.empty()) return 0.0;
  if (axes.size() == dims.size()) {
    bool identity = true;
    for (std::size_t i = 0; i < axes.size(); ++i) identity = identity && axes[i] == i;
    if (identity) return entropy_bits(probs);
  }
  return entropy_bits(marginalize(probs, dims, axes));
}

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InvalidDistribution("alphabet must be nonempty");
    std::unordered_set<std::string> seen;
    for (const auto& s : symbols_) {
      if (!seen.insert(s).second) throw InvalidDistribution("duplicate alphabet symbol '" + s + "'");
    }
  }
  Alphabet(std::initializer_list<std::string> symbols)
      : Alphabet(std::vector<std::string>(symbols)) {}

  /// Symbols "0", "1", ..., "n-1".
  static Alphabet range(std::size_t n) {
    std::vector<std::string> s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.push_back(std::to_string(i));
    return Alphabet(std::move(s));
  }
  static Alphabet binary() { return range(2); }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& operator[](std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  std::optional<std::size_t> find(std::string_view symbol) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
    if (it == symbols_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - symbols_.begin());
  }
  std::size_t index_of(std::string_view symbol) const {
    if (auto i = find(symbol)) return *i;
    throw DomainError("symbol '" + std::string(symbol) + "' not in alphabet");
  }

  /// Copy with one extra symbol appended.
  Alphabet with_symbol(std::string symbol) const {
    auto s = symbols_;
    s.push_back(std::move(symbol));
    return Alphabet(std::move(s));
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> symbols_;
};

class Pmf {
 public:
  Pmf(Alphabet alphabet, std::vector<double> probs)
      : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
    if (probs_.size() != alphabet_.size()) {
      throw InvalidDistribution("pmf has " + std::to_string(probs_.size()) + " entries for an alphabet of " +
                                std::to_string(alphabet_.size()));
    }
    detail::normalize_probabilities(probs_, "pmf");
  }

  static Pmf uniform(Alphabet alphabet) {
    const auto n = alphabet.size();
    return Pmf(std::move(alphabet), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }
  /// Distribution on {"0","1"} with P("1") = p.
  static Pmf bernoulli(double p) { return Pmf(Alphabet::binary(), {1.0 - p, p}); }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_.at(i); }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

/// Row-stochastic matrix without symbol labels; the working representation of
/// conditional distributions such as p(a|x) or p(u|x,a) inside the searches.
class ConditionalTable {
 public:
  ConditionalTable(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ == 0 || cols_ == 0) throw InvalidDistribution("conditional table must be nonempty");
    if (data_.size() != rows_ * cols_) throw InvalidDistribution("conditional table size mismatch");
    for (std::size_t r = 0; r < rows_; ++r) {
      std::vector<double> row(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
      detail::normalize_probabilities(row, "conditional table row " + std::to_string(r));
      std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
    }
  }
  ConditionalTable(std::initializer_list<std::initializer_list<double>> rows)
      : ConditionalTable(from_nested(rows)) {}

  /// Every row equal to `row`.
  static ConditionalTable constant_rows(std::size_t rows, std::span<const double> row) {
    std::vector<double> d;
    d.reserve(rows * row.size());
    for (std::size_t r = 0; r < rows; ++r) d.insert(d.end(), row.begin(), row.end());
    return ConditionalTable(rows, row.size(), std::move(d));
  }
  /// Deterministic map: row r puts all mass on column f[r].
  static ConditionalTable deterministic(std::span<const std::size_t> f, std::size_t cols) {
    std::vector<double> d(f.size() * cols, 0.0);
    for (std::size_t r = 0; r < f.size(); ++r) d.at(r * cols + f[r]) = 1.0;
    return ConditionalTable(f.size(), cols, std::move(d));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<const double> data() const noexcept { return data_; }

 private:
  static ConditionalTable from_nested(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t cols = rows.size() ? rows.begin()->size() : 0;
    std::vector<double> d;
    for (const auto& r : rows) {
      if (r.size() != cols) throw InvalidDistribution("ragged conditional table");
      d.insert(d.end(), r.begin(), r.end());
    }
    return ConditionalTable(rows.size(), cols, std::move(d));
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

class JointPmf {
 public:
  JointPmf(std::vector<Alphabet> axes, std::vector<double> probs)
      : axes_(std::move(axes)), probs_(std::move(probs)) {
    if (axes_.empty()) throw InvalidDistribution("joint pmf needs at least one axis");
    dims_.reserve(axes_.size());
    for (const auto& a : axes_) dims_.push_back(a.size());
    if (probs_.size() != detail::product(dims_)) {
      throw InvalidDistribution("joint pmf has " + std::to_string(probs_.size()) +
                                " entries, product alphabet has " + std::to_string(detail::product(dims_)));
    }
    detail::normalize_probabilities(probs_, "joint pmf");
  }

  explicit JointPmf(const Pmf& p)
      : JointPmf({p.alphabet()}, std::vector<double>(p.probs().begin(), p.probs().end())) {}

  std::size_t rank() const noexcept { return axes_.size(); }
  const Alphabet& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Alphabet>& axes() const noexcept { return axes_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::span<const double> probs() const noexcept { return probs_; }

  std::size_t flat_index(std::span<const std::size_t> index) const {
    if (index.size() != rank()) throw DomainError("index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (index[i] >= dims_[i]) throw DomainError("index out of range on axis " + std::to_string(i));
      flat = flat * dims_[i] + index[i];
    }
    return flat;
  }
  double at(std::span<const std::size_t> index) const { return probs_[flat_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  /// Marginal over `keep`, with the output axes in the order given.
  JointPmf marginal(const AxisList& keep) const {
    check_axes(keep, "marginal");
    std::vector<Alphabet> out_axes;
    for (auto a : keep) out_axes.push_back(axes_[a]);
    auto out = marginal_values(keep);
    return JointPmf(std::move(out_axes), std::move(out));
  }

  /// Distribution of the remaining axes given axis == value.
  JointPmf condition_on(std::size_t axis, std::size_t value) const {
    if (axis >= rank()) throw DomainError("condition_on: axis " + std::to_string(axis) + " not present");
    if (rank() == 1) throw DomainError("condition_on: cannot condition away the only axis");
    if (value >= dims_[axis]) throw DomainError("condition_on: value out of range");
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < rank(); ++i) inner *= dims_[i];
    const std::size_t outer = probs_.size() / (inner * dims_[axis]);
    std::vector<double> out;
    out.reserve(outer * inner);
    double mass = 0.0;
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = (o * dims_[axis] + value) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        out.push_back(probs_[base + i]);
        mass += probs_[base + i];
      }
    }
    if (mass <= 0.0) throw DomainError("condition_on: conditioning event has zero probability");
    for (auto& v : out) v /= mass;
    std::vector<Alphabet> out_axes;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (i != axis) out_axes.push_back(axes_[i]);
    }
    return JointPmf(std::move(out_axes), std::move(out));
  }

  Pmf as_pmf() const {
    if (rank() != 1) throw DomainError("as_pmf: joint has rank " + std::to_string(rank()));
    return Pmf(axes_[0], probs_);
  }

  /// Raw marginal probabilities over `keep` (no validation of the result).
  std::vector<double> marginal_values(const AxisList& keep) const { return marginalize(probs_, dims_, keep); }

  void check_axes(const AxisList& axes, std::string_view op) const {
    std::vector<bool> seen(rank(), false);
    for (auto a : axes) {
      if (a >= rank()) throw DomainError(std::string(op) + ": axis " + std::to_string(a) + " not present");
      if (seen[a]) throw DomainError(std::string(op) + ": axis " + std::to_string(a) + " repeated");
      seen[a] = true;
    }
  }

 private:
  std::vector<Alphabet> axes_;
  std::vector<std::size_t> dims_;
  std::vector<double> probs_;
};

/// Conditional distribution of output axes given input axes; one row per
/// input tuple (row-major over the inputs), one column per output tuple.
class Channel {
 public:
  Channel(std::vector<Alphabet> inputs, std::vector<Alphabet> outputs, std::vector<double> table)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)), table_(std::move(table)) {
    if (inputs_.empty() || outputs_.empty()) throw InvalidDistribution("channel needs input and output axes");
    for (const auto& a : inputs_) in_dims_.push_back(a.size());
    for (const auto& a : outputs_) out_dims_.push_back(a.size());
    rows_ = detail::product(in_dims_);
    cols_ = detail::product(out_dims_);
    if (table_.size() != rows_ * cols_) {
      throw InvalidDistribution("channel table has " + std::to_string(table_.size()) + " entries, expected " +
                                std::to_string(rows_ * cols_));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      std::vector<double> row(table_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                              table_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
      detail::normalize_probabilities(row, "channel row " + std::to_string(r));
      std::copy(row.begin(), row.end(), table_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
    }
  }

  Channel(Alphabet input, Alphabet output, const std::vector<std::vector<double>>& rows)
      : Channel({std::move(input)}, {std::move(output)}, flatten(rows)) {}

  static Channel identity(const Alphabet& a) {
    std::vector<double> t(a.size() * a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) t[i * a.size() + i] = 1.0;
    return Channel({a}, {a}, std::move(t));
  }

  const std::vector<Alphabet>& inputs() const noexcept { return inputs_; }
  const std::vector<Alphabet>& outputs() const noexcept { return outputs_; }
  const std::vector<std::size_t>& input_dims() const noexcept { return in_dims_; }
  const std::vector<std::size_t>& output_dims() const noexcept { return out_dims_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(table_).subspan(r * cols_, cols_);
  }
  double operator()(std::size_t r, std::size_t c) const noexcept { return table_[r * cols_ + c]; }
  std::span<const double> table() const noexcept { return table_; }

 private:
  static std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> t;
    for (const auto& r : rows) {
      if (!rows.empty() && r.size() != rows.front().size()) throw InvalidDistribution("ragged channel rows");
      t.insert(t.end(), r.begin(), r.end());
    }
    return t;
  }

  std::vector<Alphabet> inputs_;
  std::vector<Alphabet> outputs_;
  std::vector<std::size_t> in_dims_;
  std::vector<std::size_t> out_dims_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> table_;
};

/// Per-action cost Λ(a); +inf forbids the action.
class CostFn {
 public:
  CostFn(Alphabet actions, std::vector<double> costs) : actions_(std::move(actions)), costs_(std::move(costs)) {
    if (costs_.size() != actions_.size()) throw InvalidDistribution("cost table size mismatch");
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      if (std::isnan(costs_[i]) || costs_[i] < 0.0) {
        throw InvalidDistribution("cost " + detail::describe_index(i) + " must be nonnegative");
      }
    }
    if (std::all_of(costs_.begin(), costs_.end(), [](double c) { return std::isinf(c); })) {
      throw InvalidDistribution("every action is forbidden (infinite cost)");
    }
  }
  static CostFn zero(Alphabet actions) {
    const auto n = actions.size();
    return CostFn(std::move(actions), std::vector<double>(n, 0.0));
  }

  const Alphabet& actions() const noexcept { return actions_; }
  std::size_t size() const noexcept { return costs_.size(); }
  double operator()(std::size_t a) const { return costs_.at(a); }
  bool forbidden(std::size_t a) const { return std::isinf(costs_.at(a)); }
  std::span<const double> costs() const noexcept { return costs_; }
  double min_cost() const { return *std::min_element(costs_.begin(), costs_.end()); }
  std::vector<bool> allowed() const {
    std::vector<bool> ok(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i) ok[i] = !std::isinf(costs_[i]);
    return ok;
  }
  /// E Λ(A) for a distribution over actions; forbidden actions must carry zero mass.
  double expected(std::span<const double> pa) const {
    double c = 0.0;
    for (std::size_t a = 0; a < costs_.size(); ++a) {
      if (pa[a] <= 0.0) continue;
      c += pa[a] * costs_[a];
    }
    return c;
  }

 private:
  Alphabet actions_;
  std::vector<double> costs_;
};

/// Single-letter distortion d(x, x̂), row-major over (source, reconstruction).
class DistortionFn {
 public:
  DistortionFn(Alphabet source, Alphabet recon, std::vector<double> d)
      : source_(std::move(source)), recon_(std::move(recon)), d_(std::move(d)) {
    if (d_.size() != source_.size() * recon_.size()) throw InvalidDistribution("distortion table size mismatch");
    for (std::size_t i = 0; i < d_.size(); ++i) {
      if (!std::isfinite(d_[i]) || d_[i] < 0.0) {
        throw InvalidDistribution("distortion " + detail::describe_index(i) + " must be finite and nonnegative");
      }
    }
  }
  static DistortionFn hamming(const Alphabet& a) {
    std::vector<double> d(a.size() * a.size(), 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) d[i * a.size() + i] = 0.0;
    return DistortionFn(a, a, std::move(d));
  }

  const Alphabet& source() const noexcept { return source_; }
  const Alphabet& recon() const noexcept { return recon_; }
  std::size_t source_size() const noexcept { return source_.size(); }
  std::size_t recon_size() const noexcept { return recon_.size(); }
  double operator()(std::size_t x, std::size_t xh) const noexcept { return d_[x * recon_.size() + xh]; }
  std::span<const double> table() const noexcept { return d_; }

  /// Every source letter has a zero-distortion reconstruction.
  bool has_zero_distortion_recon() const {
    for (std::size_t x = 0; x < source_.size(); ++x) {
      bool ok = false;
      for (std::size_t xh = 0; xh < recon_.size(); ++xh) ok = ok || (*this)(x, xh) == 0.0;
      if (!ok) return false;
    }
    return true;
  }

  /// Reconstruction minimizing Σ_x w[x] d(x, x̂); lowest index on ties.
  std::pair<std::size_t, double> best_recon(std::span<const double> w) const noexcept {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t xh = 0; xh < recon_.size(); ++xh) {
      double v = 0.0;
      for (std::size_t x = 0; x < source_.size(); ++x) v += w[x] * (*this)(x, xh);
      if (v < best_val - 1e-15) {
        best_val = v;
        best = xh;
      }
    }
    return {best, best_val};
  }

 private:
  Alphabet source_;
  Alphabet recon_;
  std::vector<double> d_;
};

// --- information measures -------------------------------------------------

inline double entropy(const Pmf& p) { return entropy_bits(p.probs()); }
inline double entropy(const JointPmf& p) { return entropy_bits(p.probs()); }

/// Joint entropy of the marginal on `axes` (empty set has entropy 0).
inline double entropy(const JointPmf& joint, const AxisList& axes) {
  joint.check_axes(axes, "entropy");
  if (axes.empty()) return 0.0;
  return entropy_bits(joint.marginal_values(axes));
}

namespace detail {

inline AxisList join_axes(const AxisList& a, const AxisList& b) {
  AxisList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void require_disjoint(const JointPmf& joint, std::initializer_list<const AxisList*> sets,
                             std::string_view op) {
  AxisList all;
  for (const auto* s : sets) all.insert(all.end(), s->begin(), s->end());
  joint.check_axes(all, op);
}

}  // namespace detail

/// H(target | given) = H(target, given) - H(given).
inline double conditional_entropy(const JointPmf& joint, const AxisList& target, const AxisList& given) {
  detail::require_disjoint(joint, {&target, &given}, "conditional_entropy");
  const double h = entropy(joint, detail::join_axes(target, given)) - entropy(joint, given);
  return std::max(0.0, h);
}

/// I(a; b), tiny negative rounding residue clamped to zero.
inline double mutual_information(const JointPmf& joint, const AxisList& a, const AxisList& b) {
  detail::require_disjoint(joint, {&a, &b}, "mutual_information");
  if (a.empty() || b.empty()) throw DomainError("mutual_information: empty axis set");
  const double i = entropy(joint, a) + entropy(joint, b) - entropy(joint, detail::join_axes(a, b));
  return std::max(0.0, i);
}

/// I(a; b | given).
inline double conditional_mutual_information(const JointPmf& joint, const AxisList& a, const AxisList& b,
                                             const AxisList& given) {
  detail::require_disjoint(joint, {&a, &b, &given}, "conditional_mutual_information");
  if (a.empty() || b.empty()) throw DomainError("conditional_mutual_information: empty axis set");
  const auto ag = detail::join_axes(a, given);
  const auto bg = detail::join_axes(b, given);
  const double i = entropy(joint, ag) + entropy(joint, bg) - entropy(joint, given) -
                   entropy(joint, detail::join_axes(ag, b));
  return std::max(0.0, i);
}

inline double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

/// Unique preimage in [0, 1/2] of h under the binary entropy; bisection to 1e-10.
inline double binary_entropy_inv(double h) {
  if (!(h >= 0.0 && h <= 1.0)) throw DomainError("binary_entropy_inv: argument outside [0,1]");
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < h) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Joint of the source axes followed by the channel outputs. The channel's
/// inputs are matched to `input_axes` of the source (all axes, in order, when
/// empty); alphabets must agree exactly.
inline JointPmf compose(const JointPmf& source, const Channel& channel, AxisList input_axes = {}) {
  if (input_axes.empty()) {
    input_axes.resize(source.rank());
    std::iota(input_axes.begin(), input_axes.end(), std::size_t{0});
  }
  source.check_axes(input_axes, "compose");
  if (input_axes.size() != channel.inputs().size()) {
    throw DomainError("compose: channel has " + std::to_string(channel.inputs().size()) + " inputs, " +
                      std::to_string(input_axes.size()) + " source axes given");
  }
  for (std::size_t i = 0; i < input_axes.size(); ++i) {
    if (!(source.axis(input_axes[i]) == channel.inputs()[i])) {
      throw DomainError("compose: alphabet mismatch on channel input " + std::to_string(i));
    }
  }
  const auto& dims = source.dims();
  std::vector<std::size_t> in_stride(source.rank(), 0);
  {
    std::size_t s = 1;
    for (std::size_t k = input_axes.size(); k-- > 0;) {
      in_stride[input_axes[k]] = s;
      s *= dims[input_axes[k]];
    }
  }
  const auto src = source.probs();
  std::vector<double> out(src.size() * channel.cols());
  std::vector<std::size_t> idx(source.rank(), 0);
  std::size_t row = 0;
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    const auto r = channel.row(row);
    for (std::size_t c = 0; c < r.size(); ++c) out[flat * r.size() + c] = src[flat] * r[c];
    for (std::size_t ax = source.rank(); ax-- > 0;) {
      if (++idx[ax] < dims[ax]) {
        row += in_stride[ax];
        break;
      }
      row -= in_stride[ax] * (dims[ax] - 1);
      idx[ax] = 0;
    }
  }
  auto axes = source.axes();
  axes.insert(axes.end(), channel.outputs().begin(), channel.outputs().end());
  return JointPmf(std::move(axes), std::move(out));
}

}  // namespace action_rdc
