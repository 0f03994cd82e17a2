#pragma once

// Action models (source alphabet, actions, costs, action channel) and the
// result record shared by every rate evaluator.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/probcore.hpp"

namespace action_rdc {

/// Action channel p(y_1..y_K | x, a) with per-action costs.
class ActionModel {
 public:
  ActionModel(Alphabet source, CostFn cost, Channel channel)
      : source_(std::move(source)), cost_(std::move(cost)), channel_(std::move(channel)) {
    const auto& in = channel_.inputs();
    if (in.size() != 2) throw DomainError("action channel must have inputs (X, A)");
    if (!(in[0] == source_)) throw DomainError("action channel input 0 must be the source alphabet");
    if (!(in[1] == cost_.actions())) throw DomainError("action channel input 1 must be the action alphabet");
    const std::size_t nx = source_.size();
    const std::size_t na = actions().size();
    const auto& odims = channel_.output_dims();
    per_decoder_.resize(odims.size());
    for (std::size_t j = 0; j < odims.size(); ++j) {
      auto& w = per_decoder_[j];
      w.assign(nx * na * odims[j], 0.0);
      for (std::size_t r = 0; r < nx * na; ++r) {
        const auto m = marginalize(channel_.row(r), odims, {j});
        std::copy(m.begin(), m.end(), w.begin() + static_cast<std::ptrdiff_t>(r * odims[j]));
      }
    }
  }

  const Alphabet& source() const noexcept { return source_; }
  const Alphabet& actions() const noexcept { return cost_.actions(); }
  const CostFn& cost() const noexcept { return cost_; }
  const Channel& channel() const noexcept { return channel_; }
  std::size_t decoders() const noexcept { return per_decoder_.size(); }
  std::size_t side_info_size(std::size_t j) const { return channel_.output_dims().at(j); }
  const Alphabet& side_info(std::size_t j) const { return channel_.outputs().at(j); }

  /// p(y_j | x, a) laid out [x][a][y_j].
  std::span<const double> decoder_channel(std::size_t j) const { return per_decoder_.at(j); }
  double w(std::size_t j, std::size_t x, std::size_t a, std::size_t y) const {
    return per_decoder_[j][(x * actions().size() + a) * side_info_size(j) + y];
  }

 private:
  Alphabet source_;
  CostFn cost_;
  Channel channel_;
  std::vector<std::vector<double>> per_decoder_;
};

enum class Method { ClosedForm, Search, Evaluation };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::ClosedForm:
      return "closed-form";
    case Method::Search:
      return "search";
    case Method::Evaluation:
      return "evaluation";
  }
  return "unknown";
}

struct NamedTable {
  std::string name;
  ConditionalTable table;
};

/// A computed rate with the distributions that attain it. Search results are
/// achievable upper bounds on the optimum, not certified optima.
struct RatePoint {
  double rate = 0.0;
  std::optional<double> sum_rate;  // R1 + R2 for two-stage descriptions
  double cost = 0.0;
  std::vector<double> distortions;
  std::vector<NamedTable> achieving;
  std::map<std::string, double> details;
  Method method = Method::ClosedForm;
  std::size_t evals = 0;
  bool clamped = false;  // a negative formula value was raised to zero

  const ConditionalTable* table(std::string_view name) const {
    for (const auto& t : achieving) {
      if (t.name == name) return &t.table;
    }
    return nullptr;
  }
};

inline double clamp_rate(double r, RatePoint& p) {
  if (r < 0.0) {
    p.clamped = true;
    p.details["unclamped_rate"] = r;
    return 0.0;
  }
  return r;
}

/// Checks that the joint is over exactly two axes (X, Y).
inline void require_xy(const JointPmf& joint, std::string_view op) {
  if (joint.rank() != 2) throw DomainError(std::string(op) + ": joint must be over (X, Y)");
}

/// p(y|x) from p(x,y), rows [x][y]; rows with p(x)=0 are uniform.
inline std::vector<double> conditional_y_given_x(const JointPmf& joint) {
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  std::vector<double> w(nx * ny);
  const auto p = joint.probs();
  for (std::size_t x = 0; x < nx; ++x) {
    double m = 0.0;
    for (std::size_t y = 0; y < ny; ++y) m += p[x * ny + y];
    for (std::size_t y = 0; y < ny; ++y) {
      w[x * ny + y] = m > 0.0 ? p[x * ny + y] / m : 1.0 / static_cast<double>(ny);
    }
  }
  return w;
}

namespace detail {

inline Alphabet with_erasure(const Alphabet& y) {
  if (y.find(kErasureSymbol)) {
    throw DomainError("side-information alphabet already uses the erasure symbol 'e'");
  }
  return y.with_symbol(std::string(kErasureSymbol));
}

// Builds p(y_1..y_K | x, a) where for action a the set sees[a] of decoders
// observe Y and the others observe the erasure.
inline Channel switching_channel(const JointPmf& joint, const Alphabet& actions,
                                 const std::vector<std::vector<bool>>& sees) {
  const auto wyx = conditional_y_given_x(joint);
  const std::size_t nx = joint.dims()[0];
  const std::size_t ny = joint.dims()[1];
  const std::size_t na = actions.size();
  const std::size_t k = sees.front().size();
  const Alphabet yj = with_erasure(joint.axis(1));
  const std::size_t nyj = yj.size();
  std::size_t cols = 1;
  for (std::size_t j = 0; j < k; ++j) cols *= nyj;
  std::vector<double> table(nx * na * cols, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t y = 0; y < ny; ++y) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < k; ++j) col = col * nyj + (sees[a][j] ? y : ny);
        table[(x * na + a) * cols + col] += wyx[x * ny + y];
      }
    }
  }
  std::vector<Alphabet> outs(k, yj);
  return Channel({joint.axis(0), actions}, std::move(outs), std::move(table));
}

}  // namespace detail

/// Switching side information: action j lets decoder j observe Y; every
/// other decoder observes "e". Actions are labelled "1".."K".
inline ActionModel switching_model(const JointPmf& joint, std::size_t k, std::vector<double> costs = {}) {
  require_xy(joint, "switching_model");
  if (k < 1) throw DomainError("switching_model: K must be >= 1");
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= k; ++j) labels.push_back(std::to_string(j));
  Alphabet actions(labels);
  if (costs.empty()) costs.assign(k, 0.0);
  if (costs.size() != k) throw DomainError("switching_model: need one cost per action");
  std::vector<std::vector<bool>> sees(k, std::vector<bool>(k, false));
  for (std::size_t j = 0; j < k; ++j) sees[j][j] = true;
  auto ch = detail::switching_channel(joint, actions, sees);
  return ActionModel(joint.axis(0), CostFn(actions, std::move(costs)), std::move(ch));
}

/// Two decoders, actions "0".."3": 0 = nobody sees Y, 1 = decoder 1 only,
/// 2 = decoder 2 only, 3 = both.
inline ActionModel four_state_switching_model(const JointPmf& joint, std::array<double, 4> costs) {
  require_xy(joint, "four_state_switching_model");
  Alphabet actions({"0", "1", "2", "3"});
  std::vector<std::vector<bool>> sees = {{false, false}, {true, false}, {false, true}, {true, true}};
  auto ch = detail::switching_channel(joint, actions, sees);
  return ActionModel(joint.axis(0), CostFn(actions, {costs.begin(), costs.end()}), std::move(ch));
}

// --- fast evaluation on flat arrays ------------------------------------------

namespace detail {

inline TableView view_of(const ConditionalTable& t) { return TableView{t.data(), t.rows(), t.cols()}; }

// p(x, a) = p(x) p(a|x), laid out [x][a].
inline std::vector<double> joint_xa(std::span<const double> px, const TableView& pa_x) {
  std::vector<double> pxa(px.size() * pa_x.cols);
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t a = 0; a < pa_x.cols; ++a) pxa[x * pa_x.cols + a] = px[x] * pa_x(x, a);
  }
  return pxa;
}

// I(X;A) from p(x,a).
inline double info_xa(std::span<const double> pxa, std::size_t nx, std::size_t na) {
  const std::array<std::size_t, 2> dims{nx, na};
  return std::max(0.0, entropy_of(pxa, dims, {0}) + entropy_of(pxa, dims, {1}) - entropy_bits(pxa));
}

// H(X | Y_j, A) for decoder j of the model given p(x,a).
inline double cond_entropy_x_given_ya(const ActionModel& m, std::size_t j, std::span<const double> pxa) {
  const std::size_t nx = m.source().size();
  const std::size_t na = m.actions().size();
  const std::size_t ny = m.side_info_size(j);
  const auto w = m.decoder_channel(j);
  // H(X,A,Y) - H(A,Y), accumulated per (a, y).
  double h = 0.0;
  std::vector<double> col(nx);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      double tot = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        col[x] = pxa[x * na + a] * w[(x * na + a) * ny + y];
        tot += col[x];
      }
      if (tot <= 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x) {
        if (col[x] > 0.0) h -= col[x] * std::log2(col[x] / tot);
      }
    }
  }
  return std::max(0.0, h);
}

inline double expected_cost(const CostFn& cost, std::span<const double> pxa, std::size_t nx) {
  const std::size_t na = cost.size();
  double c = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      if (pxa[x * na + a] > 0.0) c += pxa[x * na + a] * cost(a);
    }
  }
  return c;
}

inline void require_feasible_budget(const CostFn& cost, double budget, std::string_view op) {
  if (std::isnan(budget)) throw DomainError(std::string(op) + ": budget is NaN");
  if (cost.min_cost() > budget + 1e-12) {
    throw InfeasibleError(std::string(op) + ": no action meets the cost budget " + std::to_string(budget));
  }
}

inline void require_source_matches(const Pmf& source, const ActionModel& model, std::string_view op) {
  if (!(source.alphabet() == model.source())) {
    throw DomainError(std::string(op) + ": source alphabet differs from the model's");
  }
}

}  // namespace detail

}  // namespace action_rdc
