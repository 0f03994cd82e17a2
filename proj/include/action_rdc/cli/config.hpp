#pragma once

// JSON config access with key paths, so every error can name the offending key.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "action_rdc/error.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/model.hpp"

namespace action_rdc::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitBudget = 4;

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A config value plus the key path that reached it.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const noexcept { return *j_; }
  const std::string& path() const noexcept { return path_; }
  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key) && !(*j_)[key].is_null(); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!has(key)) throw ConfigError(child(key), "missing required key");
    return Node((*j_)[key], child(key));
  }
  Node at(std::size_t i) const {
    if (!j_->is_array() || i >= j_->size()) fail("index " + std::to_string(i) + " out of range");
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }
  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  /// Numbers, plus the strings "inf" / "-inf" for unbounded costs.
  double number() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      const auto s = j_->get<std::string>();
      if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail("expected a number");
  }
  double finite() const {
    const double v = number();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  std::size_t count() const {
    if (j_->is_number_unsigned()) return j_->get<std::size_t>();
    if (j_->is_number_integer() && j_->get<long long>() >= 0) return static_cast<std::size_t>(j_->get<long long>());
    fail("expected a nonnegative integer");
  }
  std::uint64_t seed() const {
    if (j_->is_number_unsigned() || (j_->is_number_integer() && j_->get<long long>() >= 0)) {
      return j_->get<std::uint64_t>();
    }
    fail("expected a nonnegative integer seed");
  }
  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  std::vector<double> numbers() const {
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back(at(i).number());
    return v;
  }
  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m;
    for (std::size_t i = 0; i < size(); ++i) m.push_back(at(i).numbers());
    return m;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  std::size_t count_or(const std::string& key, std::size_t fallback) const {
    return has(key) ? at(key).count() : fallback;
  }
  std::optional<std::size_t> optional_count(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return at(key).count();
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* j_;
  std::string path_;
};

/// Runs a constructor and re-labels validation failures with the config key.
template <class F>
auto at_key(const Node& n, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidDistribution& e) {
    throw ConfigError(n.path(), e.what());
  } catch (const DomainError& e) {
    throw ConfigError(n.path(), e.what());
  }
}

/// ["a","b"], [0,1] or a size n (symbols "0".."n-1").
inline Alphabet parse_alphabet(const Node& n) {
  if (n.raw().is_number()) return at_key(n, [&] { return Alphabet::range(n.count()); });
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto& v = n.at(i).raw();
    if (v.is_string()) {
      symbols.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      symbols.push_back(std::to_string(v.get<long long>()));
    } else {
      n.at(i).fail("alphabet symbols must be strings or integers");
    }
  }
  return at_key(n, [&] { return Alphabet(std::move(symbols)); });
}

inline std::vector<double> flatten_rows(const Node& n) {
  std::vector<double> out;
  for (const auto& row : n.matrix()) out.insert(out.end(), row.begin(), row.end());
  return out;
}

/// {"alphabet": [...], "probs": [...]}
inline Pmf parse_pmf(const Node& n) {
  const auto a = parse_alphabet(n.at("alphabet"));
  const auto p = n.at("probs");
  return at_key(p, [&] { return Pmf(a, p.numbers()); });
}

/// {"alphabets": [X, Y], "probs": [[p(x0,y0), ...], ...]} with one row per x.
inline JointPmf parse_joint(const Node& n) {
  const auto al = n.at("alphabets");
  if (al.size() != 2) al.fail("expected two alphabets (X, Y)");
  const auto ax = parse_alphabet(al.at(0));
  const auto ay = parse_alphabet(al.at(1));
  const auto p = n.at("probs");
  if (p.size() != ax.size()) p.fail("expected one row per X symbol");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.at(i).size() != ay.size()) p.at(i).fail("expected one entry per Y symbol");
  }
  return at_key(p, [&] { return JointPmf({ax, ay}, flatten_rows(p)); });
}

/// "hamming" or {"recon": [...], "table": [[d(x, xhat)]]}.
inline DistortionFn parse_distortion(const Node& n, const Alphabet& source) {
  if (n.raw().is_string()) {
    if (n.str() != "hamming") n.fail("unknown distortion '" + n.str() + "'");
    return DistortionFn::hamming(source);
  }
  const auto recon = parse_alphabet(n.at("recon"));
  const auto t = n.at("table");
  return at_key(t, [&] { return DistortionFn(source, recon, flatten_rows(t)); });
}

inline ConditionalTable parse_table(const Node& n) {
  const auto m = n.matrix();
  if (m.empty() || m.front().empty()) n.fail("table must be nonempty");
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i].size() != m.front().size()) n.at(i).fail("rows must have equal length");
  }
  return at_key(n, [&] { return ConditionalTable(m.size(), m.front().size(), flatten_rows(n)); });
}

template <std::size_t N>
std::array<double, N> parse_fixed(const Node& n) {
  const auto v = n.numbers();
  if (v.size() != N) n.fail("expected " + std::to_string(N) + " values");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

/// Action models, in one of three forms:
///   {"switching": {"joint": ..., "K": 2, "costs": [...]}}
///   {"four_state": {"joint": ..., "costs": [c0, c1, c2, c3]}}
///   {"source": X, "actions": A, "costs": [...], "outputs": [Y1, ...],
///    "channel": [[p(y1,...|x,a)] one row per (x, a), x major]}
inline ActionModel parse_action_model(const Node& n) {
  if (n.has("switching")) {
    const auto s = n.at("switching");
    const auto joint = parse_joint(s.at("joint"));
    const std::size_t k = s.count_or("K", 2);
    std::vector<double> costs = s.has("costs") ? s.at("costs").numbers() : std::vector<double>{};
    return at_key(s, [&] { return switching_model(joint, k, costs); });
  }
  if (n.has("four_state")) {
    const auto s = n.at("four_state");
    const auto joint = parse_joint(s.at("joint"));
    const auto costs = parse_fixed<4>(s.at("costs"));
    return at_key(s, [&] { return four_state_switching_model(joint, costs); });
  }
  const auto x = parse_alphabet(n.at("source"));
  const auto a = parse_alphabet(n.at("actions"));
  const auto c = n.at("costs");
  const auto cost = at_key(c, [&] { return CostFn(a, c.numbers()); });
  std::vector<Alphabet> outs;
  const auto o = n.at("outputs");
  for (std::size_t j = 0; j < o.size(); ++j) outs.push_back(parse_alphabet(o.at(j)));
  const auto ch = n.at("channel");
  auto channel = at_key(ch, [&] { return Channel({x, a}, outs, flatten_rows(ch)); });
  return at_key(n, [&] { return ActionModel(x, cost, std::move(channel)); });
}

/// {"grid_resolution", "refinement_rounds", "refinement_shrink", "tolerance", "max_evals"}
inline SearchConfig parse_search(const Node* n, std::uint64_t seed) {
  SearchConfig cfg;
  cfg.seed = seed;
  if (n) {
    cfg.grid_resolution = n->count_or("grid_resolution", cfg.grid_resolution);
    cfg.refinement_rounds = n->count_or("refinement_rounds", cfg.refinement_rounds);
    cfg.refinement_shrink = n->number_or("refinement_shrink", cfg.refinement_shrink);
    cfg.tolerance = n->number_or("tolerance", cfg.tolerance);
    cfg.max_evals = n->count_or("max_evals", cfg.max_evals);
    at_key(*n, [&] {
      cfg.validate();
      return 0;
    });
  }
  return cfg;
}

/// Either {"values": [...]} or {"start", "stop", "steps"} (both ends included).
inline std::vector<double> parse_range(const Node& n) {
  if (n.has("values")) {
    auto v = n.at("values").numbers();
    if (v.empty()) n.at("values").fail("must be nonempty");
    return v;
  }
  const double start = n.at("start").finite();
  const double stop = n.at("stop").finite();
  const std::size_t steps = n.at("steps").count();
  if (steps == 0) n.at("steps").fail("must be positive");
  if (steps == 1) return {start};
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  v.back() = stop;
  return v;
}

}  // namespace action_rdc::cli
