#pragma once

// Config-driven runs: evaluate a setting over its sweep and render the CSV
// table plus the JSON sidecar.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "action_rdc/cli/config.hpp"
#include "action_rdc/cli/settings.hpp"
#include "action_rdc/cli/verify.hpp"

namespace action_rdc::cli {

/// Shortest round-trip form, always with '.' as the decimal point.
inline std::string fmt(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt_seed(std::uint64_t v) { return std::to_string(v); }

inline json table_json(const ConditionalTable& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json point_json(const RatePoint& p) {
  json j;
  j["rate"] = p.rate;
  if (p.sum_rate) j["sum_rate"] = *p.sum_rate;
  j["cost"] = p.cost;
  j["distortions"] = p.distortions;
  j["method"] = method_name(p.method);
  j["evals"] = p.evals;
  j["clamped"] = p.clamped;
  j["details"] = p.details;
  json tables = json::object();
  for (const auto& t : p.achieving) tables[t.name] = table_json(t.table);
  j["achieving"] = std::move(tables);
  return j;
}

inline json sim_json(const SimReport& r) {
  json j;
  j["scheme"] = r.scheme;
  j["n"] = r.n;
  j["trials"] = r.trials;
  j["rate"] = r.rate;
  j["block_errors"] = r.block_errors;
  j["error_rate"] = r.error_rate;
  j["distortion"] = r.distortion;
  j["cost"] = r.cost;
  j["seed"] = r.seed;
  j["details"] = r.details;
  return j;
}

struct RunOutput {
  std::string stem;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json sidecar;

  std::string csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
  }
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_resolution;
  std::optional<std::size_t> trials;
};

/// Folds command-line overrides into the config so the sidecar echoes what ran.
inline void apply_overrides(json& cfg, const Overrides& o) {
  if (!cfg.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.grid_resolution) cfg["search"]["grid_resolution"] = *o.grid_resolution;
  if (o.trials) cfg["params"]["trials"] = *o.trials;
}

/// A sidecar from an earlier run carries the config it ran with.
inline json unwrap_sidecar(json j) {
  if (j.is_object() && j.contains("config") && j.contains("columns")) return j["config"];
  return j;
}

namespace detail {

struct SweepVar {
  std::string name;
  std::vector<double> values;
};

inline std::vector<SweepVar> parse_sweep(const Node& root) {
  std::vector<SweepVar> vars;
  if (!root.has("sweep")) return vars;
  const auto s = root.at("sweep");
  auto one_var = [&](const Node& n) { vars.push_back({n.at("variable").str(), parse_range(n)}); };
  if (s.raw().is_array()) {
    for (std::size_t i = 0; i < s.size(); ++i) one_var(s.at(i));
  } else {
    one_var(s);
  }
  return vars;
}

/// Cartesian product, first variable outermost.
inline std::vector<std::vector<double>> sweep_points(const std::vector<SweepVar>& vars) {
  std::vector<std::vector<double>> pts{{}};
  for (const auto& v : vars) {
    std::vector<std::vector<double>> next;
    for (const auto& p : pts) {
      for (double x : v.values) {
        auto q = p;
        q.push_back(x);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return pts;
}

inline void require_vars(const Node& root, const std::vector<SweepVar>& vars, std::vector<std::string> names) {
  if (vars.size() != names.size()) {
    throw ConfigError("sweep", "expected " + std::to_string(names.size()) + " sweep variable(s)");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (vars[i].name != names[i]) throw ConfigError("sweep", "expected variable '" + names[i] + "'");
  }
  (void)root;
}

// Library validation failures inside an evaluation are config errors on "params".
template <class F>
auto evaluate(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidDistribution& e) {
    throw ConfigError("params", what + e.what());
  } catch (const DomainError& e) {
    throw ConfigError("params", what + e.what());
  }
}

inline std::string point_label(const std::vector<SweepVar>& vars, const std::vector<double>& at) {
  if (vars.empty()) return "";
  std::string s = "at";
  for (std::size_t i = 0; i < vars.size(); ++i) s += " " + vars[i].name + "=" + fmt(at[i]);
  return s + ": ";
}

// Sweep columns that clash with a result column get a "param_" prefix.
inline void push_sweep_columns(const std::vector<SweepVar>& vars, const std::vector<std::string>& taken,
                               std::vector<std::string>& columns) {
  for (const auto& v : vars) {
    const bool clash = std::find(taken.begin(), taken.end(), v.name) != taken.end();
    columns.push_back(clash ? "param_" + v.name : v.name);
  }
}

inline json params_at(const json& params, const std::vector<SweepVar>& vars, const std::vector<double>& at) {
  json p = params.is_null() ? json::object() : params;
  for (std::size_t i = 0; i < vars.size(); ++i) p[vars[i].name] = at[i];
  return p;
}

inline void run_example1_curve(const Node& root, const std::vector<SweepVar>& vars, const SearchConfig& cfg,
                               std::uint64_t seed, RunOutput& out) {
  require_vars(root, vars, {"budget"});
  const auto rows = evaluate("", [&] { return example1_curve(vars[0].values, cfg); });
  out.columns = {"C", "R_opt", "R_indep", "p1_opt", "delta_opt", "method", "evals", "seed"};
  for (const auto& r : rows) {
    out.rows.push_back({fmt(r.budget), fmt(r.rate_opt), fmt(r.rate_indep), fmt(r.p1_opt), fmt(r.delta_opt), "search",
                        fmt(r.evals), fmt_seed(seed)});
    json j;
    j["budget"] = r.budget;
    j["p1_indep"] = r.p1_indep;
    j["achieving"]["p(a|x)"] = table_json(example1_action_table(r.p1_opt, r.delta_opt));
    out.sidecar["points"].push_back(std::move(j));
  }
}

inline void run_example2_surface(const Node& root, const std::vector<SweepVar>& vars, std::uint64_t seed,
                                 RunOutput& out) {
  require_vars(root, vars, {"D1", "D2"});
  const auto rows = evaluate("", [&] { return example2_surface(vars[0].values, vars[1].values); });
  out.columns = {"D1", "D2", "R", "alpha", "method", "evals", "seed"};
  for (const auto& r : rows) {
    out.rows.push_back({fmt(r.d1), fmt(r.d2), fmt(r.rate), fmt(r.alpha), "closed-form", "0", fmt_seed(seed)});
    out.sidecar["points"].push_back({{"D1", r.d1}, {"D2", r.d2}, {"alpha", r.alpha}});
  }
}

inline void run_region(const Node& root, const std::string& setting, const std::vector<SweepVar>& vars,
                       const SearchConfig& cfg, std::uint64_t seed, RunOutput& out) {
  const auto it = region_settings().find(setting);
  if (it == region_settings().end()) throw ConfigError("setting", "unknown region setting '" + setting + "'");
  const json params = root.has("params") ? root.at("params").raw() : json::object();
  struct Hit {
    std::vector<double> at;
    RatePoint p;
  };
  std::vector<Hit> hits;
  for (const auto& at : sweep_points(vars)) {
    const json p = params_at(params, vars, at);
    const auto pts = evaluate(point_label(vars, at), [&] { return it->second(Node(p, "params"), cfg); });
    for (const auto& r : pts) hits.push_back({at, r});
  }
  std::size_t nd = 0;
  for (const auto& h : hits) nd = std::max(nd, h.p.distortions.size());
  push_sweep_columns(vars, {"rate", "sum_rate", "cost", "clamped", "method", "evals", "seed"}, out.columns);
  for (const char* c : {"rate", "sum_rate", "cost"}) out.columns.push_back(c);
  for (std::size_t j = 0; j < nd; ++j) out.columns.push_back("distortion_" + std::to_string(j + 1));
  for (const char* c : {"clamped", "method", "evals", "seed"}) out.columns.push_back(c);
  for (const auto& h : hits) {
    std::vector<std::string> row;
    for (double x : h.at) row.push_back(fmt(x));
    row.push_back(fmt(h.p.rate));
    row.push_back(h.p.sum_rate ? fmt(*h.p.sum_rate) : "");
    row.push_back(fmt(h.p.cost));
    for (std::size_t j = 0; j < nd; ++j) row.push_back(j < h.p.distortions.size() ? fmt(h.p.distortions[j]) : "");
    row.push_back(h.p.clamped ? "1" : "0");
    row.push_back(method_name(h.p.method));
    row.push_back(fmt(h.p.evals));
    row.push_back(fmt_seed(seed));
    out.rows.push_back(std::move(row));
    auto j = point_json(h.p);
    for (std::size_t i = 0; i < vars.size(); ++i) j["sweep"][vars[i].name] = h.at[i];
    out.sidecar["points"].push_back(std::move(j));
  }
}

inline void run_simulate(const Node& root, const std::string& setting, const std::vector<SweepVar>& vars,
                         std::uint64_t seed, RunOutput& out) {
  const auto it = sim_settings().find(setting);
  if (it == sim_settings().end()) throw ConfigError("setting", "unknown simulation setting '" + setting + "'");
  const json params = root.has("params") ? root.at("params").raw() : json::object();
  std::vector<std::pair<std::vector<double>, SimReport>> hits;
  for (const auto& at : sweep_points(vars)) {
    json p = params_at(params, vars, at);
    // Integer parameters such as n arrive from the sweep as doubles.
    for (const auto& v : vars) {
      const double x = p[v.name].get<double>();
      if (x >= 0.0 && x == std::floor(x)) p[v.name] = static_cast<std::uint64_t>(x);
    }
    hits.emplace_back(at, evaluate(point_label(vars, at), [&] { return it->second(Node(p, "params"), seed); }));
  }
  std::size_t nd = 0;
  for (const auto& h : hits) nd = std::max(nd, h.second.distortion.size());
  const std::vector<std::string> fixed = {"scheme", "n", "trials", "rate", "block_errors", "error_rate", "cost",
                                          "seed"};
  push_sweep_columns(vars, fixed, out.columns);
  out.columns.insert(out.columns.end(), fixed.begin(), fixed.end() - 1);
  for (std::size_t j = 0; j < nd; ++j) out.columns.push_back("distortion_" + std::to_string(j + 1));
  out.columns.push_back("seed");
  double wall = 0.0;
  for (const auto& [at, r] : hits) {
    std::vector<std::string> row;
    for (double x : at) row.push_back(fmt(x));
    row.insert(row.end(), {r.scheme, fmt(r.n), fmt(r.trials), fmt(r.rate), fmt(r.block_errors), fmt(r.error_rate),
                           fmt(r.cost)});
    for (std::size_t j = 0; j < nd; ++j) row.push_back(j < r.distortion.size() ? fmt(r.distortion[j]) : "");
    row.push_back(fmt_seed(r.seed));
    out.rows.push_back(std::move(row));
    out.sidecar["points"].push_back(sim_json(r));
    wall += r.wall_seconds;
  }
  out.sidecar["simulation_seconds"] = wall;
}

}  // namespace detail

/// Runs a region, curve, surface or simulate config. Nothing is written here;
/// a failure leaves no partial output behind.
inline RunOutput run_config(const json& cfg, const std::string& default_stem) {
  const Node root(cfg, "");
  if (!cfg.is_object()) root.fail("config must be a JSON object");
  const auto t0 = std::chrono::steady_clock::now();
  const std::string task = root.at("task").str();
  const std::string setting = root.at("setting").str();
  const std::uint64_t seed = root.has("seed") ? root.at("seed").seed() : 0;
  std::optional<Node> search;
  if (root.has("search")) search = root.at("search");
  const SearchConfig scfg = parse_search(search ? &*search : nullptr, seed);
  const auto vars = detail::parse_sweep(root);

  RunOutput out;
  out.stem = root.has("output") ? root.at("output").str() : default_stem;
  if (out.stem.empty()) root.at("output").fail("must be nonempty");
  out.sidecar["config"] = cfg;
  out.sidecar["points"] = json::array();

  if (task == "curve") {
    if (vars.size() != 1) throw ConfigError("sweep", "a curve needs exactly one sweep variable");
    if (setting == "example1_curve") {
      detail::run_example1_curve(root, vars, scfg, seed, out);
    } else {
      detail::run_region(root, setting, vars, scfg, seed, out);
    }
  } else if (task == "surface") {
    if (vars.size() != 2) throw ConfigError("sweep", "a surface needs exactly two sweep variables");
    if (setting == "example2_surface") {
      detail::run_example2_surface(root, vars, seed, out);
    } else {
      detail::run_region(root, setting, vars, scfg, seed, out);
    }
  } else if (task == "region") {
    detail::run_region(root, setting, vars, scfg, seed, out);
  } else if (task == "simulate") {
    detail::run_simulate(root, setting, vars, seed, out);
  } else if (task == "verify") {
    const auto rep = run_verify(setting, seed);
    out.columns = {"check", "value", "reference", "delta", "tolerance", "pass"};
    for (const auto& c : rep.checks) {
      out.rows.push_back({c.name, fmt(c.value), fmt(c.reference), fmt(c.delta()), fmt(c.tolerance), c.pass() ? "1" : "0"});
    }
    out.sidecar["report"] = rep.to_json();
  } else {
    root.at("task").fail("unknown task '" + task + "' (expected region, curve, surface, simulate or verify)");
  }
  out.sidecar["columns"] = out.columns;
  out.sidecar["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace action_rdc::cli
