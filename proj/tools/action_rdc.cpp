// action-rdc: config-driven rate-region runs, oracle suites and plot scripts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "action_rdc/cli/figures.hpp"
#include "action_rdc/cli/tasks.hpp"
#include "action_rdc/cli/verify.hpp"

namespace fs = std::filesystem;
using namespace action_rdc;
using namespace action_rdc::cli;

namespace {

std::string read_file(const fs::path& p, const std::string& key) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(key, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidDistribution& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& o) {
  json cfg;
  try {
    cfg = json::parse(read_file(config_path, "<config>"));
  } catch (const json::parse_error& e) {
    throw ConfigError("<config>", std::string("invalid JSON: ") + e.what());
  }
  cfg = unwrap_sidecar(std::move(cfg));
  apply_overrides(cfg, o);
  const auto out = run_config(cfg, fs::path(config_path).stem().string());
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto csv = dir / (out.stem + ".csv");
  const auto side = dir / (out.stem + ".json");
  fs::create_directories(csv.parent_path());
  write_file(csv, out.csv());
  write_file(side, out.sidecar.dump(2) + "\n");
  std::cout << csv.string() << "\n" << side.string() << "\n";
  if (out.sidecar.contains("report") && !out.sidecar["report"]["pass"].get<bool>()) return kExitCheckFailed;
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  const auto rep = run_verify(suite, seed);
  std::cout << rep.to_json().dump(2) << "\n";
  if (!rep.pass()) {
    for (const auto& c : rep.checks) {
      if (!c.pass()) std::cerr << "FAILED " << c.name << ": delta " << c.delta() << " > " << c.tolerance << "\n";
    }
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_figures(const std::string& csv_path) {
  const fs::path p(csv_path);
  const auto fig = figure_for(read_file(p, "csv"), p.filename().string());
  const auto stem = p.parent_path() / p.stem();
  const auto plot = fs::path(stem.string() + ".plot.json");
  const auto gp = fs::path(stem.string() + ".gp");
  write_file(plot, fig.plot.dump(2) + "\n");
  write_file(gp, fig.gnuplot);
  std::cout << plot.string() << "\n" << gp.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate regions for source coding with action-dependent side information"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> trials;
  auto* run = app.add_subcommand("run", "Evaluate a JSON config and write <output>.csv and <output>.json");
  run->add_option("config", config_path, "Config file (or a sidecar from an earlier run)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--grid-resolution", grid, "Override search.grid_resolution");
  run->add_option("--trials", trials, "Override params.trials");

  std::string suite;
  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "Run an oracle-equivalence suite; prints a JSON report");
  verify->add_option("suite", suite, "closed-form-vs-search | ba-vs-gridsearch | sim-vs-theory")->required();
  verify->add_option("--seed", verify_seed, "Seed");

  std::string csv_path;
  auto* figures = app.add_subcommand("figures", "Write <stem>.plot.json and <stem>.gp for a result CSV");
  figures->add_option("csv", csv_path, "Result CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*run) return guarded([&] { return cmd_run(config_path, out_dir, {seed, grid, trials}); });
  if (*verify) return guarded([&] { return cmd_verify(suite, verify_seed); });
  if (*figures) return guarded([&] { return cmd_figures(csv_path); });
  return kExitConfig;
}
