#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "action_rdc/cli/figures.hpp"
#include "action_rdc/cli/tasks.hpp"
#include "action_rdc/cli/verify.hpp"

using namespace action_rdc;
using namespace action_rdc::cli;
namespace fs = std::filesystem;

namespace {

json load(const std::string& name) {
  std::ifstream in(fs::path(ACTION_RDC_CONFIG_DIR) / name);
  return json::parse(in);
}

json switching_params(double budget) {
  return {{"model",
           {{"switching",
             {{"joint", {{"alphabets", json::array({json::array({"0", "1"}), json::array({"0", "1"})})}, {"probs", {{0.5, 0.0}, {0.1, 0.4}}}}},
              {"K", 2},
              {"costs", {1, 2}}}}}},
          {"budget", budget}};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("action_rdc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const json& j) const {
    const auto p = path_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

 private:
  fs::path path_;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ACTION_RDC_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

}  // namespace

TEST(RunConfig, CurveColumnsAndEndpoints) {
  const auto out = run_config(load("example1_curve.json"), "x");
  EXPECT_EQ(out.stem, "example1_curve");
  const std::vector<std::string> cols{"C", "R_opt", "R_indep", "p1_opt", "delta_opt", "method", "evals", "seed"};
  EXPECT_EQ(out.columns, cols);
  ASSERT_EQ(out.rows.size(), 26u);
  EXPECT_EQ(out.rows.front()[0], "0");
  EXPECT_EQ(out.rows.front()[1], "1");
  EXPECT_EQ(out.rows.back()[0], "0.5");
}

TEST(RunConfig, SurfaceAnchors) {
  const auto out = run_config(load("example2_surface.json"), "x");
  ASSERT_EQ(out.rows.size(), 121u);
  EXPECT_EQ(out.columns[2], "R");
  EXPECT_EQ(out.rows.front()[2], "0.5");
  for (const auto& r : out.rows) {
    if (r[0] == "0.5" || r[1] == "0.5") {
      EXPECT_EQ(r[2], "0");
    }
  }
}

TEST(RunConfig, MalformedPmfNamesItsKey) {
  try {
    run_config(load("bad_pmf.json"), "x");
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "params.joint.probs");
  }
}

TEST(RunConfig, UnknownTaskAndSettingAreConfigErrors) {
  json cfg = load("example1_curve.json");
  cfg["task"] = "paint";
  EXPECT_THROW(run_config(cfg, "x"), ConfigError);
  cfg = {{"task", "region"}, {"setting", "nope"}};
  EXPECT_THROW(run_config(cfg, "x"), ConfigError);
}

TEST(RunConfig, SidecarReproducesTheCsv) {
  const auto first = run_config(load("switching_budget_sweep.json"), "x");
  const auto again = run_config(unwrap_sidecar(json::parse(first.sidecar.dump())), "x");
  EXPECT_EQ(first.csv(), again.csv());
  EXPECT_EQ(first.sidecar["points"].size(), first.rows.size());
}

TEST(RunConfig, CollidingSweepColumnsArePrefixed) {
  const auto out = run_config(load("dsbs_simulation.json"), "x");
  EXPECT_EQ(out.columns.front(), "param_n");
  EXPECT_NE(std::find(out.columns.begin(), out.columns.end(), "n"), out.columns.end());
}

TEST(Figures, RateVersusCostHasDashedBaseline) {
  const auto out = run_config(load("example1_curve.json"), "x");
  const auto f = figure_for(out.csv(), "example1_curve.csv");
  ASSERT_EQ(f.plot["series"].size(), 2u);
  EXPECT_EQ(f.plot["series"][1]["column"], "R_indep");
  EXPECT_EQ(f.plot["series"][1]["style"], "dashed");
  EXPECT_NE(f.gnuplot.find("dt 2"), std::string::npos);
}

TEST(Figures, EmptyCsvIsRejected) {
  EXPECT_THROW(figure_for("", "empty.csv"), ConfigError);
  EXPECT_THROW(figure_for("a,b\n", "nocols.csv"), ConfigError);
}

TEST(Verify, UnknownSuite) { EXPECT_THROW(run_verify("nope", 0), ConfigError); }

TEST(ExitCodes, ConfigErrorWritesNothing) {
  TempDir d;
  EXPECT_EQ(run_cli("run \"" + (fs::path(ACTION_RDC_CONFIG_DIR) / "bad_pmf.json").string() + "\" --out \"" +
                d.path().string() + "\""),
            kExitConfig);
  EXPECT_FALSE(fs::exists(d.path() / "bad_pmf.csv"));
  EXPECT_FALSE(fs::exists(d.path() / "bad_pmf.json"));
  EXPECT_EQ(run_cli("run --no-such-flag"), kExitConfig);
  EXPECT_EQ(run_cli("verify no_such_suite"), kExitConfig);
}

TEST(ExitCodes, InfeasibleBudget) {
  TempDir d;
  const auto cfg = d.write("c.json", {{"task", "region"}, {"setting", "thm1_lossless_decoder_actions"},
                                      {"params", switching_params(0.5)}, {"output", "c"}});
  EXPECT_EQ(run_cli("run \"" + cfg.string() + "\" --out \"" + d.path().string() + "\""), kExitInfeasible);
  EXPECT_FALSE(fs::exists(d.path() / "c.csv"));
}

TEST(ExitCodes, ComputeBudgetExhausted) {
  TempDir d;
  const auto cfg = d.write("c.json", {{"task", "simulate"},
                                      {"setting", "simulate_dsbs_compdel"},
                                      {"params", {{"p", 0.25}, {"rate", 0.9}, {"n", 64}, {"trials", 1}}},
                                      {"output", "c"}});
  EXPECT_EQ(run_cli("run \"" + cfg.string() + "\" --out \"" + d.path().string() + "\""), kExitBudget);
}

TEST(ExitCodes, SuccessfulRunWritesBothFiles) {
  TempDir d;
  const auto cfg = d.write("c.json", {{"task", "region"}, {"setting", "thm1_lossless_decoder_actions"},
                                      {"params", switching_params(1.5)}, {"output", "ok"}});
  EXPECT_EQ(run_cli("run \"" + cfg.string() + "\" --out \"" + d.path().string() + "\""), kExitOk);
  EXPECT_TRUE(fs::exists(d.path() / "ok.csv"));
  EXPECT_TRUE(fs::exists(d.path() / "ok.json"));
  // A single unswept point has no axis to plot against.
  EXPECT_EQ(run_cli("figures \"" + (d.path() / "ok.csv").string() + "\""), kExitConfig);
  EXPECT_FALSE(fs::exists(d.path() / "ok.gp"));
  const auto swept = (fs::path(ACTION_RDC_CONFIG_DIR) / "switching_budget_sweep.json").string();
  ASSERT_EQ(run_cli("run \"" + swept + "\" --out \"" + d.path().string() + "\""), kExitOk);
  EXPECT_EQ(run_cli("figures \"" + (d.path() / "switching_budget_sweep.csv").string() + "\""), kExitOk);
  EXPECT_TRUE(fs::exists(d.path() / "switching_budget_sweep.gp"));
  EXPECT_TRUE(fs::exists(d.path() / "switching_budget_sweep.plot.json"));
}
