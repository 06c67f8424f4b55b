// Copyright 2026 The dualrail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "dualrail/cli.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualrail/config.h"

using namespace dualrail;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dualrail");
  std::ostringstream out, err;
  int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  fs::path d = fs::path(::testing::TempDir()) / ("dualrail_cli_" + name);
  fs::remove_all(d);
  return d.string();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(p);
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
  Invocation r = cli({});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_NE(r.err.find("leaksweep"), std::string::npos);
}

TEST(Cli, Help) {
  Invocation r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--threads"), std::string::npos);
}

TEST(Cli, ReferenceBudget) {
  std::string dir = fresh_dir("budget");
  Invocation r = cli({"--out", dir, "budget"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("total accounted (2 significant figures): 4.9e-04"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("81.3%"), std::string::npos);
  auto rows = read_csv(fs::path(dir) / "budget.csv");
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[6][0], "total");
  EXPECT_NEAR(std::stod(rows[6][2]), 4.88e-4, 1e-18);
}

TEST(Cli, BudgetFromConfig) {
  std::string dir = fresh_dir("budget_cfg");
  Invocation r = cli({"--out", dir, "--set", "p1=2.8e-4", "--set", "p_phi=8e-5", "--set", "t_phi_logical=1490us", "budget",
               "--from-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = read_csv(fs::path(dir) / "budget.csv");
  double expect = 496e-9 / (3 * 2176e-6) + 496e-9 / (3 * 1490e-6) + 2 * 9e-5 + 2.8e-4 / 3 + 8e-5 / 3;
  EXPECT_NEAR(std::stod(rows[6][2]), expect, 1e-15);
}

TEST(Cli, DetuningSweepMinimumMatchesClosedForm) {
  std::string dir = fresh_dir("disp");
  Invocation r = cli({"--out", dir, "--set", "chi_dr=-20kHz", "dispersive", "--sweep-detuning", "--snr", "11.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = read_csv(fs::path(dir) / "dispersive_sweep.csv");
  ASSERT_EQ(rows.size(), 2002u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"detuning_hz", "photon_ratio", "dephasing_error"}));
  size_t best = 1;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][2]) < std::stod(rows[best][2])) best = i;
  }
  // Independent closed form at chi = -4.25 MHz, kappa = 12.4 MHz, eta = 0.125.
  double chi = -4.25e6, k = 12.4e6, x = 2 * std::abs(chi) / k;
  double opt = -std::hypot(k / 2, chi);
  double err = 11.6 / (12 * 0.125) * std::pow(20e3 / 4.25e6, 2) * std::pow(std::sqrt(1 + x * x) - x, 2);
  double step = 20 * k / 2000;
  EXPECT_LE(std::abs(std::stod(rows[best][0]) - opt), step);
  EXPECT_GE(std::stod(rows[best][2]), err * (1 - 1e-12));
  EXPECT_NEAR(std::stod(rows[best][2]), err, 1e-4 * err);
  EXPECT_NEAR(std::stod(rows[1][0]), -10 * k, 1e-3);
  EXPECT_NEAR(std::stod(rows.back()[0]), 10 * k, 1e-3);

  auto j = nlohmann::json::parse(slurp(fs::path(dir) / "summary.json"));
  EXPECT_NEAR(j["min_dephasing_error"].get<double>(), err, 1e-12 * err);
  EXPECT_NEAR(j["optimal_detuning_hz"].get<double>(), opt, 1e-6);
}

TEST(Cli, ManifestAndEnvironment) {
  std::string dir = fresh_dir("env");
  setenv(kOutputDirEnv, dir.c_str(), 1);
  setenv(kTimestampEnv, "2020-01-01T00:00:00Z", 1);
  Invocation r = cli({"--seed", "42", "terasure", "--shots", "200"});
  unsetenv(kOutputDirEnv);
  unsetenv(kTimestampEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = nlohmann::json::parse(slurp(fs::path(dir) / "manifest.json"));
  EXPECT_EQ(m["command"], "terasure");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["output_dir"], dir);
  EXPECT_EQ(m["timestamp"], "2020-01-01T00:00:00Z");
  EXPECT_EQ(m["tool_version"], kToolVersion);
  ExperimentConfig c = load_config((fs::path(dir) / "config.txt").string());
  EXPECT_EQ(c.shots_per_point, 200);
  EXPECT_EQ(c.seed, 42u);
  auto s = nlohmann::json::parse(slurp(fs::path(dir) / "summary.json"));
  EXPECT_TRUE(s["derived"]["lifetime_ratio"].contains("value"));
  EXPECT_TRUE(s["derived"]["lifetime_ratio"].contains("sigma"));
}

TEST(Cli, OutputsReproducibleAcrossThreads) {
  std::string a = fresh_dir("rep_a"), b = fresh_dir("rep_b");
  ASSERT_EQ(cli({"--out", a, "--shots", "400", "--threads", "1", "ilrb"}).code, 0);
  ASSERT_EQ(cli({"--out", b, "--shots", "400", "--threads", "3", "ilrb"}).code, 0);
  for (const char* f : {"curves.csv", "fits.csv", "summary.json"}) {
    EXPECT_EQ(slurp(fs::path(a) / f), slurp(fs::path(b) / f)) << f;
    EXPECT_FALSE(slurp(fs::path(a) / f).empty()) << f;
  }
}

TEST(Cli, FlagsOverrideConfigFile) {
  std::string dir = fresh_dir("override");
  fs::create_directories(dir);
  std::string cfg = (fs::path(dir) / "run.cfg").string();
  std::ofstream(cfg) << "seed = 5\nshots_per_point = 100\nreadout_degradation = 3\n";
  Invocation r = cli({"--config", cfg, "--seed", "9", "--out", dir, "terasure"});
  ASSERT_EQ(r.code, 0) << r.err;
  ExperimentConfig c = load_config((fs::path(dir) / "config.txt").string());
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.shots_per_point, 100);
  EXPECT_EQ(c.params.readout_degradation, 3.0);
  auto m = nlohmann::json::parse(slurp(fs::path(dir) / "manifest.json"));
  EXPECT_EQ(m["config_path"], cfg);
}

TEST(Cli, DistinctErrors) {
  std::string dir = fresh_dir("errors");
  Invocation unknown_flag = cli({"--out", dir, "--bogus", "ilrb"});
  EXPECT_EQ(unknown_flag.code, 1);
  EXPECT_NE(unknown_flag.err.find("--bogus"), std::string::npos);

  Invocation unknown_key = cli({"--out", dir, "--set", "kapa=1", "ilrb"});
  EXPECT_EQ(unknown_key.code, 2);
  EXPECT_NE(unknown_key.err.find("unknown key 'kapa'"), std::string::npos);

  Invocation missing = cli({"--out", dir, "--set", "chi=", "ilrb"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("'chi' has no value"), std::string::npos);

  Invocation invalid = cli({"--out", dir, "--set", "eta_eff=2", "ilrb"});
  EXPECT_EQ(invalid.code, 2);
  EXPECT_NE(invalid.err.find("eta_eff"), std::string::npos);

  Invocation no_file = cli({"--config", "/nonexistent/x.cfg", "ilrb"});
  EXPECT_EQ(no_file.code, 2);
  EXPECT_NE(no_file.err.find("cannot read"), std::string::npos);

  Invocation bad_pair = cli({"--out", dir, "--set", "chi", "ilrb"});
  EXPECT_EQ(bad_pair.code, 2);
  EXPECT_NE(bad_pair.err.find("key=value"), std::string::npos);

  Invocation no_sub = cli({"--seed", "3"});
  EXPECT_EQ(no_sub.code, 1);
  // Nothing is written when the configuration is rejected.
  EXPECT_FALSE(fs::exists(fs::path(dir) / "manifest.json"));
}

TEST(Cli, TooFewSurvivorsIsAnExperimentError) {
  std::string dir = fresh_dir("fail");
  Invocation r = cli({"--out", dir, "--shots", "150", "ilrb"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("experiment failed"), std::string::npos);
  // The manifest precedes any result.
  EXPECT_TRUE(fs::exists(fs::path(dir) / "manifest.json"));
  EXPECT_FALSE(fs::exists(fs::path(dir) / "summary.json"));
}

TEST(Cli, Sweep) {
  std::string dir = fresh_dir("sweep");
  Invocation r = cli({"--out", dir, "--shots", "300", "sweep", "--experiment", "t_erasure_compare", "--key",
               "readout_degradation", "--values", "1,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = read_csv(fs::path(dir) / "sweep.csv");
  ASSERT_GE(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"key", "value", "quantity", "estimate", "sigma"}));
  double r1 = 0, r2 = 0;
  for (const auto& row : rows) {
    if (row[2] != "lifetime_ratio") continue;
    (row[1] == "1" ? r1 : r2) = std::stod(row[3]);
  }
  EXPECT_GT(r1, r2 * 1.5);
  EXPECT_EQ(cli({"--out", dir, "sweep", "--experiment", "nope", "--key", "chi", "--values", "1"}).code, 2);
}

TEST(Cli, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Cli, CurveAndFitSchemas) {
  ExperimentResult r;
  r.curves["a,b"] = {{1, 2}, {0.5, 0.25}, {0.1, 0.05}};
  std::string csv = curves_csv(r);
  EXPECT_EQ(csv, "curve,x,y,yerr\n\"a,b\",1,0.5,0.10000000000000001\n\"a,b\",2,0.25,0.050000000000000003\n");
  EXPECT_EQ(fits_csv(r), "fit,parameter,value,sigma,chi2,dof,converged,flags\n");
  RunManifest m;
  m.command = "x";
  r.derived["q"] = {1.5, 0.25};
  auto j = nlohmann::json::parse(summary_json(r, m));
  EXPECT_EQ(j["derived"]["q"]["value"], 1.5);
  EXPECT_EQ(j["derived"]["q"]["sigma"], 0.25);
}
