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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "dualrail/channel.h"
#include "dualrail/config.h"
#include "dualrail/dispersive.h"

namespace dualrail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

// Options shared by every subcommand.
struct Globals {
  std::optional<uint64_t> seed;
  std::optional<int> shots;
  std::optional<int> threads;
  std::string config;
  std::string out;
  std::vector<std::string> sets;
};

ExperimentConfig resolve(const Globals& g, ExperimentConfig base) {
  if (!g.config.empty()) base = load_config(g.config, base);
  for (const auto& kv : g.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(base, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) base.seed = *g.seed;
  if (g.shots) base.shots_per_point = *g.shots;
  if (g.threads) base.threads = *g.threads;
  return base;
}

// Writes the manifest and the effective config; returns the run directory.
fs::path start_run(const std::string& command, const Globals& g, const ExperimentConfig& c, std::ostream& out) {
  RunManifest m;
  m.command = command;
  m.config_path = g.config;
  m.seed = c.seed;
  m.output_dir = g.out.empty() ? env_or(kOutputDirEnv, "dualrail_out") : g.out;
  m.timestamp = env_or(kTimestampEnv, now_utc());
  fs::path dir(m.output_dir);
  fs::create_directories(dir);
  write_file(dir / "manifest.json", manifest_json(m));
  write_file(dir / "config.txt", serialize_config(c));
  out << "output: " << dir.string() << "\n";
  return dir;
}

void print_result(const ExperimentResult& r, std::ostream& out) {
  for (const auto& [k, e] : r.derived) {
    out << k << " = " << short_num(e.value);
    if (e.sigma > 0) out << " +/- " << short_num(e.sigma);
    out << "\n";
  }
  for (const auto& d : r.diagnostics) out << "note: " << d << "\n";
}

void write_result(const fs::path& dir, const ExperimentResult& r, const RunManifest& m) {
  write_file(dir / "curves.csv", curves_csv(r));
  write_file(dir / "fits.csv", fits_csv(r));
  write_file(dir / "summary.json", summary_json(r, m));
}

RunManifest manifest_for(const std::string& command, const Globals& g, const ExperimentConfig& c,
                         const fs::path& dir) {
  RunManifest m;
  m.command = command;
  m.config_path = g.config;
  m.seed = c.seed;
  m.output_dir = dir.string();
  return m;
}

int run_kind(const std::string& command, ExperimentKind kind, const Globals& g, std::ostream& out,
             ExperimentResult (*runner)(const ExperimentConfig&)) {
  ExperimentConfig c = resolve(g, default_config(kind));
  c.experiment = kind;
  require_valid(c);
  fs::path dir = start_run(command, g, c, out);
  ExperimentResult r = runner(c);
  write_result(dir, r, manifest_for(command, g, c, dir));
  print_result(r, out);
  return 0;
}

int run_dispersive(const Globals& g, bool sweep, double snr, int points, std::ostream& out) {
  ExperimentConfig c = resolve(g, ExperimentConfig{});
  require_valid(c.params);
  if (points < 3) throw ValidationError("--points: must be at least 3");
  const SystemParams& p = c.params;
  MinDephasing m = min_dephasing_error(snr, p);
  NumericOptimum n = optimize_detuning_numeric(snr, p);
  fs::path dir = start_run("dispersive", g, c, out);

  json j;
  j["command"] = "dispersive";
  j["snr"] = snr;
  j["kappa_hz"] = analytic_kappa(p) / kTwoPi;
  j["separation_error"] = separation_error(snr);
  j["optimal_detuning_hz"] = m.optimal_detuning / kTwoPi;
  j["ratio_factor"] = m.ratio_factor;
  j["min_dephasing_error"] = m.error;
  j["asymptotic_dephasing_error"] = m.asymptotic_error;
  j["numeric_detuning_hz"] = n.detuning / kTwoPi;
  j["numeric_dephasing_error"] = n.error;
  j["dephasing_error_at_drive"] = induced_dephasing_error(snr, p);
  write_file(dir / "summary.json", j.dump(2) + "\n");

  if (sweep) {
    double k = analytic_kappa(p);
    std::ostringstream csv;
    csv << "detuning_hz,photon_ratio,dephasing_error\n";
    SystemParams q = p;
    for (int i = 0; i < points; ++i) {
      q.drive_detuning = -10 * k + 20 * k * i / (points - 1);
      csv << num(q.drive_detuning / kTwoPi) << "," << num(photon_ratio(q)) << ","
          << num(induced_dephasing_error(snr, q)) << "\n";
    }
    write_file(dir / "dispersive_sweep.csv", csv.str());
  }
  out << "separation_error = " << short_num(separation_error(snr)) << "\n"
      << "optimal_detuning_hz = " << short_num(m.optimal_detuning / kTwoPi) << "\n"
      << "min_dephasing_error = " << short_num(m.error) << "\n"
      << "asymptotic_dephasing_error = " << short_num(m.asymptotic_error) << "\n";
  return 0;
}

int run_budget(const Globals& g, bool from_config, double measured, std::ostream& out) {
  ExperimentConfig c = resolve(g, ExperimentConfig{});
  std::vector<BudgetEntry> rows;
  if (from_config) {
    require_valid(c.params);
    require_valid(c.injected);
    rows = standard_budget_components(kCheckProbe + kCheckRingdown, c.params.t1_logical, c.params.t_phi_logical,
                                      c.params.x90_error, c.injected);
  } else {
    // Reference per-check rows of the device error budget.
    rows = {{"idle T1", "T_m/3T1", 7.7e-5},
            {"idle dephasing", "T_m/3T_phi", 1.11e-4},
            {"echo X gate", "2 eps_X90", 1.8e-4},
            {"induced bit flip", "p1/3", 9.3e-5},
            {"induced dephasing", "p_phi/3", 2.7e-5}};
  }
  ErrorBudget b = build_budget(rows, measured);
  fs::path dir = start_run("budget", g, c, out);
  write_file(dir / "budget.csv", b.to_csv());
  char total[32];
  std::snprintf(total, sizeof total, "%.1e", b.accounted_total());
  out << b.render_table() << "total accounted (2 significant figures): " << total << "\n";
  return 0;
}

int run_sweep(const Globals& g, const std::string& experiment, const std::string& key,
              const std::vector<std::string>& values, std::ostream& out) {
  ExperimentKind kind = parse_experiment(experiment);
  ExperimentConfig base = resolve(g, default_config(kind));
  base.experiment = kind;
  // Validate every point before writing anything.
  std::vector<ExperimentConfig> points;
  for (const auto& v : values) {
    ExperimentConfig c = base;
    set_config_value(c, key, v);
    require_valid(c);
    points.push_back(c);
  }
  fs::path dir = start_run("sweep", g, base, out);
  std::ostringstream csv;
  csv << "key,value,quantity,estimate,sigma\n";
  json summary = {{"command", "sweep"}, {"experiment", experiment}, {"key", key}, {"points", json::array()}};
  for (size_t i = 0; i < points.size(); ++i) {
    ExperimentResult r = run_experiment(points[i]);
    std::string shown = get_config_value(points[i], key);
    json pt = {{"value", shown}, {"derived", json::object()}};
    for (const auto& [name, e] : r.derived) {
      csv << csv_field(key) << "," << csv_field(shown) << "," << csv_field(name) << "," << num(e.value) << ","
          << num(e.sigma) << "\n";
      pt["derived"][name] = {{"value", e.value}, {"sigma", e.sigma}};
    }
    summary["points"].push_back(pt);
    out << key << " = " << shown << "\n";
    print_result(r, out);
  }
  write_file(dir / "sweep.csv", csv.str());
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  json j = {{"command", m.command},       {"config_path", m.config_path},   {"seed", m.seed},
            {"output_dir", m.output_dir}, {"tool_version", m.tool_version}, {"timestamp", m.timestamp}};
  return j.dump(2) + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string curves_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "curve,x,y,yerr\n";
  for (const auto& [name, s] : r.curves) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      out << csv_field(name) << "," << num(s.x[i]) << "," << num(s.y[i]) << ","
          << num(i < s.yerr.size() ? s.yerr[i] : 0.0) << "\n";
    }
  }
  return out.str();
}

std::string fits_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "fit,parameter,value,sigma,chi2,dof,converged,flags\n";
  for (const auto& [name, f] : r.fits) {
    std::string flags;
    for (const auto& fl : f.flags) flags += (flags.empty() ? "" : ";") + fl;
    for (size_t i = 0; i < f.names.size(); ++i) {
      out << csv_field(name) << "," << csv_field(f.names[i]) << "," << num(f.params(static_cast<int>(i))) << ","
          << num(f.sigma(f.names[i])) << "," << num(f.chi2) << "," << f.dof << ","
          << (f.converged ? "true" : "false") << "," << csv_field(flags) << "\n";
    }
  }
  return out.str();
}

std::string summary_json(const ExperimentResult& r, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  j["drive_amp_hz"] = r.drive_amp / kTwoPi;
  j["derived"] = json::object();
  for (const auto& [k, e] : r.derived) j["derived"][k] = {{"value", e.value}, {"sigma", e.sigma}};
  j["fits"] = json::object();
  for (const auto& [name, f] : r.fits) {
    json fj = {{"chi2", f.chi2}, {"dof", f.dof}, {"converged", f.converged}, {"flags", f.flags}};
    for (const auto& p : f.names) fj["params"][p] = {{"value", f.value(p)}, {"sigma", f.sigma(p)}};
    j["fits"][name] = fj;
  }
  j["diagnostics"] = r.diagnostics;
  const ClassifierConfig& cls = r.classifier;
  j["classifier"] = {{"threshold", cls.threshold},
                     {"axis", {cls.projection_axis.real(), cls.projection_axis.imag()}},
                     {"center", {cls.center.real(), cls.center.imag()}},
                     {"sigma", cls.sigma},
                     {"radius_sigma", cls.radius_sigma},
                     {"snr", cls.snr}};
  return j.dump(2) + "\n";
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-rail erasure check simulator", "dualrail"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--shots", g.shots, "shots per point")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "key = value config file");
  app.add_option("--out", g.out, std::string("output directory (default $") + kOutputDirEnv + " or dualrail_out)");
  app.add_option("--set", g.sets, "override one config key, key=value; repeatable");

  bool sweep_detuning = false;
  double snr = 11.6;
  int points = 2001;
  auto* disp = app.add_subcommand("dispersive", "closed-form readout and optimal detuning");
  disp->add_flag("--sweep-detuning", sweep_detuning, "write the error versus drive detuning over +/-10 kappa");
  disp->add_option("--snr", snr, "check SNR")->capture_default_str();
  disp->add_option("--points", points, "sweep points")->capture_default_str();

  auto* snr_cmd = app.add_subcommand("snr", "simulated SNR against integration window");
  auto* ilrb = app.add_subcommand("ilrb", "interleaved RB of the erasure check");
  auto* induced = app.add_subcommand("induced", "induced bit-flip and dephasing ladders");
  auto* cont = app.add_subcommand("continuous", "RB with continuous parallel erasure detection");
  auto* terasure = app.add_subcommand("terasure", "erasure lifetime with the probe off and on");
  auto* leak = app.add_subcommand("leaksweep", "circular leakage classifier radius sweep");

  bool from_config = false;
  double measured = 6.0e-4;
  auto* budget = app.add_subcommand("budget", "residual error budget per check");
  budget->add_flag("--from-config", from_config, "derive rows from the config instead of the reference rows");
  budget->add_option("--measured", measured, "measured residual per check")->capture_default_str();

  std::string experiment, key;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "rerun one experiment over values of one config key");
  sweep->add_option("--experiment", experiment, "experiment name")->required();
  sweep->add_option("--key", key, "config key to vary")->required();
  sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');

  if (args.size() <= 1) {
    err << app.help();
    return 1;
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*disp) return run_dispersive(g, sweep_detuning, snr, points, out);
    if (*snr_cmd) return run_kind("snr", ExperimentKind::ContinuousRb, g, out, run_snr_series);
    if (*ilrb) return run_kind("ilrb", ExperimentKind::Ilrb, g, out, run_ilrb);
    if (*induced) return run_kind("induced", ExperimentKind::InducedBitflip, g, out, run_induced_ladders);
    if (*cont) return run_kind("continuous", ExperimentKind::ContinuousRb, g, out, run_continuous_rb);
    if (*terasure) return run_kind("terasure", ExperimentKind::TErasureCompare, g, out, run_t_erasure_compare);
    if (*leak) return run_kind("leaksweep", ExperimentKind::LeakSweep, g, out, run_leak_sweep);
    if (*budget) return run_budget(g, from_config, measured, out);
    if (*sweep) return run_sweep(g, experiment, key, values, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ExperimentError& e) {
    err << "experiment failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  err << app.help();
  return 1;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace dualrail
