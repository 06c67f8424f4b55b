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


#include "dualrail/config.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dualrail {

namespace {

enum class Kind { Freq, Time, Real, Int, Seed, IntList, RealList, Experiment, Kernel, Complex, ComplexList };

struct Entry {
  ConfigKey key;
  Kind kind;
  void* (*ref)(ExperimentConfig&);
};

#define DR_REF(expr) [](ExperimentConfig& c) -> void* { return &(expr); }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"experiment", "", "ilrb, induced_bitflip, induced_dephasing, continuous_rb, t_erasure_compare, leak_sweep"},
       Kind::Experiment, DR_REF(c.experiment)},
      {{"lengths", "", "Clifford counts, check counts or delays in ns"}, Kind::IntList, DR_REF(c.lengths)},
      {{"shots_per_point", "", "shots per length and arm"}, Kind::Int, DR_REF(c.shots_per_point)},
      {{"seed", "", "master seed"}, Kind::Seed, DR_REF(c.seed)},
      {{"threads", "", "worker threads"}, Kind::Int, DR_REF(c.threads)},
      {{"chi", "Hz", "average dispersive shift"}, Kind::Freq, DR_REF(c.params.chi)},
      {{"chi_dr", "Hz", "dispersive mismatch chi1 - chi0"}, Kind::Freq, DR_REF(c.params.chi_dr)},
      {{"chi_dr_2", "Hz", "second-order mismatch"}, Kind::Freq, DR_REF(c.params.chi_dr_2)},
      {{"kappa_gg", "Hz", "linewidth with the pair erased"}, Kind::Freq, DR_REF(c.params.kappa_gg)},
      {{"kappa_logical", "Hz", "linewidth in the logical subspace"}, Kind::Freq, DR_REF(c.params.kappa_logical)},
      {{"eta_eff", "", "measurement efficiency"}, Kind::Real, DR_REF(c.params.eta_eff)},
      {{"drive_amp", "Hz", "probe amplitude; 0 calibrates from the SNR targets"}, Kind::Freq,
       DR_REF(c.params.drive_amp)},
      {{"drive_detuning", "Hz", "probe detuning"}, Kind::Freq, DR_REF(c.params.drive_detuning)},
      {{"t_erasure_0L", "s", "erasure lifetime of |0_L>"}, Kind::Time, DR_REF(c.params.t_erasure_0L)},
      {{"t_erasure_1L", "s", "erasure lifetime of |1_L>"}, Kind::Time, DR_REF(c.params.t_erasure_1L)},
      {{"readout_degradation", "", "erasure rate factor while probing"}, Kind::Real,
       DR_REF(c.params.readout_degradation)},
      {{"t_heat", "s", "reheating time from the erased state"}, Kind::Time, DR_REF(c.params.t_heat)},
      {{"mist_prob_per_check", "", "leak probability per check"}, Kind::Real, DR_REF(c.params.mist_prob_per_check)},
      {{"dr_gap", "Hz", "dual-rail coupling 2g"}, Kind::Freq, DR_REF(c.params.dr_gap)},
      {{"t1_logical", "s", "logical bit-flip time"}, Kind::Time, DR_REF(c.params.t1_logical)},
      {{"t_phi_logical", "s", "logical pure dephasing time"}, Kind::Time, DR_REF(c.params.t_phi_logical)},
      {{"x90_error", "", "average infidelity of one X90"}, Kind::Real, DR_REF(c.params.x90_error)},
      {{"chi_leak", "Hz", "dispersive shift of the leaked sector"}, Kind::Freq, DR_REF(c.params.chi_leak)},
      {{"p1", "", "injected bit-flip probability per check"}, Kind::Real, DR_REF(c.injected.p1)},
      {{"p_phi", "", "injected dephasing probability per check"}, Kind::Real, DR_REF(c.injected.p_phi)},
      {{"check_snr", "", "SNR of one check window"}, Kind::Real, DR_REF(c.check_snr)},
      {{"check_every", "", "Cliffords between common checks"}, Kind::Int, DR_REF(c.check_every)},
      {{"min_survivors", "", "smallest postselected count kept in a fit"}, Kind::Int, DR_REF(c.min_survivors)},
      {{"calibration_shots", "", "shots per class for classifier calibration"}, Kind::Int,
       DR_REF(c.calibration_shots)},
      {{"ladder_time", "s", "fixed evolution time of the ladders"}, Kind::Time, DR_REF(c.ladder_time)},
      {{"ladder_tail_min", "", "smallest check count in the ladder fits"}, Kind::Int, DR_REF(c.ladder_tail_min)},
      {{"window", "s", "continuous integration window"}, Kind::Time, DR_REF(c.window)},
      {{"continuous_snr", "", "SNR of one continuous window"}, Kind::Real, DR_REF(c.continuous_snr)},
      {{"discrete_checks", "", "checks in the discrete comparison"}, Kind::Int, DR_REF(c.discrete_checks)},
      {{"seep_probability", "", "fraction of shots with a fast seep episode"}, Kind::Real,
       DR_REF(c.seep_probability)},
      {{"seep_t_erasure", "s", "erasure lifetime during an episode"}, Kind::Time, DR_REF(c.seep_t_erasure)},
      {{"seep_t_heat", "s", "reheating time during an episode"}, Kind::Time, DR_REF(c.seep_t_heat)},
      {{"snr_windows", "", "windows in ns for the SNR series, or none"}, Kind::IntList, DR_REF(c.snr_windows)},
      {{"snr_records", "", "records per class and window"}, Kind::Int, DR_REF(c.snr_records)},
      {{"trace_shots", "", "exported window traces"}, Kind::Int, DR_REF(c.trace_shots)},
      {{"leak_snr", "", "check SNR of the leak sweep"}, Kind::Real, DR_REF(c.leak_snr)},
      {{"radii", "", "circular radii in units of sigma"}, Kind::RealList, DR_REF(c.radii)},
      {{"classifier_kernel", "", "boxcar or matched"}, Kind::Kernel, DR_REF(c.classifier.kernel)},
      {{"classifier_window", "s", "boxcar length"}, Kind::Time, DR_REF(c.classifier.window)},
      {{"classifier_template", "", "matched-filter weights"}, Kind::ComplexList, DR_REF(c.classifier.matched_template)},
      {{"classifier_axis", "", "unit separation axis"}, Kind::Complex, DR_REF(c.classifier.projection_axis)},
      {{"classifier_threshold", "", "threshold on the projection"}, Kind::Real, DR_REF(c.classifier.threshold)},
      {{"classifier_center", "", "logical mean"}, Kind::Complex, DR_REF(c.classifier.center)},
      {{"classifier_sigma", "", "logical cluster std"}, Kind::Real, DR_REF(c.classifier.sigma)},
      {{"classifier_radius_sigma", "", "circular radius"}, Kind::Real, DR_REF(c.classifier.radius_sigma)},
      {{"classifier_mean_logical", "", "logical mean"}, Kind::Complex, DR_REF(c.classifier.mean_logical)},
      {{"classifier_mean_erased", "", "erased mean"}, Kind::Complex, DR_REF(c.classifier.mean_erased)},
      {{"classifier_snr", "", "0 calibrates from simulation"}, Kind::Real, DR_REF(c.classifier.snr)},
  };
  return table;
}

#undef DR_REF

const Entry& find(const std::string& key) {
  for (const auto& e : entries()) {
    if (e.key.name == key) return e;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config: key '" + key + "': " + what);
}

// Number followed by an optional unit.
double number(const std::string& key, const std::string& text, std::string* unit) {
  const char* s = text.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s, &end);
  if (end == s || std::isnan(v) || errno == ERANGE) bad(key, "expected a number, got '" + text + "'");
  std::string rest = trim(end);
  if (!unit && !rest.empty()) bad(key, "unexpected text '" + rest + "'");
  if (unit) *unit = rest;
  return v;
}

double frequency(const std::string& key, const std::string& text) {
  std::string u;
  double v = number(key, text, &u);
  if (u.empty() || u == "Hz") return kTwoPi * v;
  if (u == "kHz") return kTwoPi * v * 1e3;
  if (u == "MHz") return kTwoPi * v * 1e6;
  if (u == "GHz") return kTwoPi * v * 1e9;
  if (u == "rad/s") return v;
  bad(key, "unknown frequency unit '" + u + "'");
}

double time_value(const std::string& key, const std::string& text) {
  std::string u;
  double v = number(key, text, &u);
  if (u.empty() || u == "s") return v;
  if (u == "ms") return v * 1e-3;
  if (u == "us") return v * 1e-6;
  if (u == "ns") return v * 1e-9;
  bad(key, "unknown time unit '" + u + "'");
}

long long integer(const std::string& key, const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || errno == ERANGE || !trim(end).empty()) bad(key, "expected an integer, got '" + text + "'");
  return v;
}

int int_value(const std::string& key, const std::string& text) {
  long long v = integer(key, text);
  if (v < INT32_MIN || v > INT32_MAX) bad(key, "integer out of range");
  return static_cast<int>(v);
}

complex complex_value(const std::string& key, const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) bad(key, "expected re,im");
  return {number(key, parts[0], nullptr), number(key, parts[1], nullptr)};
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_freq(double w) {
  std::string hz = fmt(w / kTwoPi);
  // Plain Hz only when it maps back to the stored rate exactly.
  if (kTwoPi * std::strtod(hz.c_str(), nullptr) == w) return hz;
  return fmt(w) + " rad/s";
}

std::string fmt_complex(complex z) { return fmt(z.real()) + "," + fmt(z.imag()); }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const Entry& e = find(key);
  std::string v = trim(raw);
  if (v.empty()) throw ConfigError("config: key '" + key + "' has no value");
  void* p = e.ref(c);
  switch (e.kind) {
    case Kind::Freq: *static_cast<double*>(p) = frequency(key, v); break;
    case Kind::Time: *static_cast<double*>(p) = time_value(key, v); break;
    case Kind::Real: *static_cast<double*>(p) = number(key, v, nullptr); break;
    case Kind::Int: *static_cast<int*>(p) = int_value(key, v); break;
    case Kind::Seed: {
      const char* s = v.c_str();
      char* end = nullptr;
      errno = 0;
      if (v[0] == '-') bad(key, "expected an unsigned integer");
      unsigned long long x = std::strtoull(s, &end, 0);
      if (end == s || errno == ERANGE || !trim(end).empty()) bad(key, "expected an unsigned integer");
      *static_cast<uint64_t*>(p) = x;
      break;
    }
    case Kind::IntList: {
      auto& out = *static_cast<std::vector<int>*>(p);
      out.clear();
      if (v == "none") break;
      for (const auto& s : split(v, ',')) out.push_back(int_value(key, s));
      break;
    }
    case Kind::RealList: {
      auto& out = *static_cast<std::vector<double>*>(p);
      out.clear();
      if (v == "none") break;
      for (const auto& s : split(v, ',')) out.push_back(number(key, s, nullptr));
      break;
    }
    case Kind::Experiment:
      try {
        *static_cast<ExperimentKind*>(p) = parse_experiment(v);
      } catch (const ValidationError&) {
        bad(key, "unknown experiment '" + v + "'");
      }
      break;
    case Kind::Kernel:
      if (v == "boxcar") {
        *static_cast<KernelKind*>(p) = KernelKind::Boxcar;
      } else if (v == "matched") {
        *static_cast<KernelKind*>(p) = KernelKind::MatchedFilter;
      } else {
        bad(key, "expected boxcar or matched");
      }
      break;
    case Kind::Complex: *static_cast<complex*>(p) = complex_value(key, v); break;
    case Kind::ComplexList: {
      auto& out = *static_cast<std::vector<complex>*>(p);
      out.clear();
      if (v == "none") break;
      for (const auto& s : split(v, ';')) out.push_back(complex_value(key, s));
      break;
    }
  }
}

std::string get_config_value(const ExperimentConfig& config, const std::string& key) {
  const Entry& e = find(key);
  ExperimentConfig& c = const_cast<ExperimentConfig&>(config);
  void* p = e.ref(c);
  auto join = [](const auto& xs, auto f, const char* sep) {
    if (xs.empty()) return std::string("none");
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + f(xs[i]);
    return s;
  };
  switch (e.kind) {
    case Kind::Freq: return fmt_freq(*static_cast<double*>(p));
    case Kind::Time:
    case Kind::Real: return fmt(*static_cast<double*>(p));
    case Kind::Int: return std::to_string(*static_cast<int*>(p));
    case Kind::Seed: return std::to_string(*static_cast<uint64_t*>(p));
    case Kind::IntList:
      return join(*static_cast<std::vector<int>*>(p), [](int x) { return std::to_string(x); }, ",");
    case Kind::RealList: return join(*static_cast<std::vector<double>*>(p), fmt, ",");
    case Kind::Experiment: return experiment_name(*static_cast<ExperimentKind*>(p));
    case Kind::Kernel: return *static_cast<KernelKind*>(p) == KernelKind::Boxcar ? "boxcar" : "matched";
    case Kind::Complex: return fmt_complex(*static_cast<complex*>(p));
    case Kind::ComplexList: return join(*static_cast<std::vector<complex>*>(p), fmt_complex, ";");
  }
  return "";
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
    }
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& e : entries()) {
    out += e.key.name + " = " + get_config_value(config, e.key.name) + "\n";
  }
  return out;
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  const ClassifierConfig &x = a.classifier, &y = b.classifier;
  return a.experiment == b.experiment && a.lengths == b.lengths && a.shots_per_point == b.shots_per_point &&
         a.params == b.params && a.injected.p1 == b.injected.p1 && a.injected.p_phi == b.injected.p_phi &&
         a.seed == b.seed && a.threads == b.threads && a.check_snr == b.check_snr &&
         a.check_every == b.check_every && a.min_survivors == b.min_survivors &&
         a.calibration_shots == b.calibration_shots && a.ladder_time == b.ladder_time &&
         a.ladder_tail_min == b.ladder_tail_min && a.window == b.window && a.continuous_snr == b.continuous_snr &&
         a.discrete_checks == b.discrete_checks && a.seep_probability == b.seep_probability &&
         a.seep_t_erasure == b.seep_t_erasure && a.seep_t_heat == b.seep_t_heat && a.snr_windows == b.snr_windows &&
         a.snr_records == b.snr_records && a.trace_shots == b.trace_shots && a.leak_snr == b.leak_snr &&
         a.radii == b.radii && x.kernel == y.kernel && x.window == y.window &&
         x.matched_template == y.matched_template && x.projection_axis == y.projection_axis &&
         x.threshold == y.threshold && x.center == y.center && x.sigma == y.sigma &&
         x.radius_sigma == y.radius_sigma && x.mean_logical == y.mean_logical && x.mean_erased == y.mean_erased &&
         x.snr == y.snr;
}

}  // namespace dualrail
