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

#include "dualrail/channel.h"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace dualrail {

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

void require_valid(const ErrorChannelParams& ch) {
  if (!(ch.p1 >= 0 && ch.p1 <= 1)) throw ValidationError("p1: must lie in [0, 1]");
  if (!(ch.p_phi >= 0 && ch.p_phi <= 1)) throw ValidationError("p_phi: must lie in [0, 1]");
  if (ch.p1 / 2 + ch.p_phi / 2 > 1) throw ValidationError("channel: p1/2 + p_phi/2 exceeds 1");
}

PauliProbabilities pauli_probabilities(const ErrorChannelParams& ch) {
  return {ch.p1 / 4, ch.p1 / 4, ch.p_phi / 2};
}

Bloch apply_check(const Bloch& b, const ErrorChannelParams& ch) {
  double t = 1 - ch.p2();
  return {t * b[0], t * b[1], (1 - ch.p1) * b[2]};
}

Bloch apply_checks(const Bloch& b, const ErrorChannelParams& ch, long n) {
  if (n < 0) throw ValidationError("n: check count must be nonnegative");
  double t = std::pow(1 - ch.p2(), static_cast<double>(n));
  double z = std::pow(1 - ch.p1, static_cast<double>(n));
  return {t * b[0], t * b[1], z * b[2]};
}

ErrorChannelParams compose(const ErrorChannelParams& a, const ErrorChannelParams& b) {
  double lz = (1 - a.p1) * (1 - b.p1);
  double lx = (1 - a.p2()) * (1 - b.p2());
  ErrorChannelParams out;
  out.p1 = 1 - lz;
  out.p_phi = (1 - lx) - out.p1 / 2;
  return out;
}

double avg_fidelity(const ErrorChannelParams& ch) { return 1 - ch.p1 / 3 - ch.p_phi / 3; }

double infidelity(const ErrorChannelParams& ch) { return ch.p1 / 3 + ch.p_phi / 3; }

double extract_p_phi(double p2, double p1) {
  double v = p2 - p1 / 2;
  if (v < 0) throw ValidationError("p2: below p1/2, unphysical fit result");
  return v;
}

ErrorChannelParams x90_channel(double eps) {
  if (!(eps >= 0)) throw ValidationError("x90_error: must be nonnegative");
  return {2 * eps, eps};
}

ErrorChannelParams idle_channel(double duration, double t1, double t_phi) {
  if (!(duration >= 0)) throw ValidationError("duration: must be nonnegative");
  ErrorChannelParams ch;
  ch.p1 = std::isinf(t1) ? 0.0 : duration / t1;
  ch.p_phi = std::isinf(t_phi) ? 0.0 : duration / t_phi;
  return ch;
}

double ErrorBudget::accounted_total() const {
  double s = 0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

double ErrorBudget::fraction_accounted() const {
  return measured_total > 0 ? accounted_total() / measured_total : 0.0;
}

std::string ErrorBudget::render_table() const {
  size_t w0 = 14, w1 = 10;
  for (const auto& e : entries) {
    w0 = std::max(w0, e.label.size());
    w1 = std::max(w1, e.expression.size());
  }
  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
    out << a << std::string(w0 - a.size() + 2, ' ') << b << std::string(w1 - b.size() + 2, ' ') << c
        << "\n";
  };
  row("source", "expression", "error");
  for (const auto& e : entries) row(e.label, e.expression, sci(e.probability));
  row("total accounted", "", sci(accounted_total()));
  if (measured_total > 0) {
    row("measured", "", sci(measured_total));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100 * fraction_accounted());
    row("fraction", "", buf);
  }
  return out.str();
}

std::string ErrorBudget::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "label,expression,probability\n";
  for (const auto& e : entries) {
    out << csv_quote(e.label) << "," << csv_quote(e.expression) << "," << e.probability << "\n";
  }
  out << "total,," << accounted_total() << "\n";
  if (measured_total > 0) out << "measured,," << measured_total << "\n";
  return out.str();
}

ErrorBudget build_budget(const std::vector<BudgetEntry>& components, double measured_total) {
  for (const auto& e : components) {
    if (!(e.probability >= 0)) throw ValidationError("budget entry '" + e.label + "': negative probability");
  }
  if (!(measured_total >= 0)) throw ValidationError("measured_total: must be nonnegative");
  return {components, measured_total};
}

std::vector<BudgetEntry> standard_budget_components(double check_time, double t1, double t_phi,
                                                    double x90_error, const ErrorChannelParams& induced) {
  return {
      {"idle T1", "T_m/3T1", std::isinf(t1) ? 0.0 : check_time / (3 * t1)},
      {"idle dephasing", "T_m/3T_phi", std::isinf(t_phi) ? 0.0 : check_time / (3 * t_phi)},
      {"echo X gate", "2 eps_X90", 2 * x90_error},
      {"induced bit flip", "p1/3", induced.p1 / 3},
      {"induced dephasing", "p_phi/3", induced.p_phi / 3},
  };
}

double noise_bias(double erasure_per_check, double residual_per_check) {
  if (!(residual_per_check > 0)) throw ValidationError("residual_per_check: must be positive");
  return erasure_per_check / residual_per_check;
}

double heating_time(double t_erasure, double p_equil) {
  if (!(p_equil > 0)) throw ValidationError("p_equil: must be positive");
  return t_erasure / p_equil;
}

}  // namespace dualrail
