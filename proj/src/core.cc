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

#include "dualrail/core.h"

#include <cmath>
#include <sstream>

namespace dualrail {

SystemParams noiseless(SystemParams params) {
  params.t_erasure_0L = kInf;
  params.t_erasure_1L = kInf;
  params.t_heat = kInf;
  params.mist_prob_per_check = 0.0;
  params.t1_logical = kInf;
  params.t_phi_logical = kInf;
  params.x90_error = 0.0;
  return params;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (size_t k = 0; k < problems.size(); ++k) {
    if (k) out << "; ";
    out << problems[k];
  }
  return out.str();
}

ValidationReport validate(const SystemParams& p) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.problems.push_back(msg); };
  auto finite = [&](const char* name, double v) {
    if (!std::isfinite(v)) fail(std::string(name) + ": must be finite");
  };
  finite("chi", p.chi);
  finite("chi_dr", p.chi_dr);
  finite("chi_dr_2", p.chi_dr_2);
  finite("drive_amp", p.drive_amp);
  finite("drive_detuning", p.drive_detuning);
  finite("chi_leak", p.chi_leak);
  finite("dr_gap", p.dr_gap);

  if (!(p.kappa_gg > 0)) fail("kappa_gg: linewidth must be positive");
  if (!(p.kappa_logical > 0)) fail("kappa_logical: linewidth must be positive");
  if (!(p.eta_eff > 0)) fail("eta_eff: efficiency must be positive");
  if (p.eta_eff > 0.5) fail("eta_eff: efficiency must not exceed 0.5");
  if (!(p.t_erasure_0L > 0)) fail("t_erasure_0L: lifetime must be positive");
  if (!(p.t_erasure_1L > 0)) fail("t_erasure_1L: lifetime must be positive");
  if (!(p.t_heat > 0)) fail("t_heat: lifetime must be positive");
  if (!(p.t1_logical > 0)) fail("t1_logical: lifetime must be positive");
  if (!(p.t_phi_logical > 0)) fail("t_phi_logical: lifetime must be positive");
  if (!(p.readout_degradation >= 1)) fail("readout_degradation: must be >= 1");
  if (!(p.mist_prob_per_check >= 0 && p.mist_prob_per_check < 1)) {
    fail("mist_prob_per_check: must lie in [0, 1)");
  }
  if (!(p.x90_error >= 0 && p.x90_error <= 0.5)) fail("x90_error: must lie in [0, 0.5]");
  if (!(p.dr_gap >= 0)) fail("dr_gap: must be nonnegative");
  if (std::isfinite(p.chi) && std::isfinite(p.chi_dr) && !(std::abs(p.chi_dr) < std::abs(p.chi))) {
    fail("chi_dr: mismatch regime violated, |chi_dr| must be smaller than |chi|");
  }
  return report;
}

void require_valid(const SystemParams& params) {
  auto report = validate(params);
  if (!report.ok()) throw ValidationError("invalid SystemParams: " + report.summary());
}

const char* sector_name(Sector s) {
  switch (s) {
    case Sector::Logical:
      return "logical";
    case Sector::Erased:
      return "erased";
    case Sector::Leaked:
      return "leaked";
  }
  return "?";
}

DualRailState DualRailState::logical(double x, double y, double z) {
  DualRailState s{Sector::Logical, {x, y, z}};
  if (s.bloch_norm() > 1 + 1e-12) throw ValidationError("bloch: vector norm exceeds 1");
  return s;
}

double DualRailState::bloch_norm() const {
  return std::sqrt(bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]);
}

double dual_rail_gap(double g, double delta) {
  if (!(g > 0)) throw ValidationError("g: coupling must be positive");
  return std::hypot(2.0 * g, delta);
}

}  // namespace dualrail
