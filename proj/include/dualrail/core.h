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

#ifndef DUALRAIL_CORE_H
#define DUALRAIL_CORE_H

#include <array>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualrail {

using complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Converts an ordinary frequency in Hz to an angular rate in rad/s.
constexpr double hz(double f) { return kTwoPi * f; }
constexpr double mhz(double f) { return kTwoPi * f * 1e6; }
constexpr double khz(double f) { return kTwoPi * f * 1e3; }

/// Thrown when an input violates a documented precondition. The message
/// names the offending field or argument.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Device and drive constants. All rates are angular (rad/s), all times are
/// seconds. Default construction yields the χ-matched operating point of the
/// reference device with the probe switched off (drive_amp = 0).
struct SystemParams {
  double chi = mhz(-4.25);            ///< average dispersive shift (χ0+χ1)/2
  double chi_dr = khz(-0.7);          ///< mismatch χ1 − χ0
  double chi_dr_2 = khz(-0.7);        ///< second-order mismatch χ'_DR
  double kappa_gg = mhz(12.4);        ///< linewidth with the qubit erased
  double kappa_logical = mhz(10.5);   ///< linewidth in the logical subspace
  double eta_eff = 0.125;             ///< effective measurement efficiency
  double drive_amp = 0.0;             ///< ε_d
  double drive_detuning = mhz(-4.25); ///< Δ_d; equal to χ drives the |gg> resonance
  double t_erasure_0L = 27e-6;
  double t_erasure_1L = 24e-6;
  double readout_degradation = 2.0;   ///< T_erasure reduction factor under drive
  double t_heat = 13e-3;              ///< erased -> logical reheating time
  double mist_prob_per_check = 0.0;
  double dr_gap = mhz(94.15);         ///< Ω_DR = 2g

  // Logical-subspace idle decoherence and gate quality. Infinite / zero
  // values switch the corresponding process off.
  double t1_logical = 2176e-6;
  double t_phi_logical = 1500e-6;
  double x90_error = 9e-5;

  /// Dispersive shift placing the leaked (two-excitation) sector's cavity
  /// response; the field detuning in that sector is drive_detuning + chi_leak.
  double chi_leak = 3.0 * mhz(-4.25);

  bool operator==(const SystemParams&) const = default;
};

/// Same device with every stochastic process disabled: infinite lifetimes, no
/// reheating, no leakage, ideal gates.
SystemParams noiseless(SystemParams params);

struct ValidationReport {
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
  std::string summary() const;
};

ValidationReport validate(const SystemParams& params);

/// Throws ValidationError with the full report if `params` is invalid.
void require_valid(const SystemParams& params);

enum class Sector { Logical, Erased, Leaked };

const char* sector_name(Sector s);

using Bloch = std::array<double, 3>;

/// Occupancy sector of the dual-rail pair. The Bloch vector is meaningful
/// only in the logical sector.
struct DualRailState {
  Sector sector = Sector::Logical;
  Bloch bloch{0.0, 0.0, 1.0};

  static DualRailState logical(double x, double y, double z);
  static DualRailState zero() { return logical(0, 0, 1); }
  static DualRailState one() { return logical(0, 0, -1); }
  static DualRailState plus() { return logical(1, 0, 0); }
  static DualRailState erased() { return {Sector::Erased, {0, 0, 0}}; }
  static DualRailState leaked() { return {Sector::Leaked, {0, 0, 0}}; }

  double bloch_norm() const;
  bool operator==(const DualRailState&) const = default;
};

/// Uniformly sampled complex I/Q record.
struct MeasurementRecord {
  std::vector<complex> samples;
  double dt = 0.0;
  double origin_time = 0.0;

  double duration() const { return dt * static_cast<double>(samples.size()); }
  bool operator==(const MeasurementRecord&) const = default;
};

/// Dual-rail transition frequency sqrt((2g)^2 + δ^2).
double dual_rail_gap(double g, double delta);

}  // namespace dualrail

#endif  // DUALRAIL_CORE_H
