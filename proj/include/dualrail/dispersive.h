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

#ifndef DUALRAIL_DISPERSIVE_H
#define DUALRAIL_DISPERSIVE_H

#include <optional>
#include <string>

#include "dualrail/core.h"

namespace dualrail {

/// Steady-state resonator amplitudes for each occupancy sector.
struct SteadyStateSet {
  complex alpha_0;
  complex alpha_1;
  complex alpha_gg;
  complex alpha_leak;
  double n_dr = 0;  ///< |(alpha_0 + alpha_1)/2|^2
  double n_gg = 0;
};

/// Linewidth used by the closed-form expressions: `kappa` if given, else kappa_gg.
double analytic_kappa(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// -i eps / (kappa/2 + i delta).
complex steady_amplitude(double eps, double kappa, double delta);

/// Field detunings of each sector relative to the drive.
double detuning_0L(const SystemParams& params);
double detuning_1L(const SystemParams& params);
double detuning_gg(const SystemParams& params);
double detuning_leak(const SystemParams& params);

SteadyStateSet steady_states(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// n_DR / n_gg for the matched (chi_dr -> 0) logical response.
double photon_ratio(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// 2 kappa eta |alpha_gg - alpha_L|^2 with the logical field taken at chi_dr = 0.
double measurement_rate(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// Same rate using the exact logical centroid (alpha_0 + alpha_1)/2.
double measurement_rate_exact(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// Logical dephasing rate 2 chi_dr Im[alpha_0 conj(alpha_1)], nonnegative.
double dephasing_rate(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// Leading-order form 2 eps^2 chi_dr^2 kappa / [(kappa/2)^2 + (delta + chi)^2]^2.
double dephasing_rate_approx(const SystemParams& params, std::optional<double> kappa = std::nullopt);

/// [1 - erf(sqrt(snr)/2)] / 2.
double separation_error(double snr);

double induced_dephasing_error(double snr, const SystemParams& params,
                               std::optional<double> kappa = std::nullopt);

/// (sqrt(1 + x^2) - x)^2, the photon ratio at the optimal detuning for x = 2|chi|/kappa.
double optimal_ratio_factor(double x);

struct MinDephasing {
  double error = 0;              ///< at the exact optimum
  double optimal_detuning = 0;   ///< sgn(chi) sqrt((kappa/2)^2 + chi^2)
  double ratio_factor = 0;       ///< photon ratio at the optimum
  double asymptotic_error = 0;   ///< snr/(24 eta) (chi_dr/chi)^2 (kappa/2chi)^2
};

MinDephasing min_dephasing_error(double snr, const SystemParams& params,
                                 std::optional<double> kappa = std::nullopt);

struct NumericOptimum {
  double error = 0;
  double detuning = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  int iterations = 0;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid scan plus golden-section search of induced_dephasing_error over the
/// drive detuning in [-10 w, 10 w] with w = max(kappa, |chi|).
NumericOptimum optimize_detuning_numeric(double snr, const SystemParams& params,
                                         std::optional<double> kappa = std::nullopt);

struct StarkShift {
  double shift = 0;
  double n_r = 0;
};

StarkShift stark_photon_number(double chi_1, double scale_c, double amp);

/// 2 chi_dr n + 2 chi_dr_2 n^2.
double dr_detuning_vs_photon(const SystemParams& params, double n_r);

/// Drive amplitude for which measurement_rate * duration equals `snr`.
double drive_for_snr(const SystemParams& params, double snr, double duration,
                     std::optional<double> kappa = std::nullopt);

}  // namespace dualrail

#endif  // DUALRAIL_DISPERSIVE_H
