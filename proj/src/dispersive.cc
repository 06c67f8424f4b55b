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

#include "dualrail/dispersive.h"

#include <cmath>
#include <sstream>

namespace dualrail {

namespace {

double sq(double x) { return x * x; }

double sign_of(double x) { return x < 0 ? -1.0 : 1.0; }

void require_snr(double snr) {
  if (!(snr >= 0) || !std::isfinite(snr)) throw ValidationError("snr: must be a nonnegative number");
}

void require_chi(const SystemParams& p) {
  if (p.chi == 0) throw ValidationError("chi: must be nonzero");
}

// n_DR / n_gg as a function of the drive detuning; both terms stay accurate
// when the ratio is tiny.
double ratio_at(double delta, double chi, double kappa) {
  return (sq(kappa / 2) + sq(delta - chi)) / (sq(kappa / 2) + sq(delta + chi));
}

}  // namespace

double analytic_kappa(const SystemParams& params, std::optional<double> kappa) {
  double k = kappa.value_or(params.kappa_gg);
  if (!(k > 0)) throw ValidationError("kappa: linewidth must be positive");
  return k;
}

complex steady_amplitude(double eps, double kappa, double delta) {
  return complex(0, -eps) / complex(kappa / 2, delta);
}

double detuning_0L(const SystemParams& p) { return p.drive_detuning + p.chi - p.chi_dr; }
double detuning_1L(const SystemParams& p) { return p.drive_detuning + p.chi + p.chi_dr; }
double detuning_gg(const SystemParams& p) { return p.drive_detuning - p.chi; }
double detuning_leak(const SystemParams& p) { return p.drive_detuning + p.chi_leak; }

SteadyStateSet steady_states(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  SteadyStateSet s;
  s.alpha_0 = steady_amplitude(p.drive_amp, k, detuning_0L(p));
  s.alpha_1 = steady_amplitude(p.drive_amp, k, detuning_1L(p));
  s.alpha_gg = steady_amplitude(p.drive_amp, k, detuning_gg(p));
  s.alpha_leak = steady_amplitude(p.drive_amp, k, detuning_leak(p));
  s.n_dr = std::norm((s.alpha_0 + s.alpha_1) / 2.0);
  s.n_gg = std::norm(s.alpha_gg);
  return s;
}

double photon_ratio(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  double u = 2 * p.drive_detuning / k;
  double c = 2 * p.chi / k;
  return (1 + sq(u - c)) / (1 + sq(u + c));
}

double measurement_rate(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  double dp = sq(k / 2) + sq(p.drive_detuning + p.chi);
  double dm = sq(k / 2) + sq(p.drive_detuning - p.chi);
  return 2 * k * p.eta_eff * sq(p.drive_amp) * sq(2 * p.chi) / (dp * dm);
}

double measurement_rate_exact(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  auto s = steady_states(p, k);
  return 2 * k * p.eta_eff * std::norm(s.alpha_gg - (s.alpha_0 + s.alpha_1) / 2.0);
}

double dephasing_rate(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  auto s = steady_states(p, k);
  return 2 * p.chi_dr * std::imag(s.alpha_0 * std::conj(s.alpha_1));
}

double dephasing_rate_approx(const SystemParams& p, std::optional<double> kappa) {
  double k = analytic_kappa(p, kappa);
  double d = sq(k / 2) + sq(p.drive_detuning + p.chi);
  return 2 * sq(p.drive_amp) * sq(p.chi_dr) * k / sq(d);
}

double separation_error(double snr) {
  require_snr(snr);
  return 0.5 * std::erfc(std::sqrt(snr) / 2);
}

double induced_dephasing_error(double snr, const SystemParams& p, std::optional<double> kappa) {
  require_snr(snr);
  require_chi(p);
  return snr / (12 * p.eta_eff) * sq(p.chi_dr / p.chi) * photon_ratio(p, kappa);
}

double optimal_ratio_factor(double x) {
  x = std::abs(x);
  // sqrt(1+x^2) - x = 1/(sqrt(1+x^2) + x), stable for large x.
  return sq(1.0 / (std::sqrt(1 + x * x) + x));
}

MinDephasing min_dephasing_error(double snr, const SystemParams& p, std::optional<double> kappa) {
  require_snr(snr);
  require_chi(p);
  double k = analytic_kappa(p, kappa);
  double pre = snr / (12 * p.eta_eff) * sq(p.chi_dr / p.chi);
  MinDephasing out;
  out.optimal_detuning = sign_of(p.chi) * std::hypot(k / 2, p.chi);
  out.ratio_factor = optimal_ratio_factor(2 * p.chi / k);
  out.error = pre * out.ratio_factor;
  out.asymptotic_error = pre * 0.5 * sq(k / (2 * p.chi));
  return out;
}

NumericOptimum optimize_detuning_numeric(double snr, const SystemParams& p,
                                         std::optional<double> kappa) {
  require_snr(snr);
  require_chi(p);
  double k = analytic_kappa(p, kappa);
  NumericOptimum out;
  // Ten linewidths, widened to ten shifts when |chi| > kappa so the optimum
  // near chi stays inside.
  double half = 10 * std::max(k, std::abs(p.chi));
  out.bracket_lo = -half;
  out.bracket_hi = half;
  if (p.chi_dr == 0 || snr == 0) {
    out.error = 0;
    out.detuning = 0;
    return out;
  }
  double pre = snr / (12 * p.eta_eff) * sq(p.chi_dr / p.chi);
  auto f = [&](double d) { return ratio_at(d, p.chi, k); };

  const int grid = 2001;
  double step = (out.bracket_hi - out.bracket_lo) / (grid - 1);
  int best = 0;
  double best_val = f(out.bracket_lo);
  for (int i = 1; i < grid; ++i) {
    double v = f(out.bracket_lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = out.bracket_lo + std::max(0, best - 1) * step;
  double b = out.bracket_lo + std::min(grid - 1, best + 1) * step;

  const double invphi = (std::sqrt(5.0) - 1) / 2;
  const double tol = 1e-8 * half;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > tol) {
    if (++it > 500) {
      std::ostringstream msg;
      msg << "golden-section search did not converge in bracket [" << a << ", " << b << "]";
      throw OptimizationError(msg.str());
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  out.iterations = it;
  out.detuning = (a + b) / 2;
  out.error = pre * f(out.detuning);
  return out;
}

StarkShift stark_photon_number(double chi_1, double scale_c, double amp) {
  if (!(scale_c > 0)) throw ValidationError("scale_c: must be positive");
  double n = sq(scale_c * amp);
  return {2 * chi_1 * n, n};
}

double dr_detuning_vs_photon(const SystemParams& p, double n_r) {
  if (!(n_r >= 0)) throw ValidationError("n_r: photon number must be nonnegative");
  return 2 * p.chi_dr * n_r + 2 * p.chi_dr_2 * n_r * n_r;
}

double drive_for_snr(const SystemParams& p, double snr, double duration, std::optional<double> kappa) {
  require_snr(snr);
  if (!(duration > 0)) throw ValidationError("duration: must be positive");
  SystemParams unit = p;
  unit.drive_amp = 1.0;
  double rate = measurement_rate(unit, kappa);
  if (!(rate > 0)) throw ValidationError("drive_for_snr: measurement rate vanishes at these params");
  return std::sqrt(snr / (rate * duration));
}

}  // namespace dualrail
