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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dualrail;

namespace {

// RK4 integration of d alpha/dt = -i eps - (kappa/2 + i delta) alpha from an empty cavity.
complex integrate_field(double eps, double kappa, double delta, double t_end, int steps) {
  complex a = 0.0;
  double h = t_end / steps;
  auto rhs = [&](complex x) { return complex(0, -eps) - complex(kappa / 2, delta) * x; };
  for (int i = 0; i < steps; ++i) {
    complex k1 = rhs(a), k2 = rhs(a + 0.5 * h * k1), k3 = rhs(a + 0.5 * h * k2), k4 = rhs(a + h * k3);
    a += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

SystemParams driven() {
  SystemParams p;
  p.drive_amp = 6.0e7;
  return p;
}

}  // namespace

TEST(SteadyStates, NoDriveMeansEmptyCavity) {
  SystemParams p;
  auto s = steady_states(p);
  EXPECT_EQ(s.alpha_0, 0.0);
  EXPECT_EQ(s.alpha_gg, 0.0);
  EXPECT_EQ(s.n_gg, 0.0);
}

TEST(SteadyStates, MatchedCaseHasEqualLogicalFields) {
  auto p = driven();
  p.chi_dr = 0;
  auto s = steady_states(p);
  EXPECT_EQ(s.alpha_0, s.alpha_1);
}

TEST(SteadyStates, GroundStatePhotonNumberAgainstOde) {
  double kappa = 1e7;
  SystemParams p;
  p.kappa_gg = kappa;
  p.drive_amp = kappa;
  p.drive_detuning = 0;
  p.chi = kappa / 2;
  p.chi_dr = 0;
  auto s = steady_states(p);
  EXPECT_NEAR(s.n_gg, 2.0, 1e-12);
  complex ode = integrate_field(p.drive_amp, kappa, detuning_gg(p), 40 / kappa, 40000);
  EXPECT_NEAR(std::norm(ode), 2.0, 1e-8);
  EXPECT_NEAR(std::abs(ode - s.alpha_gg) / std::abs(s.alpha_gg), 0.0, 1e-8);
}

TEST(SteadyStates, DefaultKappaIsErasedLinewidth) {
  auto p = driven();
  auto a = steady_states(p);
  auto b = steady_states(p, p.kappa_gg);
  auto c = steady_states(p, p.kappa_logical);
  EXPECT_EQ(a.alpha_gg, b.alpha_gg);
  EXPECT_NE(a.alpha_gg, c.alpha_gg);
}

TEST(PhotonRatio, SymmetricDriveGivesOne) {
  auto p = driven();
  p.drive_detuning = 0;
  EXPECT_EQ(photon_ratio(p), 1.0);
}

TEST(PhotonRatio, NoShiftGivesOne) {
  auto p = driven();
  p.chi = 0;
  EXPECT_EQ(photon_ratio(p), 1.0);
}

TEST(PhotonRatio, MatchesSteadyStateNumbersAtOptimum) {
  double kappa = 2e7;
  SystemParams p;
  p.kappa_gg = kappa;
  p.chi = -kappa / 2;
  p.chi_dr = 0;
  p.drive_amp = 3e6;
  p.drive_detuning = -std::sqrt(2.0) * kappa / 2;
  auto s = steady_states(p);
  // Frozen from steady_states: (1 + (sqrt2 - 1)^2) / (1 + (sqrt2 + 1)^2) for this sign of chi.
  EXPECT_NEAR(photon_ratio(p), 1 / 5.82842712474619, 1e-12);
  EXPECT_NEAR(photon_ratio(p) / (s.n_dr / s.n_gg), 1.0, 1e-12);
}

TEST(PhotonRatio, EqualsSteadyStateRatioOnRandomDraws) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    SystemParams p;
    p.chi = mhz(5 * u(rng));
    p.chi_dr = 0;
    p.drive_detuning = mhz(20 * u(rng));
    p.drive_amp = 1e7;
    auto s = steady_states(p);
    EXPECT_NEAR(photon_ratio(p) / (s.n_dr / s.n_gg), 1.0, 1e-12);
  }
}

TEST(MeasurementRate, ZeroWithoutDrive) { EXPECT_EQ(measurement_rate(SystemParams{}), 0.0); }

TEST(MeasurementRate, ZeroWithoutShift) {
  auto p = driven();
  p.chi = 0;
  p.chi_dr = 0;
  EXPECT_EQ(measurement_rate(p), 0.0);
}

TEST(MeasurementRate, ClosedFormEqualsFieldSeparation) {
  auto p = driven();
  p.chi_dr = 0;
  EXPECT_NEAR(measurement_rate(p) / measurement_rate_exact(p), 1.0, 1e-9);
  auto q = driven();
  double rel = std::abs(measurement_rate(q) / measurement_rate_exact(q) - 1);
  EXPECT_LT(rel, 10 * std::pow(q.chi_dr / q.chi, 2));
}

TEST(MeasurementRate, DriveCalibrationRoundTrip) {
  SystemParams p;
  double t = 384e-9;
  p.drive_amp = drive_for_snr(p, 11.6, t);
  EXPECT_NEAR(measurement_rate(p) * t, 11.6, 1e-9);
  // Independent inversion of the closed form.
  double a = p.kappa_gg / 2;
  double dp = a * a + std::pow(p.drive_detuning + p.chi, 2), dm = a * a + std::pow(p.drive_detuning - p.chi, 2);
  double eps = std::sqrt(11.6 / t * dp * dm / (2 * p.kappa_gg * p.eta_eff * 4 * p.chi * p.chi));
  EXPECT_NEAR(p.drive_amp / eps, 1.0, 1e-12);
}

TEST(DephasingRate, ZeroWhenMatched) {
  auto p = driven();
  p.chi_dr = 0;
  EXPECT_EQ(dephasing_rate(p), 0.0);
  EXPECT_EQ(dephasing_rate_approx(p), 0.0);
}

TEST(DephasingRate, ZeroWithoutDrive) { EXPECT_EQ(dephasing_rate(SystemParams{}), 0.0); }

TEST(DephasingRate, ExactIsPositiveClosedForm) {
  auto p = driven();
  double a = p.kappa_gg / 2;
  double d0 = a * a + std::pow(detuning_0L(p), 2), d1 = a * a + std::pow(detuning_1L(p), 2);
  double closed = 2 * p.drive_amp * p.drive_amp * p.chi_dr * p.chi_dr * p.kappa_gg / (d0 * d1);
  EXPECT_GT(dephasing_rate(p), 0);
  EXPECT_NEAR(dephasing_rate(p) / closed, 1.0, 1e-9);
}

TEST(DephasingRate, ApproximationAgreesOnRandomDraws) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 10; ++i) {
    SystemParams p;
    p.chi = -mhz(1 + 5 * u(rng));
    p.chi_dr = p.chi * 1e-2 * (2 * u(rng) - 1);
    p.kappa_gg = mhz(2 + 20 * u(rng));
    p.drive_detuning = -3 * p.kappa_gg * u(rng);
    p.drive_amp = 1e7 * (0.1 + u(rng));
    // The denominators differ by 2 chi_dr^2 (a^2 - x^2) + chi_dr^4 with x = delta + chi.
    double rel = std::abs(dephasing_rate_approx(p) / dephasing_rate(p) - 1);
    EXPECT_LE(rel, 2 * std::pow(p.chi_dr / p.chi, 2));
  }
}

TEST(SeparationError, Anchors) {
  EXPECT_EQ(separation_error(0), 0.5);
  EXPECT_NEAR(separation_error(11.6), 0.008, 0.0005);
  EXPECT_NEAR(separation_error(16.1), 0.0023, 0.0001);
  EXPECT_NEAR(separation_error(19), 0.001, 0.0001);
  EXPECT_THROW(separation_error(-1), ValidationError);
}

TEST(SeparationError, StrictlyDecreasing) {
  double prev = separation_error(0);
  for (double s = 0.5; s < 200; s *= 1.3) {
    double e = separation_error(s);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(separation_error(1e4), 1e-300);
}

TEST(InducedDephasing, ZeroWhenMatched) {
  auto p = driven();
  p.chi_dr = 0;
  EXPECT_EQ(induced_dephasing_error(10, p), 0.0);
}

TEST(InducedDephasing, RejectsZeroChi) {
  SystemParams p;
  p.chi = 0;
  p.chi_dr = 0;
  EXPECT_THROW(induced_dephasing_error(10, p), ValidationError);
}

TEST(InducedDephasing, RateRatioIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 20; ++i) {
    SystemParams p;
    p.chi = -mhz(1 + 5 * u(rng));
    p.chi_dr = p.chi * 1e-3 * u(rng);
    p.drive_detuning = mhz(-20 + 40 * u(rng));
    p.drive_amp = 5e7;
    double snr = 1 + 30 * u(rng);
    double via_rates = dephasing_rate_approx(p) / measurement_rate(p) * snr / 3;
    EXPECT_NEAR(induced_dephasing_error(snr, p) / via_rates, 1.0, 1e-9);
    double via_exact = dephasing_rate(p) / measurement_rate(p) * snr / 3;
    EXPECT_NEAR(induced_dephasing_error(snr, p) / via_exact, 1.0, 1e-6);
  }
}

namespace {

SystemParams worked_example() {
  SystemParams p;
  p.eta_eff = 0.2;
  p.chi = mhz(-4);
  p.chi_dr = p.chi * 1e-2;
  p.kappa_gg = 2 * std::abs(p.chi);
  return p;
}

}  // namespace

TEST(InducedDephasing, WorkedExampleAsymptoticBranch) {
  auto m = min_dephasing_error(19, worked_example());
  EXPECT_NEAR(m.asymptotic_error, 3.9583333333333e-4, 1e-15);
}

TEST(InducedDephasing, WorkedExampleExactOptimum) {
  auto p = worked_example();
  auto m = min_dephasing_error(19, p);
  // Brute-force scan as the oracle.
  double best = 1;
  for (int i = -200000; i <= 200000; ++i) {
    p.drive_detuning = i * 1e-4 * p.kappa_gg;
    best = std::min(best, induced_dephasing_error(19, p));
  }
  EXPECT_NEAR(m.error, 1.3582852624259955e-4, 1e-15);
  EXPECT_NEAR(best / m.error, 1.0, 1e-6);
}

TEST(MinDephasing, OptimalDetuningFollowsChiSign) {
  SystemParams p;
  auto m = min_dephasing_error(10, p);
  EXPECT_NEAR(m.optimal_detuning, -std::hypot(p.kappa_gg / 2, p.chi), 1e-6);
  p.chi = -p.chi;
  p.drive_detuning = -p.drive_detuning;
  EXPECT_GT(min_dephasing_error(10, p).optimal_detuning, 0);
}

TEST(MinDephasing, RegimeFactors) {
  EXPECT_NEAR(optimal_ratio_factor(1.0), std::pow(std::sqrt(2.0) - 1, 2), 1e-15);
  EXPECT_NEAR(optimal_ratio_factor(1e-8), 1.0, 1e-7);
  // Large ratio: the factor tends to (kappa/2chi)^2 / 4, half the asymptotic branch.
  for (double x : {1e2, 1e3, 1e5}) {
    EXPECT_NEAR(optimal_ratio_factor(x) * 4 * x * x, 1.0, 1.0 / (x * x));
  }
  SystemParams p;
  p.kappa_gg = std::abs(p.chi) * 2e-3;
  auto m = min_dephasing_error(19, p);
  EXPECT_NEAR(m.error / m.asymptotic_error, 0.5, 1e-5);
}

TEST(MinDephasing, GlobalMinimumOnRandomDraws) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    SystemParams p;
    p.chi = mhz(-5 + 10 * u(rng));
    if (p.chi == 0) continue;
    p.chi_dr = p.chi * 1e-2;
    p.kappa_gg = mhz(1 + 20 * u(rng));
    p.drive_detuning = mhz(-50 + 100 * u(rng));
    auto m = min_dephasing_error(12, p);
    EXPECT_LE(m.error, induced_dephasing_error(12, p) * (1 + 1e-12));
  }
}

TEST(OptimizeNumeric, MatchedCaseIsZero) {
  SystemParams p;
  p.chi_dr = 0;
  EXPECT_EQ(optimize_detuning_numeric(10, p).error, 0.0);
}

TEST(OptimizeNumeric, UnitRatioMatchesClosedForm) {
  auto p = worked_example();
  auto num = optimize_detuning_numeric(19, p);
  auto closed = min_dephasing_error(19, p);
  EXPECT_NEAR(num.error / closed.error, 1.0, 1e-6);
  EXPECT_NEAR(num.detuning, closed.optimal_detuning, 1e-4 * p.kappa_gg);
}

TEST(OptimizeNumeric, LargeRatioMatchesLimit) {
  auto p = worked_example();
  p.kappa_gg = 2 * std::abs(p.chi) / 10;
  auto num = optimize_detuning_numeric(19, p);
  double pre = 19 / (12 * p.eta_eff) * 1e-4;
  EXPECT_NEAR(num.error / (pre / (4 * 100.0)), 1.0, 0.01);
  auto closed = min_dephasing_error(19, p);
  EXPECT_NEAR(num.error / closed.error, 1.0, 1e-6);
  EXPECT_NEAR(num.detuning, closed.optimal_detuning, 1e-4 * p.kappa_gg);
}

TEST(StarkPhotonNumber, Examples) {
  auto z = stark_photon_number(mhz(-4), 2.0, 0.0);
  EXPECT_EQ(z.shift, 0.0);
  EXPECT_EQ(z.n_r, 0.0);
  auto a = stark_photon_number(mhz(-4), 2.0, 0.5);
  EXPECT_NEAR(a.shift, mhz(-8), 1e-6);
  EXPECT_NEAR(a.n_r, 1.0, 1e-15);
  auto b = stark_photon_number(mhz(-4), 2.0, 1.0);
  EXPECT_NEAR(b.shift / a.shift, 4.0, 1e-12);
  EXPECT_NEAR(b.n_r / a.n_r, 4.0, 1e-12);
  EXPECT_THROW(stark_photon_number(1, 0, 1), ValidationError);
}

TEST(DrDetuning, Polynomial) {
  SystemParams p;
  EXPECT_EQ(dr_detuning_vs_photon(p, 0), 0.0);
  EXPECT_NEAR(dr_detuning_vs_photon(p, 1), khz(-2.8), 1e-9);
  p.chi_dr_2 = 0;
  EXPECT_NEAR(dr_detuning_vs_photon(p, 3), 3 * dr_detuning_vs_photon(p, 1), 1e-9);
  EXPECT_THROW(dr_detuning_vs_photon(p, -1), ValidationError);
}
