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

#include <gtest/gtest.h>

#include <cmath>

using namespace dualrail;

TEST(Validate, DefaultDeviceIsValid) {
  SystemParams p;
  EXPECT_DOUBLE_EQ(p.eta_eff, 0.125);
  EXPECT_DOUBLE_EQ(p.chi, kTwoPi * -4.25e6);
  EXPECT_DOUBLE_EQ(p.kappa_gg, kTwoPi * 12.4e6);
  EXPECT_TRUE(validate(p).ok());
}

TEST(Validate, ZeroEfficiencyRejected) {
  SystemParams p;
  p.eta_eff = 0;
  auto r = validate(p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.summary().find("efficiency must be positive"), std::string::npos);
}

TEST(Validate, MismatchRegimeViolated) {
  SystemParams p;
  p.chi_dr = 2 * std::abs(p.chi);
  auto r = validate(p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.summary().find("mismatch regime violated"), std::string::npos);
  EXPECT_THROW(require_valid(p), ValidationError);
}

TEST(Validate, ReportsEveryViolation) {
  SystemParams p;
  p.eta_eff = 0.7;
  p.kappa_gg = -1;
  p.readout_degradation = 0.5;
  p.mist_prob_per_check = 1.0;
  p.t_heat = 0;
  EXPECT_EQ(validate(p).problems.size(), 5u);
}

TEST(Validate, IsPure) {
  SystemParams p;
  p.eta_eff = 0;
  EXPECT_EQ(validate(p).problems, validate(p).problems);
}

TEST(Noiseless, DisablesStochasticProcesses) {
  auto p = noiseless(SystemParams{});
  EXPECT_TRUE(std::isinf(p.t_erasure_0L));
  EXPECT_TRUE(std::isinf(p.t_heat));
  EXPECT_EQ(p.x90_error, 0.0);
  EXPECT_TRUE(validate(p).ok());
}

TEST(DualRailState, BlochNormChecked) {
  EXPECT_NO_THROW(DualRailState::logical(1, 0, 0));
  EXPECT_THROW(DualRailState::logical(1, 1, 0), ValidationError);
  EXPECT_DOUBLE_EQ(DualRailState::one().bloch[2], -1.0);
  EXPECT_EQ(DualRailState::erased().sector, Sector::Erased);
}

TEST(MeasurementRecord, DurationIsLengthTimesDt) {
  MeasurementRecord r;
  r.dt = 2e-9;
  r.samples.resize(240);
  EXPECT_NEAR(r.duration(), 480e-9, 1e-20);
}

TEST(DualRailGap, SymmetryPoint) {
  EXPECT_DOUBLE_EQ(dual_rail_gap(3.0, 0.0), 6.0);
}

TEST(DualRailGap, DeviceGap) {
  EXPECT_NEAR(dual_rail_gap(mhz(47.075), 0.0), mhz(94.15), 1e-6);
}

TEST(DualRailGap, DoublesAtRootThreeDetuning) {
  double g = 1.7;
  EXPECT_NEAR(dual_rail_gap(g, 2 * g * std::sqrt(3.0)), 4 * g, 1e-12);
}

TEST(DualRailGap, EvenMonotoneAndFlatAtOrigin) {
  double g = mhz(47.075);
  double prev = 0;
  for (int k = 0; k <= 50; ++k) {
    double d = k * mhz(2);
    EXPECT_DOUBLE_EQ(dual_rail_gap(g, d), dual_rail_gap(g, -d));
    EXPECT_GE(dual_rail_gap(g, d), prev);
    prev = dual_rail_gap(g, d);
  }
  double h = khz(1);
  double slope = (dual_rail_gap(g, h) - dual_rail_gap(g, -h)) / (2 * h);
  EXPECT_EQ(slope, 0.0);
}

TEST(DualRailGap, RejectsNonpositiveCoupling) {
  EXPECT_THROW(dual_rail_gap(0.0, 1.0), ValidationError);
}
