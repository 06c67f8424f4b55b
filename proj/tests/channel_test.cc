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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.h"

using namespace dualrail;

namespace {

using Mat = oracle::Mat2;
using oracle::kraus;
using oracle::kraus_apply;
using oracle::kraus_fidelity;

ErrorChannelParams random_channel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  ErrorChannelParams ch{u(rng), u(rng)};
  return ch;
}

}  // namespace

TEST(ApplyCheck, IdentityChannel) {
  Bloch b{0.3, -0.4, 0.5};
  EXPECT_EQ(apply_check(b, {}), b);
}

TEST(ApplyCheck, MatchesKrausMap) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.57, 0.57);
  for (int i = 0; i < 100; ++i) {
    auto ch = random_channel(rng);
    Bloch b{u(rng), u(rng), u(rng)};
    auto a = apply_check(b, ch), k = kraus_apply(b, ch);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a[j], k[j], 1e-14);
    auto trace = [](const Mat& m) { return m.trace(); };
    Mat sum = Mat::Zero();
    for (const auto& kk : kraus(ch)) sum += kk.adjoint() * kk;
    EXPECT_NEAR(std::abs(trace(sum) - 2.0), 0.0, 1e-14);
  }
}

TEST(ApplyCheck, DecayLawsAfterRepeatedChecks) {
  ErrorChannelParams ch{2.8e-4, 8e-5};
  Bloch z{0, 0, 1}, x{1, 0, 0};
  for (long n = 1; n <= 2000; ++n) {
    z = apply_check(z, ch);
    x = apply_check(x, ch);
    if (n % 250 == 0) {
      EXPECT_NEAR(z[2], std::pow(1 - ch.p1, n), 1e-12);
      EXPECT_NEAR(x[0], std::pow(1 - ch.p1 / 2 - ch.p_phi, n), 1e-12);
      EXPECT_NEAR(apply_checks({1, 0, 1}, ch, n)[0], x[0], 1e-12);
    }
  }
}

TEST(ApplyCheck, NeverIncreasesBlochNorm) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    Bloch b{g(rng), g(rng), g(rng)};
    double n = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    for (auto& v : b) v /= n;
    auto ch = random_channel(rng);
    auto a = apply_check(b, ch);
    EXPECT_LE(std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]), 1 + 1e-15);
  }
}

TEST(AvgFidelity, ClosedFormEqualsKraus) {
  EXPECT_EQ(avg_fidelity({0, 0}), 1.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto ch = random_channel(rng);
    EXPECT_NEAR(avg_fidelity(ch), kraus_fidelity(ch), 1e-14);
  }
}

TEST(AvgFidelity, InducedRows) {
  ErrorChannelParams ch{2.8e-4, 8e-5};
  EXPECT_NEAR(ch.p1 / 3, 9.3e-5, 1e-6);
  EXPECT_NEAR(ch.p_phi / 3, 2.7e-5, 1e-6);
  EXPECT_NEAR(infidelity(ch), 1.2e-4, 1e-18);
}

TEST(ExtractPPhi, Examples) {
  EXPECT_NEAR(extract_p_phi(2.2e-4, 2.8e-4), 8e-5, 1e-18);
  EXPECT_EQ(extract_p_phi(1.4e-4, 2.8e-4), 0.0);
  EXPECT_THROW(extract_p_phi(1e-4, 2.8e-4), ValidationError);
}

TEST(ExtractPPhi, RoundTripThroughDecayLaws) {
  ErrorChannelParams ch{3e-3, 1e-3};
  long n = 50;
  double z = apply_checks({0, 0, 1}, ch, n)[2], x = apply_checks({1, 0, 0}, ch, n)[0];
  double p1 = 1 - std::pow(z, 1.0 / n), p2 = 1 - std::pow(x, 1.0 / n);
  EXPECT_NEAR(extract_p_phi(p2, p1), ch.p_phi, 1e-13);
}

TEST(Compose, MultipliesEigenvalues) {
  ErrorChannelParams a{1e-3, 2e-3}, b{4e-3, 1e-4};
  Bloch v{0.5, 0.1, -0.7};
  auto seq = apply_check(apply_check(v, a), b);
  auto one = apply_check(v, compose(a, b));
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(seq[j], one[j], 1e-15);
}

TEST(Channel, Validation) {
  EXPECT_THROW(require_valid(ErrorChannelParams{-0.1, 0}), ValidationError);
  EXPECT_THROW(require_valid(ErrorChannelParams{1.0, 1.1}), ValidationError);
  EXPECT_NO_THROW(require_valid(ErrorChannelParams{1.0, 1.0}));
}

TEST(Channel, X90AndIdleMaps) {
  auto g = x90_channel(9e-5);
  EXPECT_NEAR(infidelity(g), 9e-5, 1e-18);
  EXPECT_NEAR(1 - g.p1, 1 - g.p2(), 1e-18);
  auto idle = idle_channel(496e-9, 2176e-6, 1490e-6);
  EXPECT_NEAR(idle.p1 / 3, 7.6e-5, 1e-6);
  EXPECT_NEAR(idle.p_phi / 3, 1.11e-4, 1e-6);
}

TEST(Budget, ReferenceRows) {
  std::vector<BudgetEntry> rows{{"idle T1", "", 7.7e-5},
                                {"idle dephasing", "", 1.11e-4},
                                {"echo", "", 1.8e-4},
                                {"bit flip", "", 9.3e-5},
                                {"dephasing", "", 2.7e-5}};
  auto b = build_budget(rows, 6.0e-4);
  EXPECT_NEAR(b.accounted_total(), 4.88e-4, 1e-18);
  EXPECT_NEAR(b.accounted_total(), 4.9e-4, 5e-6);
  EXPECT_NEAR(b.fraction_accounted(), 0.813, 1e-3);
  std::reverse(rows.begin(), rows.end());
  EXPECT_NEAR(build_budget(rows).accounted_total(), b.accounted_total(), 1e-19);
  EXPECT_NE(b.render_table().find("total accounted"), std::string::npos);
  EXPECT_NE(b.to_csv().find("label,expression,probability"), std::string::npos);
}

TEST(Budget, EmptyAndStandard) {
  EXPECT_EQ(build_budget({}).accounted_total(), 0.0);
  auto rows = standard_budget_components(496e-9, 2176e-6, 1490e-6, 9e-5, {2.8e-4, 8e-5});
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows[2].probability, 1.8e-4, 1e-18);
  EXPECT_THROW(build_budget({{"bad", "", -1}}), ValidationError);
}

TEST(NoiseBias, Examples) {
  EXPECT_NEAR(noise_bias(2.54e-2, 6.0e-4), 42.333333333333, 1e-9);
  EXPECT_EQ(noise_bias(0.3, 0.3), 1.0);
  EXPECT_NEAR(noise_bias(3.12e-2, 5.4e-4), 57.777777777778, 1e-9);
  EXPECT_THROW(noise_bias(0.1, 0), ValidationError);
}

TEST(HeatingTime, Examples) {
  EXPECT_NEAR(heating_time(30e-6, 0.0023), 13e-3, 0.1 * 13e-3);
  EXPECT_EQ(heating_time(5e-6, 1), 5e-6);
  EXPECT_NEAR(heating_time(24e-6, 0.0023), 10.4348e-3, 1e-6);
  EXPECT_THROW(heating_time(1, 0), ValidationError);
}
