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

#ifndef DUALRAIL_CHANNEL_H
#define DUALRAIL_CHANNEL_H

#include <string>
#include <vector>

#include "dualrail/core.h"

namespace dualrail {

/// Per-check logical Pauli channel: bit flip p1 (X and Y each with p1/4) and
/// pure dephasing p_phi (Z with p_phi/2).
struct ErrorChannelParams {
  double p1 = 0;
  double p_phi = 0;

  /// Total transverse decay per check, p1/2 + p_phi.
  double p2() const { return p1 / 2 + p_phi; }
  bool operator==(const ErrorChannelParams&) const = default;
};

struct PauliProbabilities {
  double px = 0;
  double py = 0;
  double pz = 0;
  double identity() const { return 1 - px - py - pz; }
};

void require_valid(const ErrorChannelParams& ch);
PauliProbabilities pauli_probabilities(const ErrorChannelParams& ch);

/// Bloch-vector action of one check.
Bloch apply_check(const Bloch& bloch, const ErrorChannelParams& ch);

/// Closed-form action of `n` consecutive checks.
Bloch apply_checks(const Bloch& bloch, const ErrorChannelParams& ch, long n);

/// Channel equivalent to applying `first` then `second`.
ErrorChannelParams compose(const ErrorChannelParams& first, const ErrorChannelParams& second);

double avg_fidelity(const ErrorChannelParams& ch);
double infidelity(const ErrorChannelParams& ch);

/// p2 - p1/2; throws ValidationError if the result would be negative.
double extract_p_phi(double p2, double p1);

/// Depolarizing channel of an X90 gate with average infidelity `eps`.
ErrorChannelParams x90_channel(double eps);

/// Idle decoherence over `duration` for the given logical T1 and pure-dephasing time.
ErrorChannelParams idle_channel(double duration, double t1, double t_phi);

struct BudgetEntry {
  std::string label;
  std::string expression;
  double probability = 0;
};

struct ErrorBudget {
  std::vector<BudgetEntry> entries;
  double measured_total = 0;

  double accounted_total() const;
  /// accounted / measured, or 0 if nothing was measured.
  double fraction_accounted() const;
  std::string render_table() const;
  std::string to_csv() const;
};

ErrorBudget build_budget(const std::vector<BudgetEntry>& components, double measured_total = 0);

/// The five standard per-check contributions for a check of length `check_time`.
std::vector<BudgetEntry> standard_budget_components(double check_time, double t1, double t_phi,
                                                    double x90_error, const ErrorChannelParams& induced);

double noise_bias(double erasure_per_check, double residual_per_check);
double heating_time(double t_erasure, double p_equil);

}  // namespace dualrail

#endif  // DUALRAIL_CHANNEL_H
