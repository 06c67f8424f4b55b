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

#ifndef DUALRAIL_CLASSIFIER_H
#define DUALRAIL_CLASSIFIER_H

#include <vector>

#include "dualrail/core.h"

namespace dualrail {

enum class KernelKind { Boxcar, MatchedFilter };

struct ClassifierConfig {
  KernelKind kernel = KernelKind::Boxcar;
  double window = 480e-9;  ///< boxcar length, seconds
  /// Matched-filter weights, one per record sample.
  std::vector<complex> matched_template;

  complex projection_axis = 1.0;  ///< unit vector from the logical toward the erased mean
  double threshold = 0;           ///< on the projection; at or beyond it means Erased

  complex center = 0.0;     ///< logical mean
  double sigma = 1.0;       ///< per-quadrature std of the logical cluster
  double radius_sigma = 3;  ///< circular radius in units of sigma

  complex mean_logical = 0.0;
  complex mean_erased = 0.0;
  double snr = 0;
};

enum class BinaryLabel { Logical, Erased };
enum class CircularLabel { Logical, ErasedOrLeaked };

/// Boxcar: one mean per full window, trailing partial window dropped.
/// Matched filter: one weighted point per record.
std::vector<complex> integrate(const MeasurementRecord& record, const ClassifierConfig& config);

double project(complex point, const ClassifierConfig& config);
BinaryLabel classify_binary(complex point, const ClassifierConfig& config);
CircularLabel classify_circular(complex point, const ClassifierConfig& config);

/// Labels for consecutive windows of a continuous record.
std::vector<BinaryLabel> classify_windows(const std::vector<complex>& points, const ClassifierConfig& config);

/// |mean_b - mean_a|^2 / (2 pooled variance along the separation axis).
double estimate_snr(const std::vector<complex>& points_a, const std::vector<complex>& points_b);

/// Axis and midpoint threshold from labeled ensembles; circular center and
/// sigma from the logical ensemble.
ClassifierConfig calibrate(const std::vector<complex>& points_logical, const std::vector<complex>& points_erased,
                           double radius_sigma = 3.0);

/// Template conj(mean erased record - mean logical record), normalized so the
/// filtered means differ by one unit.
ClassifierConfig build_matched_filter(const std::vector<MeasurementRecord>& logical,
                                      const std::vector<MeasurementRecord>& erased);

double missed_erasure_fraction(int checks_between, double erasure_per_check, double false_negative);

}  // namespace dualrail

#endif  // DUALRAIL_CLASSIFIER_H
