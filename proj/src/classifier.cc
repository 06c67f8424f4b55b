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

#include "dualrail/classifier.h"

#include <cmath>

namespace dualrail {

namespace {

complex mean_of(const std::vector<complex>& v) {
  complex s = 0.0;
  for (const auto& x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<complex> integrate(const MeasurementRecord& rec, const ClassifierConfig& cfg) {
  std::vector<complex> out;
  if (cfg.kernel == KernelKind::MatchedFilter) {
    const auto& w = cfg.matched_template;
    if (w.empty()) throw ValidationError("matched filter: empty template");
    if (rec.samples.size() < w.size()) throw ValidationError("record: shorter than the matched filter");
    complex acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] * rec.samples[i];
    out.push_back(acc);
    return out;
  }
  if (!(cfg.window > 0)) throw ValidationError("window: must be positive");
  if (!(rec.dt > 0)) throw ValidationError("record: dt must be positive");
  auto n = static_cast<size_t>(std::llround(cfg.window / rec.dt));
  if (n == 0) n = 1;
  if (rec.samples.size() < n) throw ValidationError("record: shorter than one integration window");
  size_t count = rec.samples.size() / n;
  out.reserve(count);
  for (size_t k = 0; k < count; ++k) {
    complex acc = 0.0;
    for (size_t i = k * n; i < (k + 1) * n; ++i) acc += rec.samples[i];
    out.push_back(acc / static_cast<double>(n));
  }
  return out;
}

double project(complex point, const ClassifierConfig& cfg) { return std::real(point * std::conj(cfg.projection_axis)); }

BinaryLabel classify_binary(complex point, const ClassifierConfig& cfg) {
  return project(point, cfg) >= cfg.threshold ? BinaryLabel::Erased : BinaryLabel::Logical;
}

CircularLabel classify_circular(complex point, const ClassifierConfig& cfg) {
  return std::abs(point - cfg.center) <= cfg.radius_sigma * cfg.sigma ? CircularLabel::Logical
                                                                       : CircularLabel::ErasedOrLeaked;
}

std::vector<BinaryLabel> classify_windows(const std::vector<complex>& points, const ClassifierConfig& cfg) {
  std::vector<BinaryLabel> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(classify_binary(p, cfg));
  return out;
}

double estimate_snr(const std::vector<complex>& a, const std::vector<complex>& b) {
  if (a.size() < 30 || b.size() < 30) throw ValidationError("estimate_snr: need at least 30 points per ensemble");
  complex ma = mean_of(a), mb = mean_of(b);
  complex d = mb - ma;
  double dist = std::abs(d);
  complex u = dist > 0 ? d / dist : complex(1.0, 0.0);
  double ss = 0;
  for (const auto& x : a) ss += std::pow(std::real((x - ma) * std::conj(u)), 2);
  for (const auto& x : b) ss += std::pow(std::real((x - mb) * std::conj(u)), 2);
  double var = ss / static_cast<double>(a.size() + b.size() - 2);
  if (!(var > 0)) throw ValidationError("estimate_snr: degenerate zero-variance ensembles");
  return dist * dist / (2 * var);
}

ClassifierConfig calibrate(const std::vector<complex>& logical, const std::vector<complex>& erased,
                           double radius_sigma) {
  if (!(radius_sigma > 0)) throw ValidationError("radius_sigma: must be positive");
  double snr = estimate_snr(logical, erased);
  if (snr < 0.1) throw ValidationError("calibrate: ensembles overlap (SNR < 0.1), cannot calibrate");
  ClassifierConfig cfg;
  cfg.mean_logical = mean_of(logical);
  cfg.mean_erased = mean_of(erased);
  complex d = cfg.mean_erased - cfg.mean_logical;
  cfg.projection_axis = d / std::abs(d);
  cfg.threshold = project((cfg.mean_logical + cfg.mean_erased) / 2.0, cfg);
  cfg.center = cfg.mean_logical;
  double ss = 0;
  for (const auto& x : logical) ss += std::norm(x - cfg.center);
  cfg.sigma = std::sqrt(ss / (2.0 * static_cast<double>(logical.size() - 1)));
  cfg.radius_sigma = radius_sigma;
  cfg.snr = snr;
  return cfg;
}

ClassifierConfig build_matched_filter(const std::vector<MeasurementRecord>& logical,
                                      const std::vector<MeasurementRecord>& erased) {
  if (logical.empty() || erased.empty()) throw ValidationError("matched filter: empty calibration set");
  size_t n = logical[0].samples.size();
  for (const auto* set : {&logical, &erased}) {
    for (const auto& r : *set) {
      if (r.samples.size() != n) throw ValidationError("matched filter: calibration records differ in length");
    }
  }
  std::vector<complex> ml(n, 0.0), me(n, 0.0);
  for (const auto& r : logical)
    for (size_t i = 0; i < n; ++i) ml[i] += r.samples[i];
  for (const auto& r : erased)
    for (size_t i = 0; i < n; ++i) me[i] += r.samples[i];
  ClassifierConfig cfg;
  cfg.kernel = KernelKind::MatchedFilter;
  cfg.window = logical[0].duration();
  cfg.matched_template.resize(n);
  double norm = 0;
  for (size_t i = 0; i < n; ++i) {
    complex d = me[i] / static_cast<double>(erased.size()) - ml[i] / static_cast<double>(logical.size());
    cfg.matched_template[i] = std::conj(d);
    norm += std::norm(d);
  }
  if (!(norm > 0)) throw ValidationError("matched filter: no mean separation between ensembles");
  for (auto& w : cfg.matched_template) w /= norm;
  return cfg;
}

double missed_erasure_fraction(int checks_between, double erasure_per_check, double false_negative) {
  if (checks_between < 0) throw ValidationError("checks_between: must be nonnegative");
  if (!(erasure_per_check >= 0 && erasure_per_check <= 1)) throw ValidationError("erasure_per_check: must lie in [0, 1]");
  if (!(false_negative >= 0 && false_negative <= 1)) throw ValidationError("false_negative: must lie in [0, 1]");
  return checks_between * erasure_per_check * false_negative;
}

}  // namespace dualrail
