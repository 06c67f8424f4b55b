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

#ifndef DUALRAIL_FITTING_H
#define DUALRAIL_FITTING_H

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualrail {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0;  ///< sqrt of the weighted sum of squared residuals
  double chi2 = 0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> flags;

  double value(const std::string& name) const;
  double sigma(const std::string& name) const;
  bool flagged() const { return !flags.empty(); }
  std::string to_csv() const;
};

struct FitOptions {
  /// Per-point 1-sigma uncertainties; empty means unweighted.
  std::vector<double> sigma;
  /// Use sigma as absolute instead of rescaling the covariance by reduced chi^2.
  bool absolute_sigma = false;
  int max_iterations = 500;
};

/// model(x, params, grad) returns f(x; params) and fills d f / d params.
using ModelFn = std::function<double(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Damped least squares with an analytic Jacobian.
FitResult levenberg_marquardt(const ModelFn& model, const std::vector<double>& x,
                              const std::vector<double>& y, Eigen::VectorXd initial,
                              std::vector<std::string> names, const FitOptions& opts = {});

/// y = A p^x + B with B held at `fixed_offset`. Parameters "A" and "p".
FitResult fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, double fixed_offset,
                        const FitOptions& opts = {});

/// Two Lorentzian peaks a / (1 + ((f - c) / (w/2))^2) with full widths w.
/// Parameters "c1", "w1", "a1", "c2", "w2", "a2" with c1 < c2.
FitResult fit_lorentzian_pair(const std::vector<double>& freq, const std::vector<double>& response,
                              const FitOptions& opts = {});

/// detuning = b1 n + b2 n^2. Parameters "b1" (= 2 chi_dr) and "b2" (= 2 chi_dr_2).
FitResult fit_poly2_through_origin(const std::vector<double>& n_r, const std::vector<double>& detuning,
                                   const FitOptions& opts = {});

struct ErrorRate {
  double value = 0;
  double sigma = 0;
  bool flagged = false;  ///< interleaved decay slower than reference
};

/// (1 - p_ref)/2.
ErrorRate rb_error_from_decay(double p_ref, double sigma_ref = 0);

/// (1 - p_int/p_ref)/2.
ErrorRate ilrb_error_from_decays(double p_int, double p_ref, double sigma_int = 0, double sigma_ref = 0);

/// 1 - p_int/p_ref, the loss per interleaved operation in a postselection decay.
ErrorRate loss_from_decays(double p_int, double p_ref, double sigma_int = 0, double sigma_ref = 0);

}  // namespace dualrail

#endif  // DUALRAIL_FITTING_H
