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

#include "dualrail/fitting.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dualrail {

namespace {

void check_xy(const std::vector<double>& x, const std::vector<double>& y, size_t min_points) {
  if (x.size() != y.size()) throw FitError("fit: x and y lengths differ");
  if (x.size() < min_points) {
    throw FitError("fit: need at least " + std::to_string(min_points) + " points");
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitError("fit: non-finite data");
  }
}

Eigen::VectorXd weights_of(const FitOptions& opts, size_t n) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  if (opts.sigma.empty()) return w;
  if (opts.sigma.size() != n) throw FitError("fit: sigma length differs from data");
  for (size_t i = 0; i < n; ++i) {
    if (!(opts.sigma[i] > 0)) throw FitError("fit: sigma entries must be positive");
    w[static_cast<Eigen::Index>(i)] = 1.0 / (opts.sigma[i] * opts.sigma[i]);
  }
  return w;
}

void finish_covariance(FitResult& r, const Eigen::MatrixXd& jtwj, const FitOptions& opts) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtwj);
  if (!lu.isInvertible()) {
    r.covariance = Eigen::MatrixXd::Constant(jtwj.rows(), jtwj.cols(), std::nan(""));
    r.flags.push_back("singular normal matrix");
    return;
  }
  double scale = 1.0;
  bool rescale = opts.sigma.empty() || !opts.absolute_sigma;
  if (rescale && r.dof > 0) scale = r.chi2 / r.dof;
  r.covariance = lu.inverse() * scale;
  r.covariance = (r.covariance + r.covariance.transpose()) / 2;
}

}  // namespace

double FitResult::value(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return params[static_cast<Eigen::Index>(i)];
  }
  throw std::out_of_range("fit has no parameter '" + name + "'");
}

double FitResult::sigma(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    if (names[i] == name) return std::sqrt(std::max(0.0, covariance(k, k)));
  }
  throw std::out_of_range("fit has no parameter '" + name + "'");
}

std::string FitResult::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "parameter,value,sigma\n";
  for (const auto& n : names) out << n << "," << value(n) << "," << sigma(n) << "\n";
  return out.str();
}

FitResult levenberg_marquardt(const ModelFn& model, const std::vector<double>& x,
                              const std::vector<double>& y, Eigen::VectorXd p,
                              std::vector<std::string> names, const FitOptions& opts) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto k = p.size();
  if (static_cast<Eigen::Index>(names.size()) != k) throw FitError("fit: parameter name count mismatch");
  if (n < k) throw FitError("fit: fewer points than parameters");
  Eigen::VectorXd w = weights_of(opts, x.size());

  Eigen::MatrixXd jac(n, k);
  Eigen::VectorXd res(n), grad(k);
  auto evaluate = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r, Eigen::MatrixXd* j) {
    double cost = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double f = model(x[i], q, grad);
      r[i] = y[i] - f;
      cost += w[i] * r[i] * r[i];
      if (j) j->row(i) = grad.transpose();
    }
    return cost;
  };

  FitResult r;
  r.names = std::move(names);
  double cost = evaluate(p, res, &jac);
  if (!std::isfinite(cost)) throw FitError("fit: model not finite at initial guess");
  double lambda = 1e-3;
  Eigen::VectorXd trial_res(n);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd jtwj = jac.transpose() * w.asDiagonal() * jac;
    Eigen::VectorXd jtwr = jac.transpose() * (w.array() * res.array()).matrix();
    bool improved = false;
    bool tiny_step = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd a = jtwj;
      for (Eigen::Index d = 0; d < k; ++d) a(d, d) += lambda * std::max(jtwj(d, d), 1e-300);
      Eigen::VectorXd step = a.ldlt().solve(jtwr);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      Eigen::VectorXd trial = p + step;
      double trial_cost = evaluate(trial, trial_res, nullptr);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        double drop = cost - trial_cost;
        tiny_step = step.norm() <= 1e-14 * (p.norm() + 1e-14) || drop <= 1e-15 * cost || trial_cost == 0;
        p = trial;
        cost = evaluate(p, res, &jac);
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10;
      if (lambda > 1e16) break;
    }
    if (!improved || tiny_step) {
      r.converged = true;
      break;
    }
  }
  r.iterations = it;
  if (it >= opts.max_iterations) r.flags.push_back("maximum iterations reached");
  r.params = p;
  r.chi2 = cost;
  r.residual_norm = std::sqrt(cost);
  r.dof = static_cast<int>(n - k);
  Eigen::MatrixXd jtwj = jac.transpose() * w.asDiagonal() * jac;
  finish_covariance(r, jtwj, opts);
  return r;
}

FitResult fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, double fixed_offset,
                        const FitOptions& opts) {
  check_xy(x, y, 4);
  for (size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw FitError("fit_exp_decay: x must be strictly increasing");
  }

  // Log-linear initial guess on |y - B|.
  double mean_dev = 0;
  for (double v : y) mean_dev += v - fixed_offset;
  double sign = mean_dev < 0 ? -1.0 : 1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = sign * (y[i] - fixed_offset);
    if (d <= 0) continue;
    double ly = std::log(d);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    ++used;
  }
  double slope = 0, icpt = 0;
  if (used >= 2 && used * sxx - sx * sx > 0) {
    slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    icpt = (sy - slope * sx) / used;
  } else if (used >= 1) {
    icpt = sy / used;
  }
  Eigen::VectorXd p0(2);
  p0 << sign * std::exp(icpt), std::exp(slope);

  ModelFn model = [](double xv, const Eigen::VectorXd& q, Eigen::VectorXd& g) {
    double px = std::pow(q[1], xv);
    g[0] = px;
    g[1] = xv == 0 ? 0.0 : q[0] * xv * std::pow(q[1], xv - 1);
    return q[0] * px;
  };
  std::vector<double> shifted(y.size());
  for (size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] - fixed_offset;
  FitResult r = levenberg_marquardt(model, x, shifted, p0, {"A", "p"}, opts);
  double p = r.value("p");
  if (!(p > 0 && p <= 1)) r.flags.push_back("p outside (0, 1]");
  if (!r.converged) r.flags.push_back("did not converge");
  return r;
}

FitResult fit_lorentzian_pair(const std::vector<double>& f, const std::vector<double>& yv,
                              const FitOptions& opts) {
  check_xy(f, yv, 8);
  std::vector<size_t> order(f.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return f[a] < f[b]; });
  std::vector<double> fs, ys;
  for (size_t i : order) {
    fs.push_back(f[i]);
    ys.push_back(yv[i]);
  }
  const size_t n = fs.size();

  auto half_width = [&](size_t peak, double base) {
    double half = base + (ys[peak] - base) / 2;
    size_t lo = peak, hi = peak;
    while (lo > 0 && ys[lo] > half) --lo;
    while (hi + 1 < n && ys[hi] > half) ++hi;
    return std::max(fs[hi] - fs[lo], 2 * (fs[1] - fs[0]));
  };
  double base = *std::min_element(ys.begin(), ys.end());
  size_t i1 = static_cast<size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  double w1 = half_width(i1, base);

  // Second peak: largest point outside the first peak's footprint.
  size_t i2 = n;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(fs[i] - fs[i1]) < w1) continue;
    bool local_max = (i == 0 || ys[i] >= ys[i - 1]) && (i + 1 == n || ys[i] >= ys[i + 1]);
    if (!local_max) continue;
    if (i2 == n || ys[i] > ys[i2]) i2 = i;
  }
  if (i2 == n) i2 = (i1 < n / 2) ? n - 1 : 0;
  double w2 = half_width(i2, base);

  Eigen::VectorXd p0(6);
  p0 << fs[i1], w1, ys[i1], fs[i2], w2, ys[i2];
  ModelFn model = [](double x, const Eigen::VectorXd& q, Eigen::VectorXd& g) {
    double total = 0;
    for (int k = 0; k < 2; ++k) {
      double c = q[3 * k], w = q[3 * k + 1], a = q[3 * k + 2];
      double u = 2 * (x - c) / w;
      double den = 1 + u * u;
      double val = a / den;
      double dval_du = -2 * a * u / (den * den);
      g[3 * k] = dval_du * (-2 / w);
      g[3 * k + 1] = dval_du * (-u / w);
      g[3 * k + 2] = 1 / den;
      total += val;
    }
    return total;
  };
  FitResult r = levenberg_marquardt(model, fs, ys, p0, {"c1", "w1", "a1", "c2", "w2", "a2"}, opts);
  r.params[1] = std::abs(r.params[1]);
  r.params[4] = std::abs(r.params[4]);
  if (r.params[0] > r.params[3]) {
    for (int j = 0; j < 3; ++j) std::swap(r.params[j], r.params[3 + j]);
    Eigen::PermutationMatrix<6> perm;
    perm.indices() << 3, 4, 5, 0, 1, 2;
    r.covariance = perm * r.covariance * perm.transpose();
  }
  if (!r.converged) r.flags.push_back("did not converge");
  if (std::abs(r.params[3] - r.params[0]) < (r.params[1] + r.params[4]) / 2) {
    r.flags.push_back("peaks unresolved");
  }
  return r;
}

FitResult fit_poly2_through_origin(const std::vector<double>& n_r, const std::vector<double>& d,
                                   const FitOptions& opts) {
  check_xy(n_r, d, 3);
  for (double v : n_r) {
    if (v < 0) throw FitError("fit_poly2_through_origin: photon numbers must be nonnegative");
  }
  const auto n = static_cast<Eigen::Index>(n_r.size());
  Eigen::VectorXd w = weights_of(opts, n_r.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sw = std::sqrt(w[i]);
    a(i, 0) = sw * n_r[i];
    a(i, 1) = sw * n_r[i] * n_r[i];
    b[i] = sw * d[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) throw FitError("fit_poly2_through_origin: rank-deficient design matrix");
  FitResult r;
  r.names = {"b1", "b2"};
  r.params = qr.solve(b);
  Eigen::VectorXd res = b - a * r.params;
  r.chi2 = res.squaredNorm();
  r.residual_norm = std::sqrt(r.chi2);
  r.dof = static_cast<int>(n - 2);
  r.converged = true;
  finish_covariance(r, a.transpose() * a, opts);
  return r;
}

ErrorRate rb_error_from_decay(double p_ref, double sigma_ref) {
  if (!(p_ref > 0)) throw FitError("rb_error_from_decay: p_ref must be positive");
  return {(1 - p_ref) / 2, sigma_ref / 2, p_ref > 1};
}

ErrorRate loss_from_decays(double p_int, double p_ref, double sigma_int, double sigma_ref) {
  if (!(p_ref > 0) || !(p_int > 0)) throw FitError("decay constants must be positive");
  double ratio = p_int / p_ref;
  double s = std::hypot(sigma_int / p_ref, p_int * sigma_ref / (p_ref * p_ref));
  return {1 - ratio, s, p_int > p_ref};
}

ErrorRate ilrb_error_from_decays(double p_int, double p_ref, double sigma_int, double sigma_ref) {
  ErrorRate loss = loss_from_decays(p_int, p_ref, sigma_int, sigma_ref);
  return {loss.value / 2, loss.sigma / 2, loss.flagged};
}

}  // namespace dualrail
