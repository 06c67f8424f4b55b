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


// Independent closed-form models used as test oracles for the Monte Carlo
// experiments. Nothing here calls the trajectory engine.

#ifndef DUALRAIL_TESTS_ORACLES_H
#define DUALRAIL_TESTS_ORACLES_H

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dualrail/channel.h"
#include "dualrail/core.h"

namespace dualrail::oracle {

// Explicit Pauli-Kraus representation of the per-check channel.
using Mat2 = Eigen::Matrix2cd;

inline std::array<Mat2, 4> paulis() {
  Mat2 i = Mat2::Identity(), x, y, z;
  x << 0, 1, 1, 0;
  y << 0, complex(0, -1), complex(0, 1), 0;
  z << 1, 0, 0, -1;
  return {i, x, y, z};
}

inline std::vector<Mat2> kraus(const ErrorChannelParams& ch) {
  auto p = paulis();
  return {std::sqrt(1 - ch.p1 / 2 - ch.p_phi / 2) * p[0], std::sqrt(ch.p1 / 4) * p[1], std::sqrt(ch.p1 / 4) * p[2],
          std::sqrt(ch.p_phi / 2) * p[3]};
}

// (1 + sum_k |tr K_k|^2 / d) / (d + 1) with d = 2.
inline double kraus_fidelity(const ErrorChannelParams& ch) {
  double s = 0;
  for (const auto& k : kraus(ch)) s += std::norm(k.trace());
  return (1 + s / 2) / 3;
}

inline Bloch kraus_apply(const Bloch& b, const ErrorChannelParams& ch) {
  auto p = paulis();
  Mat2 rho = 0.5 * (p[0] + b[0] * p[1] + b[1] * p[2] + b[2] * p[3]);
  Mat2 out = Mat2::Zero();
  for (const auto& k : kraus(ch)) out += k * rho * k.adjoint();
  return {std::real((out * p[1]).trace()), std::real((out * p[2]).trace()), std::real((out * p[3]).trace())};
}

// Populations of a three-state erase/reheat process: clean logical, erased,
// and logical after a reheat (fully mixed, so it carries no memory).
struct Pops {
  double clean = 1, erased = 0, reheated = 0;
  double logical() const { return clean + reheated; }
};

struct Step {
  double duration = 0;
  bool probe = false;
  bool postselect = false;  // drop the erased population at the end
};

// Constant erase rate g out of both logical states, reheat rate h.
inline Pops advance(Pops s, double t, double g, double h) {
  double total = s.clean + s.erased + s.reheated;
  double l = s.clean * std::exp(-g * t);
  double e_inf = g + h > 0 ? g / (g + h) * total : s.erased;
  double e = e_inf + (s.erased - e_inf) * std::exp(-(g + h) * t);
  return {l, e, total - l - e};
}

inline Pops run(Pops s, const std::vector<Step>& steps, const SystemParams& p) {
  // Equal erasure lifetimes are assumed by the callers.
  double g = 1 / p.t_erasure_0L, h = std::isfinite(p.t_heat) ? 1 / p.t_heat : 0.0;
  for (const auto& st : steps) {
    s = advance(s, st.duration, st.probe ? g * p.readout_degradation : g, h);
    if (st.postselect) s.erased = 0;
  }
  return s;
}

// Pauli transfer eigenvalues (lambda_x = lambda_y, lambda_z).
struct Lambda {
  double x = 1, z = 1;
  Lambda then(const Lambda& o) const { return {x * o.x, z * o.z}; }
  double decay() const { return (2 * x + z) / 3; }
};

inline Lambda of(const ErrorChannelParams& ch) { return {1 - ch.p1 / 2 - ch.p_phi, 1 - ch.p1}; }

// Continuous-time idle process: X and Y flips at 1/(4 T1) each, Z at
// 1/(2 T_phi).
inline Lambda idle(double t, const SystemParams& p) {
  return {std::exp(-t / (2 * p.t1_logical) - t / p.t_phi_logical), std::exp(-t / p.t1_logical)};
}

struct IlrbPrediction {
  double erasure_per_check = 0;
  double residual_per_check = 0;
  double pauli_part = 0;
  double seep_part = 0;
};

// One period of check_every Cliffords ending in a common check, for the
// reference and the interleaved sequence.
inline IlrbPrediction ilrb(const SystemParams& p, const ErrorChannelParams& injected, double x90_pair_p1,
                           double x90_pair_pphi, int check_every = 5) {
  const double cliff = 48e-9, probe = 384e-9, ring = 112e-9, echo = 48e-9;
  std::vector<Step> ref, inter;
  for (int i = 0; i < check_every; ++i) {
    ref.push_back({cliff});
    inter.push_back({cliff});
    inter.push_back({probe, true});
    inter.push_back({ring});
    inter.push_back({echo});
  }
  for (auto* v : {&ref, &inter}) {
    v->push_back({probe, true});
    v->push_back({ring, false, true});
  }
  Pops a = run({}, ref, p), b = run({}, inter, p);
  double k = 1.0 / check_every;
  IlrbPrediction out;
  out.erasure_per_check = 1 - std::pow(b.logical() / a.logical(), k);
  double clean_ratio = std::pow((b.clean / b.logical()) / (a.clean / a.logical()), k);
  Lambda extra = idle(probe + ring + echo, p).then(of(injected)).then(of({x90_pair_p1, x90_pair_pphi}));
  out.pauli_part = (1 - extra.decay()) / 2;
  out.seep_part = (1 - clean_ratio) / 2;
  out.residual_per_check = (1 - extra.decay() * clean_ratio) / 2;
  return out;
}

// Monotone bisection for f(x) = target on [lo, hi] in log space.
inline double solve_log(const std::function<double(double)>& f, double target, double lo, double hi) {
  double flo = f(lo) - target;
  for (int i = 0; i < 200; ++i) {
    double mid = std::sqrt(lo * hi);
    double fm = f(mid) - target;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

// Fraction of postselected shots that never went through an erase/reheat
// cycle, for the fixed-time ladder with evenly spaced checks. Gap layout
// follows the experiment: half gaps at both ends.
inline double ladder_clean_fraction(const SystemParams& p, int checks, double total, bool echo) {
  const double window = 496e-9, probe = 384e-9;
  double idle_total = total - checks * window - (echo ? 48e-9 : 0.0);
  std::vector<Step> steps;
  if (echo) steps.push_back({48e-9});
  if (checks == 0) {
    steps.push_back({idle_total});
  } else {
    double gap = idle_total / checks;
    steps.push_back({gap / 2});
    for (int k = 0; k < checks; ++k) {
      steps.push_back({probe, true});
      steps.push_back({window - probe, false, true});
      steps.push_back({k + 1 < checks ? gap : gap / 2});
    }
  }
  steps.back().postselect = true;  // ideal final readout
  Pops s = run({}, steps, p);
  return s.clean / s.logical();
}

}  // namespace dualrail::oracle

#endif  // DUALRAIL_TESTS_ORACLES_H
