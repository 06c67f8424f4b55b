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

#include "dualrail/trajectory.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dualrail/clifford.h"
#include "dualrail/dispersive.h"

namespace dualrail {

namespace {

complex cexpm1(complex z) {
  if (std::abs(z) < 1e-4) return z * (1.0 + z * (0.5 + z * (1.0 / 6 + z / 24.0)));
  return std::exp(z) - 1.0;
}

// sum_{j<n} exp(-mu j dt)
complex geometric(complex mu, double dt, int64_t n) {
  if (n <= 0) return 0.0;
  complex z = -mu * dt;
  if (z == 0.0) return static_cast<double>(n);
  return cexpm1(z * static_cast<double>(n)) / cexpm1(z);
}

struct Mode {
  complex f;       // field at the current step
  complex lambda;  // kappa/2 + i delta
  complex ss;      // steady state under the current drive

  void set_drive(double eps) { ss = complex(0, -eps) / lambda; }
  complex at(double dt, int64_t n) const { return ss + (f - ss) * std::exp(-lambda * (dt * static_cast<double>(n))); }
  // sum_{a <= j < b} field_j
  complex sum(double dt, int64_t a, int64_t b) const {
    return static_cast<double>(b - a) * ss + (f - ss) * std::exp(-lambda * (dt * static_cast<double>(a))) *
                                                 geometric(lambda, dt, b - a);
  }
};

class Engine {
 public:
  Engine(const ShotTimeline& tl, const SystemParams& p, const ErrorChannelParams& inj, const SimOptions& o)
      : tl_(tl), p_(p), inj_(inj), opt_(o), rng_(tl.rng_seed) {
    dt_ = choose_dt(tl, p, o.dt);
    sigma_ = noise_sigma(p, dt_);
    state_ = tl.initial;
    m0_.lambda = complex(p.kappa_logical / 2, detuning_0L(p));
    m1_.lambda = complex(p.kappa_logical / 2, detuning_1L(p));
    mg_.lambda = complex(p.kappa_gg / 2, detuning_gg(p));
    ml_.lambda = complex(p.kappa_logical / 2, detuning_leak(p));
    for (Mode* m : {&m0_, &m1_, &mg_, &ml_}) m->f = 0.0;
    rem_erase_ = exp1();
    rem_heat_ = exp1();
    rem_flip_ = exp1();
    rem_z_ = exp1();
  }

  ShotResult run() {
    // Segment boundaries on the step grid.
    std::vector<int64_t> ends;
    double cum = 0;
    for (const auto& s : tl_.segments) {
      cum += s.duration;
      ends.push_back(std::llround(cum / dt_));
    }
    total_steps_ = ends.empty() ? 0 : ends.back();
    if (opt_.mode == RecordMode::Integrated) {
      for (const auto& w : tl_.windows) {
        int64_t a = std::llround(w.start / dt_), b = std::llround((w.start + w.duration) / dt_);
        if (!(b > a) || a < 0 || b > total_steps_) throw ValidationError("window: outside the timeline or empty");
        if (!win_.empty() && a < win_.back().second) throw ValidationError("window: windows must not overlap");
        win_.emplace_back(a, b);
      }
      win_sum_.assign(win_.size(), 0.0);
    }
    if (opt_.mode == RecordMode::Full) {
      res_.record.dt = dt_;
      res_.record.samples.reserve(static_cast<size_t>(total_steps_));
    }

    if (opt_.steady_start && !tl_.segments.empty()) {
      double eps = driven(tl_.segments[0]) ? p_.drive_amp : 0.0;
      for (Mode* m : {&m0_, &m1_, &mg_, &ml_}) {
        m->set_drive(eps);
        m->f = m->ss;
      }
    }

    int64_t step = 0;
    for (size_t k = 0; k < tl_.segments.size(); ++k) {
      const Segment& seg = tl_.segments[k];
      bool probe = driven(seg);
      if (probe && seg.check && state_.sector == Sector::Logical && p_.mist_prob_per_check > 0) {
        if (uniform() < p_.mist_prob_per_check) {
          to_leaked(step);
        }
      }
      double eps = probe ? p_.drive_amp : 0.0;
      for (Mode* m : {&m0_, &m1_, &mg_, &ml_}) m->set_drive(eps);
      run_segment(step, ends[k], probe);
      step = ends[k];
      finish_segment(seg, step);
    }
    res_.final_state = state_;
    if (opt_.mode == RecordMode::Full && opt_.add_noise) add_record_noise(res_.record.samples, sigma_, rng_);
    return std::move(res_);
  }

 private:
  static bool driven(const Segment& s) { return s.activity == Activity::ProbeOn || s.drive_on; }
  double exp1() { return std::exponential_distribution<double>(1.0)(rng_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double time_of(int64_t step) const { return dt_ * static_cast<double>(step); }
  void log(int64_t step, EventKind k) { res_.events.push_back({time_of(step), k}); }

  double p0() const { return (1 + state_.bloch[2]) / 2; }
  double p1() const { return (1 - state_.bloch[2]) / 2; }

  double erase_rate(bool probe) const {
    if (state_.sector != Sector::Logical) return 0;
    double r = p0() / p_.t_erasure_0L + p1() / p_.t_erasure_1L;
    return probe ? r * p_.readout_degradation : r;
  }
  double heat_rate() const { return state_.sector == Sector::Erased ? 1.0 / p_.t_heat : 0.0; }
  double flip_rate() const { return state_.sector == Sector::Logical ? 1.0 / (2 * p_.t1_logical) : 0.0; }

  // Cumulative Z-kick hazard over the next n steps: half the measurement
  // dephasing plus idle dephasing.
  double z_hazard(int64_t n) const {
    if (state_.sector != Sector::Logical || n <= 0) return 0;
    double h = static_cast<double>(n) * dt_ / (2 * p_.t_phi_logical);
    if (p_.chi_dr != 0) {
      complex s0 = m0_.ss, s1 = m1_.ss, c0 = m0_.f - s0, c1 = m1_.f - s1;
      complex sum = static_cast<double>(n) * s0 * std::conj(s1) +
                    s0 * std::conj(c1) * geometric(std::conj(m1_.lambda), dt_, n) +
                    c0 * std::conj(s1) * geometric(m0_.lambda, dt_, n) +
                    c0 * std::conj(c1) * geometric(m0_.lambda + std::conj(m1_.lambda), dt_, n);
      h += dt_ * p_.chi_dr * std::imag(sum);
    }
    return h;
  }

  int64_t constant_crossing(double rem, double rate) const {
    if (!(rate > 0)) return INT64_MAX;
    double n = std::ceil(rem / (rate * dt_));
    if (n > 9e18) return INT64_MAX;
    return std::max<int64_t>(1, static_cast<int64_t>(n));
  }

  int64_t z_crossing(int64_t limit) const {
    if (state_.sector != Sector::Logical) return INT64_MAX;
    if (z_hazard(limit) < rem_z_) return INT64_MAX;
    int64_t lo = 0, hi = 1;
    while (hi < limit && z_hazard(hi) < rem_z_) {
      lo = hi;
      hi = std::min(limit, hi * 2);
    }
    while (hi - lo > 1) {
      int64_t mid = lo + (hi - lo) / 2;
      if (z_hazard(mid) >= rem_z_) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

  complex signal_sum(int64_t a, int64_t b) const {
    switch (state_.sector) {
      case Sector::Logical:
        return p0() * m0_.sum(dt_, a, b) + p1() * m1_.sum(dt_, a, b);
      case Sector::Erased:
        return mg_.sum(dt_, a, b);
      case Sector::Leaked:
        return ml_.sum(dt_, a, b);
    }
    return 0.0;
  }

  // Advances every field by n steps starting at absolute step `step`.
  void advance(int64_t step, int64_t n) {
    if (opt_.mode == RecordMode::Full) {
      for (int64_t j = 0; j < n; ++j) res_.record.samples.push_back(signal_at(j));
    } else if (opt_.mode == RecordMode::Integrated) {
      int64_t end = step + n;
      for (size_t w = wi_; w < win_.size() && win_[w].first < end; ++w) {
        int64_t a = std::max(win_[w].first, step), b = std::min(win_[w].second, end);
        if (b > a) win_sum_[w] += signal_sum(a - step, b - step);
        if (win_[w].second <= end) close_window(w);
      }
    }
    for (Mode* m : {&m0_, &m1_, &mg_, &ml_}) m->f = m->at(dt_, n);
  }

  complex signal_at(int64_t j) const {
    switch (state_.sector) {
      case Sector::Logical:
        return p0() * m0_.at(dt_, j) + p1() * m1_.at(dt_, j);
      case Sector::Erased:
        return mg_.at(dt_, j);
      case Sector::Leaked:
        return ml_.at(dt_, j);
    }
    return 0.0;
  }

  void close_window(size_t w) {
    double n = static_cast<double>(win_[w].second - win_[w].first);
    complex pt = win_sum_[w] / n;
    if (opt_.add_noise) {
      std::normal_distribution<double> g(0.0, sigma_ / std::sqrt(n));
      double re = g(rng_);
      double im = g(rng_);
      pt += complex(re, im);
    }
    res_.window_points.push_back(pt);
    res_.window_sectors.push_back(state_.sector);
    wi_ = w + 1;
  }

  complex logical_field() const { return p0() * m0_.f + p1() * m1_.f; }

  void to_erased(int64_t step) {
    mg_.f = logical_field();
    state_ = DualRailState::erased();
    log(step, EventKind::ErasureJump);
  }
  void to_leaked(int64_t step) {
    ml_.f = logical_field();
    state_ = DualRailState::leaked();
    log(step, EventKind::LeakJump);
  }
  void reheat(int64_t step) {
    m0_.f = m1_.f = mg_.f;
    state_ = {Sector::Logical, {0, 0, 0}};
    log(step, EventKind::ReheatJump);
  }

  void pauli_x() { state_.bloch = {state_.bloch[0], -state_.bloch[1], -state_.bloch[2]}; }
  void pauli_y() { state_.bloch = {-state_.bloch[0], state_.bloch[1], -state_.bloch[2]}; }
  void pauli_z() { state_.bloch = {-state_.bloch[0], -state_.bloch[1], state_.bloch[2]}; }

  void apply_channel(const ErrorChannelParams& ch, int64_t step) {
    if (state_.sector != Sector::Logical || (ch.p1 == 0 && ch.p_phi == 0)) return;
    auto pp = pauli_probabilities(ch);
    double u = uniform();
    if (u < pp.px) {
      pauli_x();
      log(step, EventKind::BitFlip);
    } else if (u < pp.px + pp.py) {
      pauli_y();
      log(step, EventKind::BitFlip);
    } else if (u < pp.px + pp.py + pp.pz) {
      pauli_z();
      log(step, EventKind::ZKick);
    }
  }

  void run_segment(int64_t step, int64_t end, bool probe) {
    while (step < end) {
      int64_t left = end - step;
      double re = erase_rate(probe), rh = heat_rate(), rf = flip_rate();
      int64_t ne = constant_crossing(rem_erase_, re);
      int64_t nh = constant_crossing(rem_heat_, rh);
      int64_t nf = constant_crossing(rem_flip_, rf);
      int64_t nz = z_crossing(left);
      int64_t n = std::min({ne, nh, nf, nz});
      if (n > left) {
        consume(left, re, rh, rf);
        advance(step, left);
        return;
      }
      consume(n, re, rh, rf);
      advance(step, n);
      step += n;
      if (n == ne) {
        rem_erase_ = exp1();
        to_erased(step);
      } else if (n == nh) {
        rem_heat_ = exp1();
        reheat(step);
      } else if (n == nf) {
        rem_flip_ = exp1();
        if (uniform() < 0.5) {
          pauli_x();
        } else {
          pauli_y();
        }
        log(step, EventKind::BitFlip);
      } else {
        rem_z_ = exp1();
        pauli_z();
        log(step, EventKind::ZKick);
      }
    }
  }

  // Must be called before the fields are advanced.
  void consume(int64_t n, double re, double rh, double rf) {
    double t = dt_ * static_cast<double>(n);
    rem_erase_ -= re * t;
    rem_heat_ -= rh * t;
    rem_flip_ -= rf * t;
    rem_z_ -= z_hazard(n);
  }

  void finish_segment(const Segment& seg, int64_t step) {
    if (state_.sector != Sector::Logical) return;
    if (seg.check) apply_channel(inj_, step);
    if (seg.activity == Activity::Gate) {
      state_.bloch = clifford_at(seg.clifford).apply(state_.bloch);
      apply_channel(seg.channel, step);
    } else if (seg.activity == Activity::EchoPulse) {
      state_.bloch = clifford_x().apply(state_.bloch);
      apply_channel(seg.channel, step);
    }
  }

  const ShotTimeline& tl_;
  const SystemParams& p_;
  const ErrorChannelParams& inj_;
  const SimOptions& opt_;
  std::mt19937_64 rng_;
  double dt_ = 0, sigma_ = 0;
  int64_t total_steps_ = 0;
  DualRailState state_;
  Mode m0_, m1_, mg_, ml_;
  double rem_erase_ = 0, rem_heat_ = 0, rem_flip_ = 0, rem_z_ = 0;
  std::vector<std::pair<int64_t, int64_t>> win_;
  std::vector<complex> win_sum_;
  size_t wi_ = 0;
  ShotResult res_;
};

}  // namespace

double ShotTimeline::total_duration() const {
  double t = 0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::ErasureJump:
      return "erasure";
    case EventKind::ReheatJump:
      return "reheat";
    case EventKind::LeakJump:
      return "leak";
    case EventKind::ZKick:
      return "zkick";
    case EventKind::BitFlip:
      return "bitflip";
  }
  return "?";
}

bool ShotResult::has_event(EventKind k) const {
  return std::any_of(events.begin(), events.end(), [k](const Event& e) { return e.kind == k; });
}

double choose_dt(const ShotTimeline& tl, const SystemParams& p, double requested) {
  double kmax = std::max(p.kappa_gg, p.kappa_logical);
  double bound = 1.0 / (20 * kmax);
  if (requested > 0) {
    if (requested > bound * (1 + 1e-12)) throw ValidationError("dt: exceeds the stability bound 1/(20 kappa)");
    return requested;
  }
  double shortest = kInf;
  for (const auto& s : tl.segments) shortest = std::min(shortest, s.duration);
  double dt = std::min(bound, shortest / 10);
  double per_ns = std::ceil(1e-9 / dt - 1e-9);
  return 1e-9 / per_ns;
}

double noise_sigma(const SystemParams& p, double dt) {
  return std::sqrt(1.0 / (4 * p.kappa_gg * p.eta_eff * dt));
}

uint64_t shot_seed(uint64_t master, uint64_t index) {
  auto mix = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

ShotResult simulate_shot(const ShotTimeline& tl, const SystemParams& params, const ErrorChannelParams& injected,
                         const SimOptions& options) {
  require_valid(params);
  require_valid(injected);
  for (const auto& s : tl.segments) {
    if (!(s.duration > 0) || !std::isfinite(s.duration)) throw ValidationError("segment: duration must be positive");
    if (s.activity == Activity::Gate) clifford_at(s.clifford);
    require_valid(s.channel);
  }
  if (tl.initial.bloch_norm() > 1 + 1e-12) throw ValidationError("initial: bloch norm exceeds 1");
  Engine engine(tl, params, injected, options);
  return engine.run();
}

void add_record_noise(std::vector<complex>& samples, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  for (auto& s : samples) {
    double re = g(rng);
    double im = g(rng);
    s += complex(re, im);
  }
}

MeasurementRecord generate_record(const std::vector<complex>& alpha_path, const SystemParams& params, double dt,
                                  uint64_t seed) {
  if (!(dt > 0)) throw ValidationError("dt: must be positive");
  MeasurementRecord r;
  r.dt = dt;
  r.samples = alpha_path;
  std::mt19937_64 rng(seed);
  add_record_noise(r.samples, noise_sigma(params, dt), rng);
  return r;
}

complex ringdown_tail(double kappa, double delta, double t) {
  if (!(t >= 0)) throw ValidationError("t: must be nonnegative");
  return std::exp(-complex(kappa / 2, delta) * t);
}

complex ringdown_tail(const SystemParams& p, double t, Sector sector) {
  switch (sector) {
    case Sector::Logical:
      return ringdown_tail(p.kappa_logical, p.drive_detuning + p.chi, t);
    case Sector::Erased:
      return ringdown_tail(p.kappa_gg, detuning_gg(p), t);
    case Sector::Leaked:
      return ringdown_tail(p.kappa_logical, detuning_leak(p), t);
  }
  return 1.0;
}

std::string record_to_csv(const MeasurementRecord& r) {
  std::ostringstream out;
  out.precision(17);
  out << "time,I,Q\n";
  for (size_t i = 0; i < r.samples.size(); ++i) {
    out << r.origin_time + r.dt * static_cast<double>(i) << "," << r.samples[i].real() << "," << r.samples[i].imag()
        << "\n";
  }
  return out.str();
}

std::string events_to_text(const std::vector<Event>& events) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& e : events) out << e.time << " " << event_name(e.kind) << "\n";
  return out.str();
}

}  // namespace dualrail
