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


#include "dualrail/experiments.h"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace dualrail {

namespace {

constexpr double kCheckWindow = kCheckProbe + kCheckRingdown;
// Segment boundaries are snapped to this grid so the step size stays coarse.
constexpr double kGrid = 0.5e-9;

// Runs f(0..n-1) on up to `threads` workers. Callers write results by index,
// so the outcome does not depend on scheduling.
template <class F>
void parallel_for(int n, int threads, const F& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next++;
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

uint64_t stream(uint64_t seed, uint64_t a, uint64_t b) { return shot_seed(shot_seed(seed, a), b); }

double snap(double t) { return std::round(t / kGrid) * kGrid; }

SystemParams without_lifetimes(SystemParams p) {
  p.t_erasure_0L = p.t_erasure_1L = kInf;
  p.t_heat = kInf;
  p.mist_prob_per_check = 0;
  return p;
}

void push(ShotTimeline& tl, double duration, Activity a, int clifford = 0, bool check = false,
          ErrorChannelParams ch = {}, bool drive_on = false) {
  if (duration <= 0) return;
  Segment s;
  s.duration = duration;
  s.activity = a;
  s.clifford = clifford;
  s.check = check;
  s.channel = ch;
  s.drive_on = drive_on;
  tl.segments.push_back(s);
}

// Probe plus ringdown with a window over both.
void push_check(ShotTimeline& tl) {
  double t0 = tl.total_duration();
  push(tl, kCheckProbe, Activity::ProbeOn, 0, true);
  push(tl, kCheckRingdown, Activity::Idle);
  tl.windows.push_back({t0, kCheckWindow});
}

enum class WindowKind : char { Common, Interleaved, EndOfLine };

ShotTimeline ilrb_timeline_kinds(const RBSequence& seq, bool target_one, const SystemParams& params,
                                 std::vector<WindowKind>* kinds) {
  ShotTimeline tl;
  tl.initial = DualRailState::zero();
  ErrorChannelParams gate = clifford_channel(params.x90_error);
  size_t next_check = 0;
  for (int i = 0; i < seq.length_m; ++i) {
    push(tl, kCliffordDuration, Activity::Gate, seq.elements[static_cast<size_t>(i)].index, false, gate);
    if (seq.interleaved) {
      push_check(tl);
      if (kinds) kinds->push_back(WindowKind::Interleaved);
      push(tl, kEchoDuration, Activity::EchoPulse, 0, false, gate);
    }
    while (next_check < seq.check_positions.size() && seq.check_positions[next_check] == i) {
      push_check(tl);
      if (kinds) kinds->push_back(WindowKind::Common);
      ++next_check;
    }
  }
  CliffordElement rec = target_one ? compose(clifford_x(), seq.recovery) : seq.recovery;
  push(tl, kCliffordDuration, Activity::Gate, rec.index, false, gate);
  push_check(tl);
  if (kinds) kinds->push_back(WindowKind::EndOfLine);
  return tl;
}

// Probability-weighted coin for an ideal Z or X readout of the final state.
bool ideal_readout(double expectation, uint64_t seed) {
  std::mt19937_64 rng(shot_seed(seed, 0x7e4d));
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < (1 + expectation) / 2;
}

using VarianceFn = std::function<double(double yhat, size_t i)>;

double model_at(const FitResult& f, double x, double offset) {
  return offset + f.value("A") * std::pow(f.value("p"), x);
}

FitResult two_pass_decay(const std::vector<double>& x, const std::vector<double>& y, double offset,
                         const VarianceFn& var) {
  FitResult first = fit_exp_decay(x, y, offset);
  FitOptions o;
  o.absolute_sigma = true;
  for (size_t i = 0; i < x.size(); ++i) o.sigma.push_back(std::sqrt(var(model_at(first, x[i], offset), i)));
  return fit_exp_decay(x, y, offset, o);
}

double binomial_var(double y, double n) {
  double v = std::clamp(y, 0.0, 1.0);
  return std::max(v * (1 - v), 1.0 / n) / n;
}

Estimate to_estimate(const ErrorRate& e) { return {e.value, e.sigma}; }

struct Tally {
  std::vector<double> x, y, yerr, n;
};

// Proportion curve with binomial error bars; points below `min_n` trials are
// dropped with a note.
Series proportion_curve(const std::vector<int>& lengths, const std::vector<long>& hits, const std::vector<long>& trials,
                        int min_n, const std::string& label, std::vector<std::string>& notes, std::vector<double>* n_out) {
  Series s;
  for (size_t k = 0; k < lengths.size(); ++k) {
    if (trials[k] < min_n) {
      notes.push_back(label + ": length " + std::to_string(lengths[k]) + " dropped, " + std::to_string(trials[k]) +
                      " surviving shots");
      continue;
    }
    double n = static_cast<double>(trials[k]);
    double p = static_cast<double>(hits[k]) / n;
    s.x.push_back(lengths[k]);
    s.y.push_back(p);
    s.yerr.push_back(std::sqrt(p * (1 - p) / n));
    if (n_out) n_out->push_back(n);
  }
  return s;
}

FitResult fit_curve(ExperimentResult& r, const std::string& label, const Series& s, const std::vector<double>& n,
                    double offset) {
  if (s.x.size() < 4) {
    throw ExperimentError(label + ": fewer than 4 lengths with enough surviving shots");
  }
  FitResult f = fit_binomial_decay(s.x, s.y, n, offset);
  for (const auto& fl : f.flags) r.diagnostics.push_back(label + ": " + fl);
  r.fits[label] = f;
  return f;
}

// Per-shot outcome for RB-style experiments.
struct Outcome {
  bool kept = false;     // passed the primary postselection
  bool kept_alt = false; // passed the stricter (or looser) alternative
  bool success = false;  // ideal readout returned the target
  bool seep = false;     // shot contains a reheat event
};

ClassifierConfig calibrate_on(const SystemParams& params, const ShotTimeline& tmpl, bool steady, int shots,
                              uint64_t seed, int threads) {
  SystemParams p = without_lifetimes(params);
  std::vector<complex> logical(static_cast<size_t>(shots)), erased(static_cast<size_t>(shots));
  SimOptions opt;
  opt.steady_start = steady;
  parallel_for(2 * shots, threads, [&](int i) {
    ShotTimeline tl = tmpl;
    int k = i / 2;
    bool is_erased = i % 2 == 1;
    tl.initial = is_erased ? DualRailState::erased() : (k % 2 ? DualRailState::one() : DualRailState::zero());
    tl.rng_seed = stream(seed, is_erased ? 2 : 1, static_cast<uint64_t>(k));
    ShotResult res = simulate_shot(tl, p, {}, opt);
    (is_erased ? erased : logical)[static_cast<size_t>(k)] = res.window_points.at(0);
  });
  return calibrate(logical, erased);
}

ClassifierConfig classifier_for(const ExperimentConfig& c, const SystemParams& p, uint64_t tag) {
  if (c.classifier.snr > 0) return c.classifier;
  ShotTimeline tl;
  push_check(tl);
  return calibrate_on(p, tl, false, c.calibration_shots, stream(c.seed, 0xca11, tag), c.threads);
}

double window_snr(const SystemParams& p, const ShotTimeline& tl, bool steady) {
  SimOptions opt;
  opt.add_noise = false;
  opt.steady_start = steady;
  ShotTimeline a = tl, b = tl;
  a.initial = DualRailState::zero();
  b.initial = DualRailState::erased();
  ShotResult ra = simulate_shot(a, p, {}, opt), rb = simulate_shot(b, p, {}, opt);
  double dt = choose_dt(tl, p);
  double steps = std::round(tl.windows.at(0).duration / dt);
  double s = noise_sigma(p, dt) / std::sqrt(steps);
  return std::norm(rb.window_points.at(0) - ra.window_points.at(0)) / (2 * s * s);
}

double scale_drive(SystemParams p, double snr, const ShotTimeline& tl, bool steady) {
  if (!(snr > 0)) throw ValidationError("snr must be positive");
  p = without_lifetimes(p);
  p.drive_amp = p.kappa_logical;
  double ref = window_snr(p, tl, steady);
  if (!(ref > 0)) throw ValidationError("drive calibration: logical and erased responses coincide");
  return p.drive_amp * std::sqrt(snr / ref);
}

SystemParams with_drive(const ExperimentConfig& c, double snr, bool continuous) {
  SystemParams p = c.params;
  if (p.drive_amp == 0) {
    p.drive_amp = continuous ? calibrate_continuous_drive(p, snr, c.window) : calibrate_check_drive(p, snr);
  }
  return p;
}

bool all_logical(const ShotResult& r, const ClassifierConfig& cls, size_t from = 0, size_t to = SIZE_MAX) {
  to = std::min(to, r.window_points.size());
  for (size_t w = from; w < to; ++w) {
    if (classify_binary(r.window_points[w], cls) == BinaryLabel::Erased) return false;
  }
  return true;
}

}  // namespace

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Ilrb: return "ilrb";
    case ExperimentKind::InducedBitflip: return "induced_bitflip";
    case ExperimentKind::InducedDephasing: return "induced_dephasing";
    case ExperimentKind::ContinuousRb: return "continuous_rb";
    case ExperimentKind::TErasureCompare: return "t_erasure_compare";
    case ExperimentKind::LeakSweep: return "leak_sweep";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Ilrb, ExperimentKind::InducedBitflip, ExperimentKind::InducedDephasing,
                 ExperimentKind::ContinuousRb, ExperimentKind::TErasureCompare, ExperimentKind::LeakSweep}) {
    if (name == experiment_name(k)) return k;
  }
  throw ValidationError("experiment: unknown kind '" + name + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Ilrb:
      break;
    case ExperimentKind::InducedBitflip:
    case ExperimentKind::InducedDephasing:
      c.lengths = {0, 2, 4, 8, 16, 24, 32, 48, 64, 96};
      c.shots_per_point = 4000;
      c.injected = {2.8e-4, 8e-5};
      break;
    case ExperimentKind::ContinuousRb:
      c.lengths = {2, 10, 20, 50, 100, 200, 400};
      c.shots_per_point = 2000;
      break;
    case ExperimentKind::TErasureCompare:
      c.lengths = {0, 5000, 10000, 15000, 20000, 30000, 40000, 50000, 60000};
      c.shots_per_point = 2000;
      break;
    case ExperimentKind::LeakSweep:
      c.lengths = {1};
      c.shots_per_point = 20000;
      c.params.mist_prob_per_check = 0.01;
      break;
  }
  return c;
}

void require_valid(const ExperimentConfig& c) {
  require_valid(c.params);
  require_valid(c.injected);
  if (c.lengths.empty()) throw ValidationError("lengths: must be nonempty");
  for (size_t i = 0; i < c.lengths.size(); ++i) {
    if (c.lengths[i] < 0) throw ValidationError("lengths: must be nonnegative");
    if (i > 0 && c.lengths[i] <= c.lengths[i - 1]) throw ValidationError("lengths: must be strictly increasing");
  }
  if (c.shots_per_point < 100) throw ValidationError("shots_per_point: must be at least 100");
  if (c.threads < 1) throw ValidationError("threads: must be at least 1");
  if (!(c.check_snr > 0)) throw ValidationError("check_snr: must be positive");
  if (c.check_every < 1) throw ValidationError("check_every: must be at least 1");
  if (c.min_survivors < 1) throw ValidationError("min_survivors: must be at least 1");
  if (c.calibration_shots < 30) throw ValidationError("calibration_shots: must be at least 30");
  if (!(c.ladder_time > 0)) throw ValidationError("ladder_time: must be positive");
  if (!(c.window > 0)) throw ValidationError("window: must be positive");
  if (!(c.continuous_snr > 0)) throw ValidationError("continuous_snr: must be positive");
  if (c.discrete_checks < 0) throw ValidationError("discrete_checks: must be nonnegative");
  if (!(c.seep_probability >= 0 && c.seep_probability <= 1)) {
    throw ValidationError("seep_probability: must lie in [0, 1]");
  }
  if (!(c.seep_t_erasure > 0) || !(c.seep_t_heat > 0)) throw ValidationError("seep times: must be positive");
  for (int w : c.snr_windows) {
    if (w <= 0) throw ValidationError("snr_windows: must be positive");
  }
  if (!c.snr_windows.empty() && c.snr_records < 30) throw ValidationError("snr_records: must be at least 30");
  if (!(c.leak_snr > 0)) throw ValidationError("leak_snr: must be positive");
  for (double r : c.radii) {
    if (!(r > 0)) throw ValidationError("radii: must be positive");
  }
}

ErrorChannelParams clifford_channel(double x90_error) {
  ErrorChannelParams x = x90_channel(x90_error);
  return compose(x, x);
}

double calibrate_check_drive(const SystemParams& params, double snr, double probe, double ringdown) {
  ShotTimeline tl;
  push(tl, snap(probe), Activity::ProbeOn);
  push(tl, snap(ringdown), Activity::Idle);
  tl.windows.push_back({0, tl.total_duration()});
  return scale_drive(params, snr, tl, false);
}

double calibrate_continuous_drive(const SystemParams& params, double snr, double window) {
  ShotTimeline tl;
  push(tl, snap(window), Activity::ProbeOn);
  tl.windows.push_back({0, tl.total_duration()});
  return scale_drive(params, snr, tl, true);
}

ClassifierConfig calibrate_check_classifier(const SystemParams& params, int shots, uint64_t seed) {
  ShotTimeline tl;
  push_check(tl);
  return calibrate_on(params, tl, false, shots, seed, 1);
}

ShotTimeline ilrb_timeline(const RBSequence& seq, bool target_one, const SystemParams& params) {
  return ilrb_timeline_kinds(seq, target_one, params, nullptr);
}

ShotTimeline ladder_timeline(int checks, bool echo, double total, const SystemParams& params) {
  if (checks < 0) throw ValidationError("checks: must be nonnegative");
  double echo_time = echo ? kEchoDuration : 0.0;
  double idle = total - checks * kCheckWindow - echo_time;
  if (idle < -1e-15) throw ValidationError("ladder: checks do not fit in the total time");
  ShotTimeline tl;
  // Gaps around evenly spaced checks: half gaps at both ends.
  long units = std::lround(std::max(idle, 0.0) / kGrid);
  std::vector<long> gap(static_cast<size_t>(checks) + 1, 0);
  if (checks == 0) {
    gap[0] = units;
  } else {
    long full = units / checks;
    long used = 0;
    for (int k = 1; k < checks; ++k) {
      gap[static_cast<size_t>(k)] = full;
      used += full;
    }
    gap[0] = (units - used) / 2;
    gap[static_cast<size_t>(checks)] = units - used - gap[0];
  }
  size_t echo_gap = static_cast<size_t>(checks) / 2;
  ErrorChannelParams gate = clifford_channel(params.x90_error);
  for (size_t k = 0; k <= static_cast<size_t>(checks); ++k) {
    double g = static_cast<double>(gap[k]) * kGrid;
    if (echo && k == echo_gap) {
      double first = snap(g / 2);
      push(tl, first, Activity::Idle);
      push(tl, kEchoDuration, Activity::EchoPulse, 0, false, gate);
      push(tl, g - first, Activity::Idle);
    } else {
      push(tl, g, Activity::Idle);
    }
    if (k < static_cast<size_t>(checks)) push_check(tl);
  }
  return tl;
}

ShotTimeline continuous_timeline(const RBSequence& seq, bool target_one, const SystemParams& params,
                                 const ErrorChannelParams& per_clifford, double window) {
  (void)params;
  ShotTimeline tl;
  tl.initial = DualRailState::zero();
  push(tl, kRingUp, Activity::ProbeOn);
  for (const auto& e : seq.elements) push(tl, kCliffordDuration, Activity::Gate, e.index, false, per_clifford, true);
  CliffordElement rec = target_one ? compose(clifford_x(), seq.recovery) : seq.recovery;
  push(tl, kCliffordDuration, Activity::Gate, rec.index, false, per_clifford, true);
  double w = snap(window);
  double end = tl.total_duration();
  for (double t = kRingUp; t + w <= end + 1e-15; t += w) tl.windows.push_back({t, w});
  return tl;
}

ShotTimeline discrete_timeline(const RBSequence& seq, bool target_one, const SystemParams& params,
                               const ErrorChannelParams& per_clifford, int checks) {
  (void)params;
  ShotTimeline tl;
  tl.initial = DualRailState::zero();
  int m = seq.length_m;
  // Check k follows Clifford floor((k+1) m / (checks+1)) - 1; before the
  // first Clifford when that is negative.
  std::vector<int> after(static_cast<size_t>(checks));
  for (int k = 0; k < checks; ++k) after[static_cast<size_t>(k)] = (k + 1) * m / (checks + 1) - 1;
  size_t next = 0;
  while (next < after.size() && after[next] < 0) {
    push_check(tl);
    ++next;
  }
  for (int i = 0; i < m; ++i) {
    push(tl, kCliffordDuration, Activity::Gate, seq.elements[static_cast<size_t>(i)].index, false, per_clifford);
    while (next < after.size() && after[next] == i) {
      push_check(tl);
      ++next;
    }
  }
  CliffordElement rec = target_one ? compose(clifford_x(), seq.recovery) : seq.recovery;
  push(tl, kCliffordDuration, Activity::Gate, rec.index, false, per_clifford);
  return tl;
}

FitResult fit_binomial_decay(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& n,
                             double offset) {
  if (n.size() != x.size()) throw FitError("fit_binomial_decay: trial counts do not match the data");
  return two_pass_decay(x, y, offset, [&](double yhat, size_t i) { return binomial_var(yhat, n[i]); });
}

// ---------------------------------------------------------------- ILRB

ExperimentResult run_ilrb(const ExperimentConfig& c) {
  require_valid(c);
  ExperimentResult r;
  SystemParams p = with_drive(c, c.check_snr, false);
  r.drive_amp = p.drive_amp;
  r.classifier = classifier_for(c, p, 1);
  const ClassifierConfig& cls = r.classifier;

  size_t nl = c.lengths.size();
  auto shots = static_cast<size_t>(c.shots_per_point);
  // arm 0 reference, arm 1 interleaved
  std::vector<Outcome> out(2 * nl * shots);
  parallel_for(static_cast<int>(out.size()), c.threads, [&](int idx) {
    auto u = static_cast<size_t>(idx);
    size_t arm = u / (nl * shots), k = (u / shots) % nl, i = u % shots;
    int m = c.lengths[k];
    uint64_t seed = stream(c.seed, 0x11b0 + arm, static_cast<uint64_t>(m) * 1000003u + i);
    RBSequence seq = generate_sequence(m, seed, arm == 1, c.check_every);
    bool target_one = i % 2 == 1;
    std::vector<WindowKind> kinds;
    ShotTimeline tl = ilrb_timeline_kinds(seq, target_one, p, &kinds);
    tl.rng_seed = shot_seed(seed, 1);
    ShotResult res = simulate_shot(tl, p, c.injected);
    Outcome o;
    bool logical_end = res.final_state.sector == Sector::Logical;
    bool common_ok = true, inter_ok = true;
    for (size_t w = 0; w < kinds.size(); ++w) {
      bool flagged = classify_binary(res.window_points[w], cls) == BinaryLabel::Erased;
      if (!flagged) continue;
      if (kinds[w] == WindowKind::Interleaved) {
        inter_ok = false;
      } else {
        common_ok = false;
      }
    }
    o.kept = logical_end && common_ok;
    o.kept_alt = o.kept && inter_ok;
    if (logical_end) {
      double z = res.final_state.bloch[2];
      o.success = ideal_readout(target_one ? -z : z, tl.rng_seed);
    }
    o.seep = res.has_event(EventKind::ReheatJump);
    out[u] = o;
  });

  auto tally = [&](size_t arm, bool alt, std::vector<long>& kept, std::vector<long>& succ) {
    kept.assign(nl, 0);
    succ.assign(nl, 0);
    for (size_t k = 0; k < nl; ++k) {
      for (size_t i = 0; i < shots; ++i) {
        const Outcome& o = out[(arm * nl + k) * shots + i];
        bool kp = alt ? o.kept_alt : o.kept;
        if (!kp) continue;
        ++kept[k];
        if (o.success) ++succ[k];
      }
    }
  };
  std::vector<long> all(nl, static_cast<long>(shots));
  struct Arm {
    std::string name;
    size_t arm;
    bool alt;
  };
  std::map<std::string, FitResult> ps_fit, sv_fit;
  for (const Arm& a : {Arm{"ref", 0, false}, Arm{"int", 1, false}, Arm{"int_variant", 1, true}}) {
    std::vector<long> kept, succ;
    tally(a.arm, a.alt, kept, succ);
    std::vector<double> n_ps, n_sv;
    Series ps = proportion_curve(c.lengths, kept, all, 1, "postselection_" + a.name, r.diagnostics, &n_ps);
    Series sv = proportion_curve(c.lengths, succ, kept, c.min_survivors, "survival_" + a.name, r.diagnostics, &n_sv);
    r.curves["postselection_" + a.name] = ps;
    r.curves["survival_" + a.name] = sv;
    ps_fit[a.name] = fit_curve(r, "postselection_" + a.name, ps, n_ps, 0.0);
    sv_fit[a.name] = fit_curve(r, "survival_" + a.name, sv, n_sv, 0.5);
  }
  auto pv = [](const FitResult& f) { return f.value("p"); };
  auto ps = [](const FitResult& f) { return f.sigma("p"); };
  for (const std::string suffix : {"", "_variant"}) {
    const FitResult& pi = ps_fit["int" + suffix];
    const FitResult& si = sv_fit["int" + suffix];
    ErrorRate er = loss_from_decays(pv(pi), pv(ps_fit["ref"]), ps(pi), ps(ps_fit["ref"]));
    ErrorRate rr = ilrb_error_from_decays(pv(si), pv(sv_fit["ref"]), ps(si), ps(sv_fit["ref"]));
    r.derived["erasure_per_check" + suffix] = to_estimate(er);
    r.derived["residual_per_check" + suffix] = to_estimate(rr);
    if (rr.value > 0) {
      double nb = er.value / rr.value;
      double s = nb * std::hypot(er.sigma / er.value, rr.sigma / rr.value);
      r.derived["noise_bias" + suffix] = {nb, s};
    }
  }
  r.derived["reference_error_per_clifford"] = to_estimate(rb_error_from_decay(pv(sv_fit["ref"]), ps(sv_fit["ref"])));
  return r;
}

// ---------------------------------------------------------------- ladders

ExperimentResult run_induced_ladders(const ExperimentConfig& c) {
  require_valid(c);
  ExperimentResult r;
  SystemParams p = with_drive(c, c.check_snr, false);
  r.drive_amp = p.drive_amp;
  r.classifier = classifier_for(c, p, 2);
  const ClassifierConfig& cls = r.classifier;
  for (int n : c.lengths) {
    if (n * kCheckWindow + kEchoDuration > c.ladder_time + 1e-15) {
      throw ValidationError("lengths: " + std::to_string(n) + " checks do not fit in ladder_time");
    }
  }

  size_t nl = c.lengths.size();
  auto shots = static_cast<size_t>(c.shots_per_point);
  // prep 0: |0_L>, 1: |1_L>, 2: |+_L> with echo
  struct LOut {
    bool kept = false;
    bool plus = false;  // readout +1 in the prepared basis
  };
  std::vector<LOut> out(3 * nl * shots);
  parallel_for(static_cast<int>(out.size()), c.threads, [&](int idx) {
    auto u = static_cast<size_t>(idx);
    size_t prep = u / (nl * shots), k = (u / shots) % nl, i = u % shots;
    ShotTimeline tl = ladder_timeline(c.lengths[k], prep == 2, c.ladder_time, p);
    tl.initial = prep == 0 ? DualRailState::zero() : prep == 1 ? DualRailState::one() : DualRailState::plus();
    tl.rng_seed = stream(c.seed, 0x1add + prep, static_cast<uint64_t>(c.lengths[k]) * 1000003u + i);
    ShotResult res = simulate_shot(tl, p, c.injected);
    LOut o;
    o.kept = res.final_state.sector == Sector::Logical && all_logical(res, cls);
    if (o.kept) {
      double e = prep == 2 ? res.final_state.bloch[0] : res.final_state.bloch[2];
      o.plus = ideal_readout(e, tl.rng_seed);
    }
    out[u] = o;
  });

  std::vector<long> kept[3], plus[3];
  for (size_t prep = 0; prep < 3; ++prep) {
    kept[prep].assign(nl, 0);
    plus[prep].assign(nl, 0);
    for (size_t k = 0; k < nl; ++k) {
      for (size_t i = 0; i < shots; ++i) {
        const LOut& o = out[(prep * nl + k) * shots + i];
        if (!o.kept) continue;
        ++kept[prep][k];
        if (o.plus) ++plus[prep][k];
      }
    }
  }
  std::vector<long> all(nl, static_cast<long>(shots));
  r.curves["postselection_bitflip"] = proportion_curve(c.lengths, kept[0], all, 1, "postselection_bitflip",
                                                       r.diagnostics, nullptr);
  r.curves["postselection_echo"] = proportion_curve(c.lengths, kept[2], all, 1, "postselection_echo",
                                                    r.diagnostics, nullptr);

  // Polarization P(0|0) - P(0|1) and coherence 2 P(+) - 1 with their
  // trial counts for the model-based weights.
  Series pol, coh;
  std::vector<double> n0, n1, nc;
  for (size_t k = 0; k < nl; ++k) {
    long a = kept[0][k], b = kept[1][k], e = kept[2][k];
    if (a >= c.min_survivors && b >= c.min_survivors) {
      double pa = static_cast<double>(plus[0][k]) / a, pb = static_cast<double>(plus[1][k]) / b;
      pol.x.push_back(c.lengths[k]);
      pol.y.push_back(pa - pb);
      pol.yerr.push_back(std::sqrt(pa * (1 - pa) / a + pb * (1 - pb) / b));
      n0.push_back(a);
      n1.push_back(b);
    } else {
      r.diagnostics.push_back("polarization: " + std::to_string(c.lengths[k]) + " checks dropped, too few survivors");
    }
    if (e >= c.min_survivors) {
      double pe = static_cast<double>(plus[2][k]) / e;
      coh.x.push_back(c.lengths[k]);
      coh.y.push_back(2 * pe - 1);
      coh.yerr.push_back(2 * std::sqrt(pe * (1 - pe) / e));
      nc.push_back(e);
    } else {
      r.diagnostics.push_back("coherence: " + std::to_string(c.lengths[k]) + " checks dropped, too few survivors");
    }
  }
  r.curves["polarization"] = pol;
  r.curves["coherence"] = coh;

  auto tail_fit = [&](const std::string& label, const Series& s, const VarianceFn& var) {
    Series t;
    std::vector<size_t> idx;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] < c.ladder_tail_min) continue;
      t.x.push_back(s.x[i]);
      t.y.push_back(s.y[i]);
      idx.push_back(i);
    }
    if (t.x.size() < 4) throw ExperimentError(label + ": fewer than 4 check counts in the fitted tail");
    FitResult f = two_pass_decay(t.x, t.y, 0.0, [&](double yhat, size_t j) { return var(yhat, idx[j]); });
    for (const auto& fl : f.flags) r.diagnostics.push_back(label + ": " + fl);
    r.fits[label] = f;
    return f;
  };
  auto floor_var = [](double v, double n) { return std::max(v, 1.0 / n); };
  FitResult fp = tail_fit("polarization", pol, [&](double y, size_t i) {
    double v = floor_var((1 - y * y) / 4, n0[i] + n1[i]);
    return v * (1 / n0[i] + 1 / n1[i]);
  });
  FitResult fc = tail_fit("coherence", coh, [&](double y, size_t i) { return floor_var(1 - y * y, nc[i]) / nc[i]; });
  Estimate p1{1 - fp.value("p"), fp.sigma("p")};
  Estimate p2{1 - fc.value("p"), fc.sigma("p")};
  r.derived["p1"] = p1;
  r.derived["p2"] = p2;
  r.derived["p_phi"] = {p2.value - p1.value / 2, std::hypot(p2.sigma, p1.sigma / 2)};

  // Coherence gained by the first added checks, relative to none.
  auto at = [&](int n) -> const double* {
    for (size_t i = 0; i < coh.x.size(); ++i) {
      if (coh.x[i] == n) return &coh.y[i];
    }
    return nullptr;
  };
  auto err_at = [&](int n) {
    for (size_t i = 0; i < coh.x.size(); ++i) {
      if (coh.x[i] == n) return coh.yerr[i];
    }
    return 0.0;
  };
  if (at(0) && at(4)) r.derived["coherence_rise_4"] = {*at(4) - *at(0), std::hypot(err_at(4), err_at(0))};
  return r;
}

// ---------------------------------------------------------------- continuous

// Window-mean SNR of steady-state records against window length.
static void snr_series(const ExperimentConfig& c, const SystemParams& p, ExperimentResult& r) {
  if (c.snr_windows.empty()) return;
  SystemParams q = without_lifetimes(p);
  Series s;
  size_t nw = c.snr_windows.size();
  auto recs = static_cast<size_t>(c.snr_records);
  std::vector<complex> pts(nw * 2 * recs);
  parallel_for(static_cast<int>(pts.size()), c.threads, [&](int idx) {
    auto u = static_cast<size_t>(idx);
    size_t w = u / (2 * recs), j = u % (2 * recs);
    ShotTimeline tl;
    push(tl, snap(c.snr_windows[w] * 1e-9), Activity::ProbeOn);
    tl.windows.push_back({0, tl.total_duration()});
    tl.initial = j % 2 ? DualRailState::erased() : DualRailState::zero();
    tl.rng_seed = stream(c.seed, 0x5a12 + w, j);
    SimOptions opt;
    opt.steady_start = true;
    pts[u] = simulate_shot(tl, q, {}, opt).window_points.at(0);
  });
  for (size_t w = 0; w < nw; ++w) {
    std::vector<complex> a, b;
    for (size_t j = 0; j < 2 * recs; ++j) (j % 2 ? b : a).push_back(pts[w * 2 * recs + j]);
    double snr = estimate_snr(a, b);
    s.x.push_back(c.snr_windows[w]);
    s.y.push_back(snr);
    s.yerr.push_back(snr * std::sqrt((4 / snr + 1) / static_cast<double>(recs)));
    if (c.snr_windows[w] == std::lround(c.window * 1e9)) {
      r.derived["snr_at_window"] = {snr, s.yerr.back()};
    }
  }
  r.curves["snr_vs_window"] = s;
  if (nw >= 3) {
    // Ordinary least squares line and its coefficient of determination.
    double n = static_cast<double>(nw), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < nw; ++i) {
      sx += s.x[i];
      sy += s.y[i];
      sxx += s.x[i] * s.x[i];
      sxy += s.x[i] * s.y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (size_t i = 0; i < nw; ++i) {
      double e = s.y[i] - (icpt + slope * s.x[i]);
      ss_res += e * e;
      ss_tot += (s.y[i] - mean) * (s.y[i] - mean);
    }
    r.derived["snr_slope_per_ns"] = {slope, 0};
    r.derived["snr_intercept"] = {icpt, 0};
    r.derived["snr_linearity_r2"] = {1 - ss_res / ss_tot, 0};
  }
}

ExperimentResult run_continuous_rb(const ExperimentConfig& c) {
  require_valid(c);
  ExperimentResult r;
  SystemParams p = with_drive(c, c.continuous_snr, true);
  r.drive_amp = p.drive_amp;
  if (c.classifier.snr > 0) {
    r.classifier = c.classifier;
  } else {
    ShotTimeline tl;
    push(tl, snap(c.window), Activity::ProbeOn);
    tl.windows.push_back({0, tl.total_duration()});
    r.classifier = calibrate_on(p, tl, true, c.calibration_shots, stream(c.seed, 0xca11, 3), c.threads);
  }
  const ClassifierConfig& cls = r.classifier;
  // Discrete checks use their own drive and threshold.
  bool compare = c.seep_probability > 0 && c.discrete_checks > 0;
  SystemParams pd = c.params;
  ClassifierConfig cls_d;
  if (compare) {
    pd = with_drive(c, c.check_snr, false);
    cls_d = classifier_for(c, pd, 4);
  }
  ErrorChannelParams per_clifford = compose(clifford_channel(p.x90_error), c.injected);

  size_t nl = c.lengths.size();
  auto shots = static_cast<size_t>(c.shots_per_point);
  std::vector<Outcome> out(nl * shots), outd(compare ? nl * shots : 0);
  std::vector<std::vector<complex>> traces(static_cast<size_t>(std::min<int>(c.trace_shots, c.shots_per_point)));
  std::vector<double> trace_t0(traces.size()), trace_w(traces.size());
  parallel_for(static_cast<int>(out.size()), c.threads, [&](int idx) {
    auto u = static_cast<size_t>(idx);
    size_t k = u / shots, i = u % shots;
    int m = c.lengths[k];
    uint64_t seed = stream(c.seed, 0xc0de, static_cast<uint64_t>(m) * 1000003u + i);
    RBSequence seq = generate_sequence(m, seed, false, INT_MAX);
    bool target_one = i % 2 == 1;
    std::mt19937_64 ep(shot_seed(seed, 2));
    bool episode = std::uniform_real_distribution<double>(0, 1)(ep) < c.seep_probability;
    auto shot_params = [&](SystemParams q) {
      if (episode) {
        q.t_erasure_0L = q.t_erasure_1L = c.seep_t_erasure;
        q.t_heat = c.seep_t_heat;
      }
      return q;
    };
    auto finish = [&](const ShotResult& res, const ClassifierConfig& cl, uint64_t s) {
      Outcome o;
      bool logical_end = res.final_state.sector == Sector::Logical;
      o.kept_alt = logical_end;
      o.kept = logical_end && all_logical(res, cl);
      if (logical_end) {
        double z = res.final_state.bloch[2];
        o.success = ideal_readout(target_one ? -z : z, s);
      }
      o.seep = res.has_event(EventKind::ReheatJump);
      return o;
    };
    ShotTimeline tl = continuous_timeline(seq, target_one, p, per_clifford, c.window);
    tl.rng_seed = shot_seed(seed, 1);
    ShotResult res = simulate_shot(tl, shot_params(p), {});
    out[u] = finish(res, cls, tl.rng_seed);
    if (k == 0 && i < traces.size()) {
      for (const auto& pt : res.window_points) traces[i].push_back(pt);
      trace_t0[i] = tl.windows.empty() ? 0 : tl.windows[0].start;
      trace_w[i] = tl.windows.empty() ? 0 : tl.windows[0].duration;
    }
    if (compare) {
      ShotTimeline td = discrete_timeline(seq, target_one, pd, per_clifford, c.discrete_checks);
      td.rng_seed = shot_seed(seed, 3);
      ShotResult rd = simulate_shot(td, shot_params(pd), {});
      outd[u] = finish(rd, cls_d, td.rng_seed);
    }
  });

  std::vector<long> kw(nl, 0), sw(nl, 0), ke(nl, 0), se(nl, 0), all(nl, static_cast<long>(shots));
  std::vector<long> seep_w(nl, 0), seep_e(nl, 0), kd(nl, 0), seep_d(nl, 0);
  for (size_t k = 0; k < nl; ++k) {
    for (size_t i = 0; i < shots; ++i) {
      const Outcome& o = out[k * shots + i];
      if (o.kept) {
        ++kw[k];
        sw[k] += o.success;
        seep_w[k] += o.seep;
      }
      if (o.kept_alt) {
        ++ke[k];
        se[k] += o.success;
        seep_e[k] += o.seep;
      }
      if (compare) {
        const Outcome& d = outd[k * shots + i];
        if (d.kept) {
          ++kd[k];
          seep_d[k] += d.seep;
        }
      }
    }
  }
  std::vector<double> n_w, n_e, n_dummy;
  r.curves["postselection_windowed"] = proportion_curve(c.lengths, kw, all, 1, "postselection_windowed",
                                                        r.diagnostics, nullptr);
  r.curves["postselection_eol"] = proportion_curve(c.lengths, ke, all, 1, "postselection_eol", r.diagnostics, nullptr);
  Series sv_w = proportion_curve(c.lengths, sw, kw, c.min_survivors, "survival_windowed", r.diagnostics, &n_w);
  Series sv_e = proportion_curve(c.lengths, se, ke, c.min_survivors, "survival_eol", r.diagnostics, &n_e);
  r.curves["survival_windowed"] = sv_w;
  r.curves["survival_eol"] = sv_e;
  FitResult fw = fit_curve(r, "survival_windowed", sv_w, n_w, 0.5);
  FitResult fe = fit_curve(r, "survival_eol", sv_e, n_e, 0.5);
  ErrorRate ew = rb_error_from_decay(fw.value("p"), fw.sigma("p"));
  r.derived["residual_per_clifford"] = to_estimate(ew);
  r.derived["residual_per_x90"] = {ew.value / 2, ew.sigma / 2};
  r.derived["residual_per_clifford_eol"] = to_estimate(rb_error_from_decay(fe.value("p"), fe.sigma("p")));

  if (c.seep_probability > 0) {
    r.curves["uncaught_seep_windowed"] =
        proportion_curve(c.lengths, seep_w, kw, 1, "uncaught_seep_windowed", r.diagnostics, nullptr);
    r.curves["uncaught_seep_eol"] = proportion_curve(c.lengths, seep_e, ke, 1, "uncaught_seep_eol", r.diagnostics, nullptr);
    auto frac = [](long a, long b) {
      double p = b > 0 ? static_cast<double>(a) / b : 0.0;
      return Estimate{p, b > 0 ? std::sqrt(p * (1 - p) / b) : 0.0};
    };
    r.derived["uncaught_seep_continuous"] = frac(seep_w[nl - 1], kw[nl - 1]);
    if (compare) {
      r.curves["uncaught_seep_discrete"] =
          proportion_curve(c.lengths, seep_d, kd, 1, "uncaught_seep_discrete", r.diagnostics, nullptr);
      r.derived["uncaught_seep_discrete"] = frac(seep_d[nl - 1], kd[nl - 1]);
    }
  }

  for (size_t i = 0; i < traces.size(); ++i) {
    Series t;
    for (size_t w = 0; w < traces[i].size(); ++w) {
      t.x.push_back((trace_t0[i] + (static_cast<double>(w) + 1) * trace_w[i]) * 1e6);
      t.y.push_back(project(traces[i][w], cls));
      t.yerr.push_back(0);
    }
    r.curves["trace_" + std::to_string(i)] = t;
  }

  snr_series(c, p, r);
  return r;
}

ExperimentResult run_snr_series(const ExperimentConfig& c) {
  require_valid(c);
  ExperimentResult r;
  SystemParams p = with_drive(c, c.continuous_snr, true);
  r.drive_amp = p.drive_amp;
  snr_series(c, p, r);
  return r;
}

// ---------------------------------------------------------------- T_erasure

ExperimentResult run_t_erasure_compare(const ExperimentConfig& c) {
  require_valid(c);
  ExperimentResult r;
  SystemParams p = with_drive(c, c.check_snr, false);
  r.drive_amp = p.drive_amp;
  size_t nl = c.lengths.size();
  auto shots = static_cast<size_t>(c.shots_per_point);
  std::vector<char> alive(2 * nl * shots);
  parallel_for(static_cast<int>(alive.size()), c.threads, [&](int idx) {
    auto u = static_cast<size_t>(idx);
    size_t arm = u / (nl * shots), k = (u / shots) % nl, i = u % shots;
    ShotTimeline tl;
    tl.initial = DualRailState::one();
    double delay = snap(c.lengths[k] * 1e-9);
    push(tl, delay, arm == 1 ? Activity::ProbeOn : Activity::Idle);
    push(tl, kGrid, Activity::Idle);
    tl.rng_seed = stream(c.seed, 0x7e00 + arm, static_cast<uint64_t>(c.lengths[k]) * 1000003u + i);
    SimOptions opt;
    opt.mode = RecordMode::None;
    alive[u] = simulate_shot(tl, p, {}, opt).final_state.sector == Sector::Logical;
  });
  std::vector<long> all(nl, static_cast<long>(shots));
  Estimate life[2];
  const char* names[2] = {"off", "on"};
  for (size_t arm = 0; arm < 2; ++arm) {
    std::vector<long> a(nl, 0);
    for (size_t k = 0; k < nl; ++k) {
      for (size_t i = 0; i < shots; ++i) a[k] += alive[(arm * nl + k) * shots + i];
    }
    std::vector<double> n;
    std::string label = std::string("population_") + names[arm];
    Series s = proportion_curve(c.lengths, a, all, 1, label, r.diagnostics, &n);
    for (double& x : s.x) x *= 1e-3;  // ns -> us
    r.curves[label] = s;
    FitResult f = fit_curve(r, label, s, n, 0.0);
    double pv = f.value("p"), ps = f.sigma("p");
    double lp = std::log(pv);
    if (!(lp < 0)) throw ExperimentError(label + ": population does not decay");
    // p = exp(-1 us / T)
    double t = -1e-6 / lp;
    life[arm] = {t, t * ps / (pv * std::fabs(lp))};
    r.derived[std::string("t_erasure_") + names[arm]] = life[arm];
  }
  double ratio = life[1].value / life[0].value;
  r.derived["lifetime_ratio"] = {ratio, ratio * std::hypot(life[0].sigma / life[0].value,
                                                           life[1].sigma / life[1].value)};
  return r;
}

// ---------------------------------------------------------------- leak sweep

ExperimentResult run_leak_sweep(const ExperimentConfig& c) {
  require_valid(c);
  if (!(c.params.mist_prob_per_check > 0)) throw ValidationError("mist_prob_per_check: must be positive for a leak sweep");
  if (c.radii.empty()) throw ValidationError("radii: must be nonempty");
  ExperimentResult r;
  SystemParams p = with_drive(c, c.leak_snr, false);
  r.drive_amp = p.drive_amp;
  r.classifier = classifier_for(c, p, 5);
  const ClassifierConfig& cls = r.classifier;

  auto shots = static_cast<size_t>(c.shots_per_point);
  struct LeakOut {
    double distance = 0;  // from the logical center, units of sigma
    Sector sector = Sector::Logical;
  };
  std::vector<LeakOut> out(shots);
  parallel_for(static_cast<int>(shots), c.threads, [&](int idx) {
    auto i = static_cast<size_t>(idx);
    ShotTimeline tl;
    push_check(tl);
    tl.initial = i % 2 ? DualRailState::one() : DualRailState::zero();
    tl.rng_seed = stream(c.seed, 0x1ea4, i);
    ShotResult res = simulate_shot(tl, p, c.injected);
    out[i] = {std::abs(res.window_points.at(0) - cls.center) / cls.sigma, res.window_sectors.at(0)};
  });

  std::vector<double> radii = c.radii;
  std::sort(radii.begin(), radii.end());
  double n = static_cast<double>(shots);
  long leaked = 0;
  for (const auto& o : out) leaked += o.sector == Sector::Leaked;
  Series res_c, era_c, leak_res;
  for (double rad : radii) {
    long flagged = 0, residual = 0, leak_left = 0;
    for (const auto& o : out) {
      bool f = o.distance > rad;
      flagged += f;
      if (!f && o.sector != Sector::Logical) ++residual;
      if (!f && o.sector == Sector::Leaked) ++leak_left;
    }
    auto push_p = [&](Series& s, long k) {
      double q = static_cast<double>(k) / n;
      s.x.push_back(rad);
      s.y.push_back(q);
      s.yerr.push_back(std::sqrt(q * (1 - q) / n));
    };
    push_p(res_c, residual);
    push_p(era_c, flagged);
    push_p(leak_res, leak_left);
  }
  r.curves["residual_error"] = res_c;
  r.curves["erasure_error"] = era_c;
  r.curves["leak_residual"] = leak_res;
  bool monotone = true;
  for (size_t i = 1; i < radii.size(); ++i) {
    if (res_c.y[i] < res_c.y[i - 1] || era_c.y[i] > era_c.y[i - 1]) monotone = false;
  }
  if (!monotone) r.diagnostics.push_back("leak sweep: trade-off is not monotone");
  r.derived["monotone"] = {monotone ? 1.0 : 0.0, 0};
  double lr = static_cast<double>(leaked) / n;
  r.derived["leak_rate"] = {lr, std::sqrt(lr * (1 - lr) / n)};
  // Detection at 3 sigma, from the labels.
  if (leaked > 0) {
    long det = 0;
    for (const auto& o : out) det += o.sector == Sector::Leaked && o.distance > cls.radius_sigma;
    double q = static_cast<double>(det) / static_cast<double>(leaked);
    r.derived["leak_detection"] = {q, std::sqrt(q * (1 - q) / static_cast<double>(leaked))};
  }
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::Ilrb: return run_ilrb(c);
    case ExperimentKind::InducedBitflip:
    case ExperimentKind::InducedDephasing: return run_induced_ladders(c);
    case ExperimentKind::ContinuousRb: return run_continuous_rb(c);
    case ExperimentKind::TErasureCompare: return run_t_erasure_compare(c);
    case ExperimentKind::LeakSweep: return run_leak_sweep(c);
  }
  throw ValidationError("experiment: unknown kind");
}

}  // namespace dualrail
