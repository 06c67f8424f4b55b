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


#ifndef DUALRAIL_EXPERIMENTS_H
#define DUALRAIL_EXPERIMENTS_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dualrail/channel.h"
#include "dualrail/classifier.h"
#include "dualrail/clifford.h"
#include "dualrail/core.h"
#include "dualrail/fitting.h"
#include "dualrail/trajectory.h"

namespace dualrail {

// Timeline constants, seconds.
inline constexpr double kCheckProbe = 384e-9;
inline constexpr double kCheckRingdown = 112e-9;
inline constexpr double kCliffordDuration = 48e-9;  // two X90 pulses
inline constexpr double kEchoDuration = 48e-9;
inline constexpr double kRingUp = 96e-9;

enum class ExperimentKind { Ilrb, InducedBitflip, InducedDephasing, ContinuousRb, TErasureCompare, LeakSweep };
const char* experiment_name(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Ilrb;
  /// Clifford counts (RB), check counts (ladders) or delays in ns (T_erasure).
  std::vector<int> lengths{2, 5, 10, 20, 50, 100, 200};
  int shots_per_point = 2000;
  SystemParams params;
  /// Channel applied at the end of every erasure check. Under continuous
  /// monitoring it is applied after every Clifford instead.
  ErrorChannelParams injected;
  /// Used as is when calibrated (snr > 0), otherwise calibrated from
  /// simulated reference shots.
  ClassifierConfig classifier;
  uint64_t seed = 1;
  int threads = 1;

  /// Probe amplitude target when params.drive_amp is 0.
  double check_snr = 11.6;
  int check_every = 5;
  int min_survivors = 50;
  int calibration_shots = 4000;

  // Induced ladders.
  double ladder_time = 49.92e-6;
  /// Smallest check count entering the tail fits.
  int ladder_tail_min = 16;

  // Continuous detection.
  double window = 480e-9;
  double continuous_snr = 16.1;
  int discrete_checks = 10;
  /// Fraction of shots running through a fast erase/reheat episode.
  double seep_probability = 0;
  double seep_t_erasure = 1e-6;
  double seep_t_heat = 0.25e-6;
  /// Windows (ns) of the SNR-vs-length series; empty skips it.
  std::vector<int> snr_windows{60, 120, 180, 240, 300, 360, 420, 480};
  int snr_records = 10000;
  /// Shots of the first length exported as window traces.
  int trace_shots = 3;

  // Leak sweep.
  double leak_snr = 120;
  std::vector<double> radii{0.5, 1, 1.5, 2, 2.5, 3, 4, 5, 6, 8, 1e9};
};

/// Experiment-appropriate lengths and shot counts.
ExperimentConfig default_config(ExperimentKind kind);
void require_valid(const ExperimentConfig& config);

struct Series {
  std::vector<double> x, y, yerr;
  bool operator==(const Series&) const = default;
};

struct Estimate {
  double value = 0;
  double sigma = 0;
  bool operator==(const Estimate&) const = default;
};

struct ExperimentResult {
  std::map<std::string, Series> curves;
  std::map<std::string, FitResult> fits;
  std::map<std::string, Estimate> derived;
  /// Points dropped, flagged fits and similar notes.
  std::vector<std::string> diagnostics;
  /// Drive amplitude and classifier actually used.
  double drive_amp = 0;
  ClassifierConfig classifier;
};

/// Raised when an experiment cannot produce a result, e.g. too few
/// postselected shots at every length.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Drive amplitude giving `snr` for one probe-plus-ringdown check window,
/// from the noise-free response starting with an empty cavity.
double calibrate_check_drive(const SystemParams& params, double snr, double probe = kCheckProbe,
                             double ringdown = kCheckRingdown);
/// Drive amplitude giving `snr` for a `window` of steady-state probing.
double calibrate_continuous_drive(const SystemParams& params, double snr, double window);
/// Threshold and circular classifier from simulated logical and erased
/// check windows (lifetimes switched off).
ClassifierConfig calibrate_check_classifier(const SystemParams& params, int shots, uint64_t seed);

// Timelines. Each check window spans probe plus ringdown.
ShotTimeline ilrb_timeline(const RBSequence& seq, bool target_one, const SystemParams& params);
ShotTimeline ladder_timeline(int checks, bool echo, double total, const SystemParams& params);
ShotTimeline continuous_timeline(const RBSequence& seq, bool target_one, const SystemParams& params,
                                 const ErrorChannelParams& per_clifford, double window);
ShotTimeline discrete_timeline(const RBSequence& seq, bool target_one, const SystemParams& params,
                               const ErrorChannelParams& per_clifford, int checks);

/// Channel of one Clifford built from two X90 pulses.
ErrorChannelParams clifford_channel(double x90_error);

ExperimentResult run_ilrb(const ExperimentConfig& config);
/// Bit-flip (preparations |0_L>, |1_L>) and echo (|+_L>) ladders at fixed
/// total time.
ExperimentResult run_induced_ladders(const ExperimentConfig& config);
ExperimentResult run_continuous_rb(const ExperimentConfig& config);
/// Only the SNR-versus-window part of run_continuous_rb.
ExperimentResult run_snr_series(const ExperimentConfig& config);
ExperimentResult run_t_erasure_compare(const ExperimentConfig& config);
ExperimentResult run_leak_sweep(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Decay fit with model-based binomial weights: an unweighted pass, then
/// sigma_i = sqrt(y_i (1 - y_i) / n_i) from the first-pass model.
FitResult fit_binomial_decay(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& n, double offset);

}  // namespace dualrail

#endif  // DUALRAIL_EXPERIMENTS_H
