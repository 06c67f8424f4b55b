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

#ifndef DUALRAIL_TRAJECTORY_H
#define DUALRAIL_TRAJECTORY_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dualrail/channel.h"
#include "dualrail/core.h"

namespace dualrail {

enum class Activity { Idle, Gate, ProbeOn, EchoPulse };

struct Segment {
  double duration = 0;
  Activity activity = Activity::Idle;
  /// Clifford applied at the end of a Gate segment.
  int clifford = 0;
  /// Marks the probe segment of an erasure check: leakage is sampled at its
  /// onset and the injected channel is applied at its end.
  bool check = false;
  /// Keeps the probe drive on through a non-probe segment (gates under
  /// continuous monitoring).
  bool drive_on = false;
  /// Error applied after the gate of a Gate or EchoPulse segment.
  ErrorChannelParams channel;
};

/// Boxcar integration window, in seconds from the start of the shot.
struct Window {
  double start = 0;
  double duration = 0;
};

struct ShotTimeline {
  std::vector<Segment> segments;
  std::vector<Window> windows;
  uint64_t rng_seed = 0;
  DualRailState initial;

  double total_duration() const;
};

enum class EventKind { ErasureJump, ReheatJump, LeakJump, ZKick, BitFlip };

const char* event_name(EventKind k);

struct Event {
  double time = 0;
  EventKind kind = EventKind::ZKick;
  bool operator==(const Event&) const = default;
};

enum class RecordMode {
  None,        ///< no record, events and final state only
  Integrated,  ///< one noisy boxcar mean per timeline window
  Full,        ///< every sample of the record
};

struct SimOptions {
  RecordMode mode = RecordMode::Integrated;
  /// Integration step; 0 picks one automatically.
  double dt = 0;
  /// Start the cavity at the steady state of the first segment.
  bool steady_start = false;
  bool add_noise = true;
};

struct ShotResult {
  MeasurementRecord record;
  std::vector<complex> window_points;
  /// Sector at the end of each window.
  std::vector<Sector> window_sectors;
  DualRailState final_state;
  std::vector<Event> events;

  bool has_event(EventKind k) const;
};

/// Step size: min(1/(20 kappa_max), shortest segment / 10), rounded down to an
/// integer fraction of a nanosecond. A nonzero `requested` is used as is after
/// checking it against the stability bound.
double choose_dt(const ShotTimeline& timeline, const SystemParams& params, double requested = 0);

/// Per-quadrature standard deviation of one record sample.
double noise_sigma(const SystemParams& params, double dt);

uint64_t shot_seed(uint64_t master, uint64_t index);

ShotResult simulate_shot(const ShotTimeline& timeline, const SystemParams& params,
                         const ErrorChannelParams& injected, const SimOptions& options = {});

/// Adds white complex Gaussian noise of per-quadrature std `sigma`.
void add_record_noise(std::vector<complex>& samples, double sigma, std::mt19937_64& rng);

MeasurementRecord generate_record(const std::vector<complex>& alpha_path, const SystemParams& params, double dt,
                                  uint64_t seed);

/// exp(-(kappa/2 + i delta) t).
complex ringdown_tail(double kappa, double delta, double t);

/// Ringdown factor of the given sector's field after the drive switches off.
complex ringdown_tail(const SystemParams& params, double t, Sector sector = Sector::Logical);

std::string record_to_csv(const MeasurementRecord& record);
std::string events_to_text(const std::vector<Event>& events);

}  // namespace dualrail

#endif  // DUALRAIL_TRAJECTORY_H
