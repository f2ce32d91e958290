// Copyright 2026 The Photostat Authors
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

#ifndef PHOTOSTAT_DETECTION_H
#define PHOTOSTAT_DETECTION_H

#include <cstdint>
#include <variant>
#include <vector>

#include "photostat/emitter.h"
#include "photostat/timetag.h"

namespace photostat {

/// Loss, beam splitting and timing of the HBT detection setup.
struct DetectionConfig {
    /// Probability that an emitted photon produces a detector tag.
    double eta_t = 0.25;
    int n_detectors = 4;
    /// Per-detector routing probabilities; empty means a balanced split.
    std::vector<double> splitting;
    /// Gaussian timing jitter (detector + tagger), standard deviation.
    double jitter_ps = 25.0;
    /// Uncorrelated background per detector.
    double background_cps = 0.0;
    /// Clock-to-signal delay added to every emission. The default places the
    /// end of a 15 ps pulse at 150 ps after the clock edge, so the lifetime
    /// peak sits near 200 ps once jitter is included.
    picoseconds delay_ps = 135;

    /// Throws validation_error naming the offending field.
    void validate() const;
    std::vector<double> resolved_splitting() const;
};

/// Applies loss, routing, jitter and background to simulated emissions.
///
/// Channel 0 carries one clock tag per pulse at pulse_index * clock_period.
/// Detector tags land at pulse_index * clock_period + delay + emission time + jitter
/// on channels 1..n_detectors; tags that would fall before t = 0 are dropped.
TimeTagStream detect(
    const EmissionLog &log, const DetectionConfig &det, picoseconds clock_period, uint64_t seed, unsigned threads = 0);

struct CoherentSource {
    double mean;
};
struct ThermalSource {
    double mean;
};
struct FockSource {
    int n;
};
using ReferenceSource = std::variant<CoherentSource, ThermalSource, FockSource>;

/// Emissions of a textbook source: Poisson, geometric (Bose-Einstein) or fixed
/// photon number per pulse, each photon delayed by an exponential with `lifetime_ps`.
EmissionLog reference_emissions(const ReferenceSource &source, uint64_t n_pulses, double lifetime_ps, uint64_t seed);

TimeTagStream simulate_reference(
    const ReferenceSource &source,
    uint64_t n_pulses,
    const DetectionConfig &det,
    uint64_t seed,
    picoseconds clock_period = kDefaultClockPeriod,
    double lifetime_ps = 204.0,
    unsigned threads = 0);

}  // namespace photostat

#endif
