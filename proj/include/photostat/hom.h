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

#ifndef PHOTOSTAT_HOM_H
#define PHOTOSTAT_HOM_H

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "photostat/emitter.h"
#include "photostat/timetag.h"

namespace photostat {

/// Emission times (ps from pulse start) of the photons meeting at the beam splitter.
using EmissionPair = std::pair<double, double>;

constexpr size_t kMinOverlapPairs = 1000;

/// Pairs the first emission times of consecutive non-empty pulses: (0, 1), (2, 3), ...
std::vector<EmissionPair> first_emission_pairs(const EmissionLog &log);

/// Mean overlap exp(-|dt| / tau) of two exponential wavepackets starting dt apart.
///
/// With t_start, only pairs whose photons both start at or after t_start are
/// kept. Needs kMinOverlapPairs pairs; throws data_error if the gate keeps none.
double overlap_from_emission_times(std::span<const EmissionPair> pairs, double tau,
                                   std::optional<double> t_start = std::nullopt);

/// The same overlap averaged over all distinct pairs of a sample of start
/// times, i.e. integrated exactly over the empirical density. O(n log n).
double overlap_from_samples(std::vector<double> times, double tau, std::optional<double> t_start = std::nullopt);

/// The overlap integrated over a first-emission-time density, conditioned on
/// t >= t_start when given.
double overlap_from_density(const EmissionTimeDensity &density, double tau,
                            std::optional<double> t_start = std::nullopt);

/// Mean wavepacket overlap from the raw visibility, correcting for the
/// multi-photon component: M = (V + g2) / (1 - g2). Defined for g2 in [0, 1).
double correct_visibility(double v_raw, double g2);

/// Inverse of correct_visibility: the raw visibility expected for overlap M.
double expected_visibility(double m, double g2);

/// V = 1 - pattern_factor * central / reference.
double visibility_from_counts(double central, double reference, double pattern_factor = 2.0);

struct HomReport {
    double v_raw = 0;
    double g2 = 0;
    double m = 0;
    std::optional<GateWindow> gate;
};

}  // namespace photostat

#endif
