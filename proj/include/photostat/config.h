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

#ifndef PHOTOSTAT_CONFIG_H
#define PHOTOSTAT_CONFIG_H

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "photostat/detection.h"
#include "photostat/emitter.h"

namespace photostat {

/// Everything `simulate` needs: the emitter (or a reference source standing
/// in for it), the detection setup and the pulse areas to run.
struct SimulationConfig {
    EmitterConfig emitter;
    DetectionConfig detection;
    /// Pulse areas in units of pi; one entry unless the config asks for a sweep.
    std::vector<double> pulse_area_pi{1.0};
    std::optional<ReferenceSource> source;

    /// The emitter for sweep point i.
    EmitterConfig emitter_at(size_t i) const;
};

/// Reads a JSON object with keys pulse_area_pi, pulse_duration_ps,
/// pulse_shape, lifetime_ps, repetition_period_ps, n_pulses, eta_t,
/// n_detectors, splitting, jitter_ps, delay_ps, background_cps, seed and
/// source. pulse_area_pi may be a number, a list, or {start, stop, step}.
/// Unknown keys, wrong types and invalid values throw validation_error
/// naming the key.
SimulationConfig parse_simulation_config(const nlohmann::json &j);
SimulationConfig load_simulation_config(const std::filesystem::path &path);

nlohmann::json to_json(const SimulationConfig &config);

/// Reads a whole JSON file; parse failures become validation_error.
nlohmann::json read_json_file(const std::filesystem::path &path);

/// Inclusive grid start, start + step, ... up to stop (within 1e-9 step).
std::vector<double> linear_grid(double start, double stop, double step);

}  // namespace photostat

#endif
