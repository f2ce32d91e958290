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

#ifndef PHOTOSTAT_EMITTER_H
#define PHOTOSTAT_EMITTER_H

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "photostat/distribution.h"
#include "photostat/timetag.h"

namespace photostat {

enum class PulseShape { square, gaussian };

/// Two-level emitter driven by one resonant pulse per clock period.
struct EmitterConfig {
    /// Pulse area in radians.
    double pulse_area = std::numbers::pi;
    double pulse_duration_ps = 15.0;
    PulseShape pulse_shape = PulseShape::square;
    double lifetime_ps = 204.0;
    picoseconds repetition_period_ps = kDefaultClockPeriod;
    uint64_t n_pulses = 100000;
    uint64_t seed = 1;

    /// Throws validation_error naming the offending field.
    void validate() const;
};

/// Integration steps per pulse; dt = pulse_duration / kStepsPerPulse.
constexpr int kStepsPerPulse = 1000;

/// Per-pulse emission times (ps from the start of the pulse), stored flat.
class EmissionLog {
  public:
    struct Record {
        uint64_t pulse_index;
        std::span<const double> emission_times;
    };

    EmissionLog() = default;

    size_t n_pulses() const {
        return offsets_.size() - 1;
    }
    size_t total_emissions() const {
        return times_.size();
    }
    Record record(size_t pulse) const {
        return {pulse, {times_.data() + offsets_[pulse], times_.data() + offsets_[pulse + 1]}};
    }
    size_t count(size_t pulse) const {
        return offsets_[pulse + 1] - offsets_[pulse];
    }

    void append_pulse(std::span<const double> times);
    /// Appends all pulses of `other` after ours.
    void append(const EmissionLog &other);

    bool operator==(const EmissionLog &) const = default;

  private:
    std::vector<size_t> offsets_{0};
    std::vector<double> times_;
};

/// Probability mass of a single emission time, as a sum of point masses plus
/// an exponential tail `tail_mass * exp(-(t - tail_start) / tail_decay) / tail_decay`
/// for t >= tail_start. Mass not accounted for belongs to "no emission".
struct EmissionTimeDensity {
    struct Point {
        double time;
        double mass;
    };
    std::vector<Point> points;
    double tail_start = 0;
    double tail_mass = 0;
    double tail_decay = 1;

    double total_mass() const;
};

/// Quantum-jump (Monte-Carlo wavefunction) integration of the driven two-level system.
///
/// During the pulse the state evolves under the non-Hermitian Hamiltonian
/// H = (Omega(t)/2) sigma_x - (i Gamma/2)|e><e| on a fixed grid of kStepsPerPulse
/// steps, with the integrated Rabi frequency equal to the pulse area. A jump
/// records an emission at the end of the step and resets to the ground state.
/// After the pulse the remaining excited population decays once with the
/// lifetime.
class PulsedEmitter {
  public:
    explicit PulsedEmitter(const EmitterConfig &config);

    const EmitterConfig &config() const {
        return config_;
    }
    double step() const {
        return dt_;
    }

    /// Appends the emission times of pulse `pulse_index` to `out`.
    void emit(uint64_t pulse_index, std::vector<double> &out) const;

    /// Excited population right after the pulse, for a trajectory with no jump.
    double excited_fraction_without_jump() const;

    /// Exact density of the first emission time of a pulse.
    EmissionTimeDensity first_emission_density() const;

  private:
    using Mat2 = std::array<std::complex<double>, 4>;

    EmitterConfig config_;
    double dt_;
    std::vector<Mat2> propagators_;
    // Square pulses only: no-jump norm and excited population after k steps from |g>.
    std::vector<double> norm_;
    std::vector<double> excited_;
};

/// Runs `config.n_pulses` pulses. Output is independent of `threads` (0 = hardware concurrency).
EmissionLog simulate_emissions(const EmitterConfig &config, unsigned threads = 0);

/// p_n = fraction of pulses with exactly n emissions, n > 4 folded into p_4.
PhotonNumberDist photon_number_histogram(const EmissionLog &log);

}  // namespace photostat

#endif
