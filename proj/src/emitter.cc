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

#include "photostat/emitter.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "photostat/errors.h"
#include "photostat/parallel.h"
#include "photostat/rng.h"

namespace photostat {

void EmitterConfig::validate() const {
    if (!(pulse_area >= 0) || !std::isfinite(pulse_area)) {
        throw validation_error("pulse_area must be a finite non-negative number");
    }
    if (!(lifetime_ps > 0) || !std::isfinite(lifetime_ps)) {
        throw validation_error("lifetime_ps must be positive");
    }
    if (repetition_period_ps <= 0) {
        throw validation_error("repetition_period_ps must be positive");
    }
    if (!(pulse_duration_ps > 0) || pulse_duration_ps * 10 > static_cast<double>(repetition_period_ps)) {
        throw validation_error("pulse_duration_ps must be positive and much shorter than repetition_period_ps");
    }
    if (n_pulses == 0) {
        throw validation_error("n_pulses must be at least 1");
    }
}

void EmissionLog::append_pulse(std::span<const double> times) {
    times_.insert(times_.end(), times.begin(), times.end());
    offsets_.push_back(times_.size());
}

void EmissionLog::append(const EmissionLog &other) {
    size_t base = times_.size();
    times_.insert(times_.end(), other.times_.begin(), other.times_.end());
    for (size_t k = 1; k < other.offsets_.size(); k++) {
        offsets_.push_back(base + other.offsets_[k]);
    }
}

double EmissionTimeDensity::total_mass() const {
    double total = tail_mass;
    for (const auto &p : points) {
        total += p.mass;
    }
    return total;
}

namespace {

using cplx = std::complex<double>;

/// exp(-i H dt) for H = [[0, rabi/2], [rabi/2, -i gamma/2]].
std::array<cplx, 4> no_jump_propagator(double rabi, double gamma, double dt) {
    // H = a*I + B with a = -i gamma/4 and B traceless, B^2 = s^2 I.
    const cplx i(0, 1);
    cplx b00 = i * (gamma / 4);
    cplx b01 = rabi / 2;
    cplx s = std::sqrt(cplx(rabi * rabi / 4 - gamma * gamma / 16, 0));
    cplx c = std::cos(s * dt);
    cplx sinc = std::abs(s) < 1e-300 ? cplx(dt) : std::sin(s * dt) / s;
    double damp = std::exp(-gamma * dt / 4);
    return {
        damp * (c - i * sinc * b00),
        damp * (-i * sinc * b01),
        damp * (-i * sinc * b01),
        damp * (c + i * sinc * b00),
    };
}

}  // namespace

PulsedEmitter::PulsedEmitter(const EmitterConfig &config) : config_(config) {
    config_.validate();
    double duration = config_.pulse_duration_ps;
    double gamma = 1.0 / config_.lifetime_ps;
    dt_ = duration / kStepsPerPulse;

    std::vector<double> rabi(kStepsPerPulse);
    if (config_.pulse_shape == PulseShape::square) {
        std::fill(rabi.begin(), rabi.end(), config_.pulse_area / duration);
    } else {
        // Gaussian envelope spanning +-3 sigma of the pulse window, normalized on the step grid.
        double sigma = duration / 6;
        double total = 0;
        for (int k = 0; k < kStepsPerPulse; k++) {
            double t = (k + 0.5) * dt_ - duration / 2;
            rabi[k] = std::exp(-t * t / (2 * sigma * sigma));
            total += rabi[k] * dt_;
        }
        for (auto &r : rabi) {
            r *= config_.pulse_area / total;
        }
    }
    propagators_.reserve(kStepsPerPulse);
    for (int k = 0; k < kStepsPerPulse; k++) {
        propagators_.push_back(no_jump_propagator(rabi[k], gamma, dt_));
    }

    if (config_.pulse_shape == PulseShape::square) {
        norm_.resize(kStepsPerPulse + 1);
        excited_.resize(kStepsPerPulse + 1);
        cplx g = 1, e = 0;
        const auto &u = propagators_[0];
        for (int k = 0; k <= kStepsPerPulse; k++) {
            excited_[k] = std::norm(e);
            norm_[k] = std::norm(g) + excited_[k];
            cplx g2 = u[0] * g + u[1] * e;
            cplx e2 = u[2] * g + u[3] * e;
            g = g2;
            e = e2;
        }
    }
}

void PulsedEmitter::emit(uint64_t pulse_index, std::vector<double> &out) const {
    CounterRng rng(config_.seed, RngPurpose::emission, pulse_index);
    int cur = 0;
    double excited = 0;
    while (true) {
        double r = rng.uniform();
        int remaining = kStepsPerPulse - cur;
        int jump = 0;
        if (!norm_.empty()) {
            // The no-jump norm only decreases; find the first step where it falls below r.
            auto first = norm_.begin() + 1;
            auto it = std::partition_point(first, first + remaining, [&](double n) {
                return n >= r;
            });
            if (it != first + remaining) {
                jump = static_cast<int>(it - norm_.begin());
            } else {
                excited = excited_[remaining] / norm_[remaining];
            }
        } else {
            cplx g = 1, e = 0;
            for (int k = cur; k < kStepsPerPulse; k++) {
                const auto &u = propagators_[k];
                cplx g2 = u[0] * g + u[1] * e;
                cplx e2 = u[2] * g + u[3] * e;
                g = g2;
                e = e2;
                if (std::norm(g) + std::norm(e) < r) {
                    jump = k + 1 - cur;
                    break;
                }
            }
            if (jump == 0) {
                excited = std::norm(e) / (std::norm(g) + std::norm(e));
            }
        }
        if (jump == 0) {
            break;
        }
        cur += jump;
        out.push_back(cur * dt_);
    }
    if (rng.uniform() < excited) {
        out.push_back(config_.pulse_duration_ps + rng.exponential(config_.lifetime_ps));
    }
}

double PulsedEmitter::excited_fraction_without_jump() const {
    cplx g = 1, e = 0;
    for (const auto &u : propagators_) {
        cplx g2 = u[0] * g + u[1] * e;
        cplx e2 = u[2] * g + u[3] * e;
        g = g2;
        e = e2;
    }
    return std::norm(e) / (std::norm(g) + std::norm(e));
}

EmissionTimeDensity PulsedEmitter::first_emission_density() const {
    EmissionTimeDensity density;
    density.points.reserve(kStepsPerPulse);
    cplx g = 1, e = 0;
    double norm = 1;
    for (int k = 0; k < kStepsPerPulse; k++) {
        const auto &u = propagators_[k];
        cplx g2 = u[0] * g + u[1] * e;
        cplx e2 = u[2] * g + u[3] * e;
        g = g2;
        e = e2;
        double next = std::norm(g) + std::norm(e);
        density.points.push_back({(k + 1) * dt_, norm - next});
        norm = next;
    }
    density.tail_start = config_.pulse_duration_ps;
    density.tail_mass = std::norm(e);
    density.tail_decay = config_.lifetime_ps;
    return density;
}

EmissionLog simulate_emissions(const EmitterConfig &config, unsigned threads) {
    PulsedEmitter emitter(config);
    size_t n_chunks = resolve_threads(threads);
    std::vector<EmissionLog> parts(std::min<size_t>(n_chunks, config.n_pulses));
    for_each_chunk(config.n_pulses, parts.size(), [&](size_t c, size_t begin, size_t end) {
        std::vector<double> times;
        for (size_t k = begin; k < end; k++) {
            times.clear();
            emitter.emit(k, times);
            parts[c].append_pulse(times);
        }
    });
    EmissionLog log = std::move(parts.front());
    for (size_t c = 1; c < parts.size(); c++) {
        log.append(parts[c]);
    }
    return log;
}

PhotonNumberDist photon_number_histogram(const EmissionLog &log) {
    if (log.n_pulses() == 0) {
        throw validation_error("photon_number_histogram needs at least one record");
    }
    std::array<uint64_t, kMaxPhotonNumber + 1> counts{};
    PhotonNumberDist dist;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        size_t n = log.count(k);
        if (n > kMaxPhotonNumber) {
            dist.truncated = true;
            n = kMaxPhotonNumber;
        }
        counts[n]++;
    }
    for (int n = 0; n <= kMaxPhotonNumber; n++) {
        dist.p[n] = static_cast<double>(counts[n]) / static_cast<double>(log.n_pulses());
    }
    dist.level = DistributionLevel::source;
    return dist;
}

}  // namespace photostat
