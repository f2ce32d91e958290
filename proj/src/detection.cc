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

#include "photostat/detection.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "photostat/errors.h"
#include "photostat/parallel.h"
#include "photostat/rng.h"

namespace photostat {

void DetectionConfig::validate() const {
    if (!(eta_t >= 0 && eta_t <= 1)) {
        throw validation_error("eta_t must be in [0, 1], got " + std::to_string(eta_t));
    }
    if (n_detectors < 1 || n_detectors > 4) {
        throw validation_error("n_detectors must be in 1..4");
    }
    if (!splitting.empty()) {
        if (splitting.size() != static_cast<size_t>(n_detectors)) {
            throw validation_error("splitting must have one entry per detector");
        }
        double total = 0;
        for (double s : splitting) {
            if (!(s >= 0)) {
                throw validation_error("splitting entries must be non-negative");
            }
            total += s;
        }
        if (std::abs(total - 1) > 1e-12) {
            throw validation_error("splitting must sum to 1");
        }
    }
    if (!(jitter_ps >= 0)) {
        throw validation_error("jitter_ps must be non-negative");
    }
    if (!(background_cps >= 0)) {
        throw validation_error("background_cps must be non-negative");
    }
    if (delay_ps < 0) {
        throw validation_error("delay_ps must be non-negative");
    }
}

std::vector<double> DetectionConfig::resolved_splitting() const {
    if (splitting.empty()) {
        return std::vector<double>(n_detectors, 1.0 / n_detectors);
    }
    return splitting;
}

TimeTagStream detect(
    const EmissionLog &log, const DetectionConfig &det, picoseconds clock_period, uint64_t seed, unsigned threads) {
    det.validate();
    if (clock_period <= 0) {
        throw validation_error("clock_period must be positive");
    }
    auto split = det.resolved_splitting();
    std::vector<double> cumulative(split.size());
    std::partial_sum(split.begin(), split.end(), cumulative.begin());
    double background_mean = det.background_cps * static_cast<double>(clock_period) * 1e-12;

    size_t n_pulses = log.n_pulses();
    size_t n_chunks = std::min<size_t>(resolve_threads(threads), std::max<size_t>(n_pulses, 1));
    std::vector<std::vector<TimeTag>> parts(n_chunks);
    for_each_chunk(n_pulses, n_chunks, [&](size_t c, size_t begin, size_t end) {
        auto &out = parts[c];
        for (size_t k = begin; k < end; k++) {
            picoseconds origin = static_cast<picoseconds>(k) * clock_period;
            out.push_back({origin, kClockChannel});
            CounterRng rng(seed, RngPurpose::detection, k);
            for (double t : log.record(k).emission_times) {
                if (!(rng.uniform() < det.eta_t)) {
                    continue;
                }
                double u = rng.uniform();
                int channel = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
                channel = std::min(channel, det.n_detectors - 1);
                double jitter = det.jitter_ps > 0 ? det.jitter_ps * rng.normal() : 0.0;
                auto time = origin + det.delay_ps + std::llround(t + jitter);
                if (time >= 0) {
                    out.push_back({time, static_cast<uint8_t>(channel + 1)});
                }
            }
            if (background_mean > 0) {
                CounterRng bg(seed, RngPurpose::background, k);
                std::poisson_distribution<int> count(background_mean);
                for (int d = 0; d < det.n_detectors; d++) {
                    int n = count(bg);
                    for (int j = 0; j < n; j++) {
                        auto offset = static_cast<picoseconds>(bg.uniform() * static_cast<double>(clock_period));
                        out.push_back({origin + offset, static_cast<uint8_t>(d + 1)});
                    }
                }
            }
        }
    });
    std::vector<TimeTag> tags;
    size_t total = 0;
    for (const auto &p : parts) {
        total += p.size();
    }
    tags.reserve(total);
    for (auto &p : parts) {
        tags.insert(tags.end(), p.begin(), p.end());
        std::vector<TimeTag>().swap(p);
    }
    return TimeTagStream::from_unsorted(std::move(tags), clock_period, static_cast<uint16_t>(det.n_detectors));
}

EmissionLog reference_emissions(const ReferenceSource &source, uint64_t n_pulses, double lifetime_ps, uint64_t seed) {
    if (!(lifetime_ps > 0)) {
        throw validation_error("lifetime_ps must be positive");
    }
    std::visit(
        [](const auto &s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, FockSource>) {
                if (s.n < 0) {
                    throw validation_error("fock photon number must be non-negative");
                }
            } else {
                if (!(s.mean >= 0)) {
                    throw validation_error("source mean photon number must be non-negative");
                }
            }
        },
        source);

    EmissionLog log;
    std::vector<double> times;
    for (uint64_t k = 0; k < n_pulses; k++) {
        CounterRng rng(seed, RngPurpose::reference_source, k);
        int n = std::visit(
            [&](const auto &s) -> int {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, CoherentSource>) {
                    return s.mean > 0 ? std::poisson_distribution<int>(s.mean)(rng) : 0;
                } else if constexpr (std::is_same_v<S, ThermalSource>) {
                    return s.mean > 0 ? std::geometric_distribution<int>(1.0 / (1.0 + s.mean))(rng) : 0;
                } else {
                    return s.n;
                }
            },
            source);
        times.clear();
        for (int j = 0; j < n; j++) {
            times.push_back(rng.exponential(lifetime_ps));
        }
        std::sort(times.begin(), times.end());
        log.append_pulse(times);
    }
    return log;
}

TimeTagStream simulate_reference(
    const ReferenceSource &source,
    uint64_t n_pulses,
    const DetectionConfig &det,
    uint64_t seed,
    picoseconds clock_period,
    double lifetime_ps,
    unsigned threads) {
    auto log = reference_emissions(source, n_pulses, lifetime_ps, seed);
    return detect(log, det, clock_period, seed, threads);
}

}  // namespace photostat
