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

#include "photostat/hom.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "photostat/errors.h"

namespace photostat {

namespace {

void require_tau(double tau) {
    if (!(tau > 0)) {
        throw validation_error("overlap time constant must be positive");
    }
}

/// sum over i < j of m_i m_j exp(-(t_j - t_i) / tau), for ascending t.
template <typename Time, typename Mass>
double ordered_pair_sum(size_t n, Time time, Mass mass, double tau) {
    double acc = 0;
    double sum = 0;
    for (size_t j = 1; j < n; j++) {
        acc = (acc + mass(j - 1)) * std::exp(-(time(j) - time(j - 1)) / tau);
        sum += mass(j) * acc;
    }
    return sum;
}

}  // namespace

std::vector<EmissionPair> first_emission_pairs(const EmissionLog &log) {
    std::vector<EmissionPair> pairs;
    std::optional<double> pending;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        auto times = log.record(k).emission_times;
        if (times.empty()) {
            continue;
        }
        if (pending) {
            pairs.emplace_back(*pending, times.front());
            pending.reset();
        } else {
            pending = times.front();
        }
    }
    return pairs;
}

double overlap_from_emission_times(std::span<const EmissionPair> pairs, double tau, std::optional<double> t_start) {
    require_tau(tau);
    if (pairs.size() < kMinOverlapPairs) {
        throw data_error("need at least " + std::to_string(kMinOverlapPairs) + " emission pairs, got " +
                         std::to_string(pairs.size()));
    }
    double sum = 0;
    size_t kept = 0;
    for (const auto &[a, b] : pairs) {
        if (t_start && (a < *t_start || b < *t_start)) {
            continue;
        }
        sum += std::exp(-std::abs(a - b) / tau);
        kept++;
    }
    if (kept == 0) {
        throw data_error("no emission pairs survive the gate");
    }
    return sum / static_cast<double>(kept);
}

double overlap_from_samples(std::vector<double> times, double tau, std::optional<double> t_start) {
    require_tau(tau);
    if (t_start) {
        std::erase_if(times, [&](double t) {
            return t < *t_start;
        });
    }
    if (times.size() < 2) {
        throw data_error("need at least two start times after gating");
    }
    std::sort(times.begin(), times.end());
    double n = static_cast<double>(times.size());
    double s = ordered_pair_sum(
        times.size(), [&](size_t i) { return times[i]; }, [](size_t) { return 1.0; }, tau);
    return 2 * s / (n * (n - 1));
}

double overlap_from_density(const EmissionTimeDensity &density, double tau, std::optional<double> t_start) {
    require_tau(tau);
    std::vector<EmissionTimeDensity::Point> points;
    for (const auto &p : density.points) {
        if (!t_start || p.time >= *t_start) {
            points.push_back(p);
        }
    }
    std::sort(points.begin(), points.end(), [](const auto &a, const auto &b) {
        return a.time < b.time;
    });
    double tail_start = density.tail_start;
    double tail_mass = density.tail_mass;
    if (t_start && *t_start > tail_start) {
        tail_mass *= std::exp(-(*t_start - tail_start) / density.tail_decay);
        tail_start = *t_start;
    }

    double total = tail_mass;
    double diagonal = 0;
    double point_tail = 0;
    double d = density.tail_decay;
    for (const auto &p : points) {
        total += p.mass;
        diagonal += p.mass * p.mass;
        point_tail += p.mass * tail_mass * tau / (d + tau) * std::exp(-std::abs(tail_start - p.time) / tau);
    }
    if (!(total > 0)) {
        throw data_error("no emission probability survives the gate");
    }
    double cross = ordered_pair_sum(
        points.size(), [&](size_t i) { return points[i].time; }, [&](size_t i) { return points[i].mass; }, tau);
    double tail_tail = tail_mass * tail_mass * tau / (d + tau);
    return (diagonal + 2 * cross + 2 * point_tail + tail_tail) / (total * total);
}

double correct_visibility(double v_raw, double g2) {
    if (!(g2 >= 0 && g2 < 1)) {
        throw validation_error("multi-photon correction needs g2 in [0, 1), got " + std::to_string(g2));
    }
    if (!(v_raw >= -1 && v_raw <= 1)) {
        throw validation_error("raw visibility must be in [-1, 1], got " + std::to_string(v_raw));
    }
    return (v_raw + g2) / (1 - g2);
}

double expected_visibility(double m, double g2) {
    if (!(g2 >= 0 && g2 < 1)) {
        throw validation_error("multi-photon correction needs g2 in [0, 1), got " + std::to_string(g2));
    }
    return m * (1 - g2) - g2;
}

double visibility_from_counts(double central, double reference, double pattern_factor) {
    if (!(reference > 0)) {
        throw data_error("reference coincidences must be positive");
    }
    if (central < 0) {
        throw validation_error("central coincidences cannot be negative");
    }
    return 1 - pattern_factor * central / reference;
}

}  // namespace photostat
