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

#include <cmath>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "photostat/errors.h"

namespace photostat {
namespace {

constexpr double kTau = 204.0;

EmitterConfig pi_pulse(uint64_t n_pulses, uint64_t seed) {
    EmitterConfig c;
    c.pulse_area = std::numbers::pi;
    c.n_pulses = n_pulses;
    c.seed = seed;
    return c;
}

const EmissionLog &pi_log() {
    static const EmissionLog log = simulate_emissions(pi_pulse(1'000'000, 3));
    return log;
}

std::vector<double> first_times(const EmissionLog &log) {
    std::vector<double> t;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        auto e = log.record(k).emission_times;
        if (!e.empty()) {
            t.push_back(e.front());
        }
    }
    return t;
}

/// E[exp(-|X - Y| / tau)] for X, Y independent draws of a weighted point set
/// restricted to t >= t_start, by direct double summation.
double discrete_overlap(const std::vector<std::pair<double, double>> &points, double tau, double t_start) {
    double num = 0, norm = 0;
    for (const auto &[ti, wi] : points) {
        if (ti < t_start) {
            continue;
        }
        norm += wi;
        for (const auto &[tj, wj] : points) {
            if (tj >= t_start) {
                num += wi * wj * std::exp(-std::abs(ti - tj) / tau);
            }
        }
    }
    return num / (norm * norm);
}

/// The density with its exponential tail discretized on a fine grid.
std::vector<std::pair<double, double>> discretize(const EmissionTimeDensity &d, double dt) {
    std::vector<std::pair<double, double>> points;
    for (const auto &p : d.points) {
        points.emplace_back(p.time, p.mass);
    }
    for (double a = 0; a < 25 * d.tail_decay; a += dt) {
        double mass = d.tail_mass * (std::exp(-a / d.tail_decay) - std::exp(-(a + dt) / d.tail_decay));
        points.emplace_back(d.tail_start + a + dt / 2, mass);
    }
    return points;
}

TEST(Overlap, ClosedForms) {
    std::vector<EmissionPair> same(1000, {50.0, 50.0});
    EXPECT_DOUBLE_EQ(overlap_from_emission_times(same, kTau), 1.0);
    std::vector<EmissionPair> offset(1000, {10.0, 10.0 + kTau});
    EXPECT_NEAR(overlap_from_emission_times(offset, kTau), std::exp(-1.0), 1e-12);
}

TEST(Overlap, Errors) {
    std::vector<EmissionPair> few(999, {1.0, 1.0});
    EXPECT_THROW(overlap_from_emission_times(few, kTau), data_error);
    std::vector<EmissionPair> early(1000, {1.0, 2.0});
    EXPECT_THROW(overlap_from_emission_times(early, kTau, 100.0), data_error);
    EXPECT_THROW(overlap_from_emission_times(early, 0.0), validation_error);
    EXPECT_THROW(overlap_from_samples({1.0}, kTau), data_error);
}

TEST(Overlap, SamplesMatchPairwiseSum) {
    std::vector<double> t{0, 10, 35, 200, 201};
    double sum = 0;
    int n = 0;
    for (size_t i = 0; i < t.size(); i++) {
        for (size_t j = i + 1; j < t.size(); j++) {
            sum += std::exp(-std::abs(t[i] - t[j]) / kTau);
            n++;
        }
    }
    EXPECT_NEAR(overlap_from_samples(t, kTau), sum / n, 1e-14);
    EXPECT_NEAR(overlap_from_samples(t, kTau, 30.0), (std::exp(-165 / kTau) + std::exp(-166 / kTau) + std::exp(-1 / kTau)) / 3,
                1e-14);
}

TEST(FirstEmissionPairs, ConsecutiveNonEmptyPulses) {
    EmissionLog log;
    std::vector<double> a{1.0, 5.0}, b{2.0}, c{3.0};
    log.append_pulse(a);
    log.append_pulse({});
    log.append_pulse(b);
    log.append_pulse(c);
    auto pairs = first_emission_pairs(log);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0], (EmissionPair{1.0, 2.0}));
}

TEST(Overlap, DensityMatchesNumericalIntegration) {
    auto c = pi_pulse(1, 1);
    auto density = PulsedEmitter(c).first_emission_density();
    auto grid = discretize(density, 0.5);
    for (double t_start : {0.0, 100.0, 150.0}) {
        EXPECT_NEAR(overlap_from_density(density, c.lifetime_ps, t_start), discrete_overlap(grid, c.lifetime_ps, t_start),
                    2e-4)
            << t_start;
    }
}

TEST(Overlap, SimulatedTimesMatchEmpiricalDensity) {
    auto times = first_times(pi_log());
    ASSERT_GT(times.size(), 990'000u);
    // Empirical density on 1 ps bins.
    std::map<long, double> hist;
    for (double t : times) {
        hist[static_cast<long>(std::floor(t))] += 1.0;
    }
    std::vector<std::pair<double, double>> points;
    for (const auto &[bin, n] : hist) {
        if (bin < 3000) {
            points.emplace_back(bin + 0.5, n);
        }
    }
    double oracle = discrete_overlap(points, kTau, 0.0);
    EXPECT_NEAR(overlap_from_samples(times, kTau), oracle, 1e-3);
    auto pairs = first_emission_pairs(pi_log());
    EXPECT_NEAR(overlap_from_emission_times(pairs, kTau), oracle, 2e-3);
}

TEST(Overlap, SimulatedMatchesExactDensity) {
    auto density = PulsedEmitter(pi_pulse(1, 1)).first_emission_density();
    EXPECT_NEAR(overlap_from_samples(first_times(pi_log()), kTau), overlap_from_density(density, kTau), 1e-3);
}

TEST(Overlap, GatingRaisesOverlap) {
    auto pairs = first_emission_pairs(pi_log());
    double ungated = overlap_from_emission_times(pairs, kTau);
    double gated = overlap_from_emission_times(pairs, kTau, 150.0);
    EXPECT_LT(ungated, 1.0);
    EXPECT_GT(gated, ungated);
}

TEST(Overlap, GatingIsMonotone) {
    auto density = PulsedEmitter(pi_pulse(1, 1)).first_emission_density();
    double previous = overlap_from_density(density, kTau, 0.0);
    for (double t = 5; t <= 300; t += 5) {
        double m = overlap_from_density(density, kTau, t);
        // The last in-pulse point sits on the tail start and lifts M by ~1e-9 until gated away.
        EXPECT_GE(m, previous - 1e-8) << t;
        previous = m;
    }
}

TEST(CorrectVisibility, Contract) {
    EXPECT_DOUBLE_EQ(correct_visibility(0.9, 0.0), 0.9);
    for (double v : {0.5, 0.9}) {
        double previous = -1;
        for (double g2 : {0.0, 0.02, 0.05}) {
            double m = correct_visibility(v, g2);
            EXPECT_GE(m, v);
            EXPECT_GE(m, previous);
            previous = m;
        }
    }
    EXPECT_NEAR(correct_visibility(0.9, 0.05), (0.9 + 0.05) / 0.95, 1e-15);
    EXPECT_THROW(correct_visibility(0.9, 1.0), validation_error);
    EXPECT_THROW(correct_visibility(0.9, -0.1), validation_error);
    EXPECT_THROW(correct_visibility(1.5, 0.0), validation_error);
}

TEST(CorrectVisibility, InverseRoundTrip) {
    for (double m : {0.3, 0.7, 0.95}) {
        for (double g2 : {0.0, 0.01, 0.1}) {
            EXPECT_NEAR(correct_visibility(expected_visibility(m, g2), g2), m, 1e-14);
        }
    }
}

TEST(VisibilityFromCounts, Examples) {
    EXPECT_DOUBLE_EQ(visibility_from_counts(0, 100), 1.0);
    EXPECT_DOUBLE_EQ(visibility_from_counts(100, 100), -1.0);
    EXPECT_DOUBLE_EQ(visibility_from_counts(50, 100), 0.0);
    EXPECT_DOUBLE_EQ(visibility_from_counts(25, 100, 1.0), 0.75);
    EXPECT_THROW(visibility_from_counts(1, 0), data_error);
    EXPECT_THROW(visibility_from_counts(-1, 10), validation_error);
}

}  // namespace
}  // namespace photostat
