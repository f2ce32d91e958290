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

#include "photostat/lifetime.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "photostat/detection.h"
#include "photostat/emitter.h"
#include "photostat/errors.h"

namespace photostat {
namespace {

constexpr picoseconds P = kDefaultClockPeriod;

LifetimeHistogram synthetic(double tau, double amplitude, double offset, picoseconds bin) {
    LifetimeHistogram h;
    h.bin_width = bin;
    h.counts.resize(static_cast<size_t>(P / bin));
    for (size_t i = 0; i < h.counts.size(); i++) {
        h.counts[i] = static_cast<uint64_t>(std::llround(amplitude * std::exp(-h.bin_centre(i) / tau) + offset));
    }
    return h;
}

TimeTagStream pi_pulse_stream(uint64_t n_pulses, uint64_t seed) {
    EmitterConfig c;
    c.pulse_area = std::numbers::pi;
    c.n_pulses = n_pulses;
    c.seed = seed;
    return detect(simulate_emissions(c), DetectionConfig{}, P, seed);
}

TEST(LifetimeHistogram, SingleTag) {
    auto s = TimeTagStream::from_unsorted({{0, 0}, {300, 1}, {P, 0}}, P, 1);
    auto h = lifetime_histogram(s, 50);
    EXPECT_EQ(h.counts.size(), static_cast<size_t>(P / 50));
    EXPECT_EQ(h.counts[6], 1u);
    uint64_t total = 0;
    for (auto c : h.counts) {
        total += c;
    }
    EXPECT_EQ(total, 1u);
}

TEST(LifetimeHistogram, UsesPrecedingClockTag) {
    auto s = TimeTagStream::from_unsorted({{5, 1}, {1000, 0}, {1000 + 420, 2}, {1000 + P, 0}, {1000 + P + 80, 1}}, P, 2);
    auto h = lifetime_histogram(s, 100);
    EXPECT_EQ(h.counts[4], 1u);
    EXPECT_EQ(h.counts[0], 1u);
}

TEST(LifetimeHistogram, Errors) {
    auto no_clock = TimeTagStream::from_unsorted({{300, 1}}, P, 1);
    EXPECT_THROW(lifetime_histogram(no_clock, 50), data_error);
    auto s = TimeTagStream::from_unsorted({{0, 0}, {300, 1}}, P, 1);
    EXPECT_THROW(lifetime_histogram(s, 0), validation_error);
}

TEST(LifetimeHistogram, ModeFollowsPulseEnd) {
    auto s = pi_pulse_stream(1'000'000, 1);
    const picoseconds bin = 25;
    auto h = lifetime_histogram(s, bin);
    auto mode = static_cast<size_t>(std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
    DetectionConfig d;
    double pulse_end = static_cast<double>(d.delay_ps) + EmitterConfig{}.pulse_duration_ps;
    EXPECT_LE(std::abs(h.bin_centre(mode) - pulse_end), 2.0 * bin + bin / 2.0) << h.bin_centre(mode);
}

TEST(LifetimeHistogram, UniformBackgroundIsFlat) {
    DetectionConfig d;
    d.eta_t = 0;
    d.n_detectors = 1;
    d.background_cps = 5e6;
    EmissionLog empty;
    for (int k = 0; k < 200'000; k++) {
        empty.append_pulse({});
    }
    auto s = detect(empty, d, P, 2);
    auto h = lifetime_histogram(s, 500);
    double total = 0;
    for (auto c : h.counts) {
        total += static_cast<double>(c);
    }
    double expected = total / static_cast<double>(h.counts.size());
    double chi2 = 0;
    for (auto c : h.counts) {
        chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    }
    boost::math::chi_squared dist(static_cast<double>(h.counts.size() - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(FitLifetime, NoiselessExponential) {
    auto fit = fit_lifetime(synthetic(204, 1e6, 0, 10), 0);
    EXPECT_NEAR(fit.tau_hat, 204, 1);
    EXPECT_NEAR(fit.amplitude, 1e6, 1e4);
    EXPECT_GT(fit.n_bins, 3u);
}

TEST(FitLifetime, ExponentialWithOffset) {
    auto fit = fit_lifetime(synthetic(350, 5e5, 40, 20), 100);
    EXPECT_NEAR(fit.tau_hat, 350, 2);
    EXPECT_NEAR(fit.offset, 40, 1);
}

TEST(FitLifetime, FlatHistogramIsDegenerate) {
    LifetimeHistogram flat;
    flat.bin_width = 50;
    flat.counts.assign(P / 50, 1000);
    try {
        fit_lifetime(flat, 250);
        FAIL() << "expected a degenerate-tail error";
    } catch (const numerical_error &e) {
        EXPECT_NE(std::string(e.what()).find("degenerate"), std::string::npos) << e.what();
    }
}

TEST(FitLifetime, EmptyOrShortTail) {
    LifetimeHistogram empty;
    empty.bin_width = 50;
    empty.counts.assign(P / 50, 0);
    EXPECT_THROW(fit_lifetime(empty, 250), data_error);
    auto h = synthetic(204, 1e6, 0, 50);
    EXPECT_THROW(fit_lifetime(h, P - 60), data_error);
}

TEST(FitLifetime, SimulatedPiPulses) {
    auto h = lifetime_histogram(pi_pulse_stream(1'000'000, 3), 20);
    auto fit = fit_lifetime(h, 250);
    EXPECT_NEAR(fit.tau_hat, 204, 0.02 * 204);
}

}  // namespace
}  // namespace photostat
