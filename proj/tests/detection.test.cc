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

#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "photostat/errors.h"

namespace photostat {
namespace {

EmissionLog single_photons(size_t n_pulses, double t = 300.0) {
    EmissionLog log;
    std::vector<double> one{t};
    for (size_t k = 0; k < n_pulses; k++) {
        log.append_pulse(one);
    }
    return log;
}

DetectionConfig ideal(int n_detectors = 1) {
    DetectionConfig d;
    d.eta_t = 1.0;
    d.n_detectors = n_detectors;
    d.jitter_ps = 0;
    return d;
}

TEST(DetectionConfig, Validation) {
    DetectionConfig d;
    EXPECT_NO_THROW(d.validate());
    d.eta_t = 1.5;
    EXPECT_THROW(d.validate(), validation_error);
    d = {};
    d.n_detectors = 5;
    EXPECT_THROW(d.validate(), validation_error);
    d = {};
    d.splitting = {0.5, 0.5};
    EXPECT_THROW(d.validate(), validation_error);
    d.splitting = {0.5, 0.5, 0.1, -0.1};
    EXPECT_THROW(d.validate(), validation_error);
    d.splitting = {0.25, 0.25, 0.25, 0.2};
    EXPECT_THROW(d.validate(), validation_error);
    d.splitting = {0.4, 0.1, 0.25, 0.25};
    EXPECT_NO_THROW(d.validate());
    d = {};
    d.background_cps = -1;
    EXPECT_THROW(d.validate(), validation_error);
    EXPECT_EQ(DetectionConfig{}.resolved_splitting(), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
}

TEST(Detect, ZeroTransmissionLeavesOnlyClock) {
    DetectionConfig d;
    d.eta_t = 0;
    auto s = detect(single_photons(1000), d, kDefaultClockPeriod, 1);
    EXPECT_EQ(s.count_detector_tags(), 0u);
    EXPECT_EQ(s.count_channel(kClockChannel), 1000u);
}

TEST(Detect, UnitTransmissionKeepsEveryEmission) {
    EmitterConfig c;
    c.pulse_area = 2 * M_PI;
    c.n_pulses = 20'000;
    auto log = simulate_emissions(c);
    auto s = detect(log, ideal(), kDefaultClockPeriod, 2);
    EXPECT_EQ(s.count_detector_tags(), log.total_emissions());
    EXPECT_EQ(s.count_channel(kClockChannel), log.n_pulses());
}

TEST(Detect, AbsoluteTimesWithoutJitter) {
    auto d = ideal();
    d.delay_ps = 0;
    auto s = detect(single_photons(3, 300.0), d, kDefaultClockPeriod, 3);
    std::vector<TimeTag> expected{
        {0, 0}, {300, 1}, {12500, 0}, {12800, 1}, {25000, 0}, {25300, 1}};
    EXPECT_EQ(std::vector<TimeTag>(s.tags().begin(), s.tags().end()), expected);
}

TEST(Detect, BinomialTransmission) {
    DetectionConfig d;
    auto s = detect(single_photons(1'000'000), d, kDefaultClockPeriod, 4);
    double mean = 2.5e5, sd = std::sqrt(1e6 * 0.25 * 0.75);
    EXPECT_NEAR(static_cast<double>(s.count_detector_tags()), mean, 5 * sd);
}

TEST(Detect, SplittingFollowsProbabilities) {
    auto d = ideal(4);
    d.splitting = {0.1, 0.2, 0.3, 0.4};
    const double n = 400'000;
    auto s = detect(single_photons(static_cast<size_t>(n)), d, kDefaultClockPeriod, 5);
    for (int ch = 1; ch <= 4; ch++) {
        double p = d.splitting[ch - 1];
        EXPECT_NEAR(static_cast<double>(s.count_channel(static_cast<uint8_t>(ch))), n * p, 5 * std::sqrt(n * p * (1 - p)));
    }
}

TEST(Detect, JitterIsGaussianWithConfiguredWidth) {
    auto d = ideal();
    d.jitter_ps = 40;
    d.delay_ps = 0;
    auto s = detect(single_photons(200'000, 1000.0), d, kDefaultClockPeriod, 6);
    double sum = 0, sum2 = 0, n = 0;
    for (const auto &t : s.tags()) {
        if (t.channel == 1) {
            double x = static_cast<double>(t.time % kDefaultClockPeriod) - 1000;
            sum += x;
            sum2 += x * x;
            n++;
        }
    }
    double mean = sum / n;
    double sd = std::sqrt(sum2 / n - mean * mean);
    EXPECT_NEAR(mean, 0, 5 * 40 / std::sqrt(n) + 0.5);
    EXPECT_NEAR(sd, 40, 0.5);
}

TEST(Detect, BackgroundIsUniformInPhase) {
    DetectionConfig d;
    d.eta_t = 0;
    d.n_detectors = 1;
    d.background_cps = 2e6;
    const size_t n_pulses = 400'000;
    EmissionLog empty;
    for (size_t k = 0; k < n_pulses; k++) {
        empty.append_pulse({});
    }
    auto s = detect(empty, d, kDefaultClockPeriod, 7);
    double expected_total = 2e6 * n_pulses * 12500e-12;
    double total = static_cast<double>(s.count_detector_tags());
    EXPECT_NEAR(total, expected_total, 5 * std::sqrt(expected_total));

    const int n_bins = 25;
    std::vector<double> bins(n_bins);
    for (const auto &t : s.tags()) {
        if (t.channel == 1) {
            auto phase = ((t.time % kDefaultClockPeriod) + kDefaultClockPeriod) % kDefaultClockPeriod;
            bins[static_cast<size_t>(phase * n_bins / kDefaultClockPeriod)]++;
        }
    }
    double chi2 = 0;
    for (double b : bins) {
        chi2 += (b - total / n_bins) * (b - total / n_bins) / (total / n_bins);
    }
    boost::math::chi_squared dist(n_bins - 1);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(Detect, DeterministicAcrossThreads) {
    EmitterConfig c;
    c.pulse_area = 2 * M_PI;
    c.n_pulses = 30'000;
    auto log = simulate_emissions(c);
    DetectionConfig d;
    d.background_cps = 1e5;
    auto a = detect(log, d, kDefaultClockPeriod, 9, 1);
    EXPECT_EQ(a, detect(log, d, kDefaultClockPeriod, 9, 5));
    EXPECT_NE(a, detect(log, d, kDefaultClockPeriod, 10, 1));
}

TEST(ReferenceSource, FockOneGivesOneTagPerPulse) {
    auto s = simulate_reference(FockSource{1}, 10'000, ideal(4), 11);
    EXPECT_EQ(s.count_detector_tags(), 10'000u);
    EXPECT_EQ(s.count_channel(kClockChannel), 10'000u);
}

std::vector<double> factorial_moments_normalized(const EmissionLog &log) {
    std::vector<double> f(5, 0.0);
    for (size_t k = 0; k < log.n_pulses(); k++) {
        double n = static_cast<double>(log.count(k));
        double term = 1;
        for (int m = 1; m <= 4; m++) {
            term *= n - (m - 1);
            f[m] += term;
        }
    }
    std::vector<double> g(5, 0.0);
    double mean = f[1] / static_cast<double>(log.n_pulses());
    for (int m = 2; m <= 4; m++) {
        g[m] = f[m] / static_cast<double>(log.n_pulses()) / std::pow(mean, m);
    }
    return g;
}

TEST(ReferenceSource, PhotonNumberStatistics) {
    auto thermal = factorial_moments_normalized(reference_emissions(ThermalSource{1.0}, 1'000'000, 204, 12));
    EXPECT_NEAR(thermal[2], 2, 0.03);
    EXPECT_NEAR(thermal[3], 6, 0.3);
    EXPECT_NEAR(thermal[4], 24, 2.5);
    auto coherent = factorial_moments_normalized(reference_emissions(CoherentSource{1.0}, 1'000'000, 204, 13));
    EXPECT_NEAR(coherent[2], 1, 0.01);
    EXPECT_NEAR(coherent[3], 1, 0.03);
    EXPECT_NEAR(coherent[4], 1, 0.1);
    auto fock = factorial_moments_normalized(reference_emissions(FockSource{2}, 1000, 204, 14));
    EXPECT_DOUBLE_EQ(fock[2], 0.5);
    EXPECT_DOUBLE_EQ(fock[3], 0.0);
}

TEST(ReferenceSource, ThermalMeanAndEmissionTimes) {
    auto log = reference_emissions(ThermalSource{0.5}, 500'000, 204, 15);
    double n = static_cast<double>(log.n_pulses());
    EXPECT_NEAR(static_cast<double>(log.total_emissions()) / n, 0.5, 5 * std::sqrt(0.75 / n));
    double sum = 0;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        auto t = log.record(k).emission_times;
        for (size_t i = 0; i < t.size(); i++) {
            sum += t[i];
            if (i > 0) {
                EXPECT_GT(t[i], t[i - 1]);
            }
        }
    }
    EXPECT_NEAR(sum / static_cast<double>(log.total_emissions()), 204, 2);
}

TEST(ReferenceSource, RejectsInvalidParameters) {
    EXPECT_THROW(reference_emissions(CoherentSource{-1}, 10, 204, 1), validation_error);
    EXPECT_THROW(reference_emissions(FockSource{-1}, 10, 204, 1), validation_error);
}

}  // namespace
}  // namespace photostat
