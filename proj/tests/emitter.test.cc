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
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "photostat/errors.h"

namespace photostat {
namespace {

constexpr double kPi = std::numbers::pi;

EmitterConfig config(double area_pi, double duration_ps, uint64_t n_pulses, uint64_t seed = 1) {
    EmitterConfig c;
    c.pulse_area = area_pi * kPi;
    c.pulse_duration_ps = duration_ps;
    c.n_pulses = n_pulses;
    c.seed = seed;
    return c;
}

double fraction_at_least(const EmissionLog &log, size_t n) {
    size_t k = 0;
    for (size_t i = 0; i < log.n_pulses(); i++) {
        k += log.count(i) >= n;
    }
    return static_cast<double>(k) / static_cast<double>(log.n_pulses());
}

/// |c_g|^2 and |c_e|^2 after the pulse without a jump, by RK4 on
/// i dc/dt = H c with H = (Omega(t)/2) sigma_x - (i Gamma/2)|e><e|.
std::pair<double, double> rk4_no_jump(const EmitterConfig &c) {
    using cplx = std::complex<double>;
    const cplx i(0, 1);
    const double T = c.pulse_duration_ps;
    const double gamma = 1 / c.lifetime_ps;
    const double sigma = T / 6;
    auto envelope = [&](double t) {
        if (c.pulse_shape == PulseShape::square) {
            return 1.0;
        }
        return std::exp(-(t - T / 2) * (t - T / 2) / (2 * sigma * sigma));
    };
    // Normalize the envelope so its integral equals the pulse area (Simpson).
    const int n_int = 20000;
    double integral = 0;
    for (int k = 0; k <= n_int; k++) {
        double w = (k == 0 || k == n_int) ? 1 : (k % 2 ? 4 : 2);
        integral += w * envelope(T * k / n_int);
    }
    integral *= T / n_int / 3;
    double scale = c.pulse_area / integral;
    auto deriv = [&](double t, cplx g, cplx e) {
        double rabi = scale * envelope(t);
        return std::pair{-i * (rabi / 2) * e, -i * (rabi / 2) * g - (gamma / 2) * e};
    };
    cplx g = 1, e = 0;
    const int steps = 20000;
    double h = T / steps;
    for (int k = 0; k < steps; k++) {
        double t = k * h;
        auto [g1, e1] = deriv(t, g, e);
        auto [g2, e2] = deriv(t + h / 2, g + h / 2 * g1, e + h / 2 * e1);
        auto [g3, e3] = deriv(t + h / 2, g + h / 2 * g2, e + h / 2 * e2);
        auto [g4, e4] = deriv(t + h, g + h * g3, e + h * e3);
        g += h / 6 * (g1 + 2. * g2 + 2. * g3 + g4);
        e += h / 6 * (e1 + 2. * e2 + 2. * e3 + e4);
    }
    return {std::norm(g), std::norm(e)};
}

TEST(EmitterConfig, Validation) {
    EmitterConfig c;
    EXPECT_NO_THROW(c.validate());
    c.pulse_area = -1;
    EXPECT_THROW(c.validate(), validation_error);
    c = {};
    c.lifetime_ps = 0;
    EXPECT_THROW(c.validate(), validation_error);
    c = {};
    c.pulse_duration_ps = 5000;
    EXPECT_THROW(c.validate(), validation_error);
    c = {};
    c.n_pulses = 0;
    EXPECT_THROW(c.validate(), validation_error);
}

TEST(PulsedEmitter, LosslessRabiRotationIsExact) {
    for (double area : {0.25, 0.5, 1.0, 1.5, 2.0, 3.3}) {
        auto c = config(area, 15, 1);
        c.lifetime_ps = 1e15;
        EXPECT_NEAR(PulsedEmitter(c).excited_fraction_without_jump(), std::pow(std::sin(area * kPi / 2), 2), 1e-9)
            << area;
    }
}

TEST(PulsedEmitter, NoJumpEvolutionMatchesRungeKutta) {
    for (auto shape : {PulseShape::square, PulseShape::gaussian}) {
        for (double area : {1.0, 2.0, 3.0}) {
            auto c = config(area, 15, 1);
            c.pulse_shape = shape;
            auto density = PulsedEmitter(c).first_emission_density();
            auto [pg, pe] = rk4_no_jump(c);
            EXPECT_NEAR(density.tail_mass, pe, 2e-5) << area;
            EXPECT_NEAR(density.total_mass(), 1 - pg, 2e-5) << area;
        }
    }
}

TEST(SimulateEmissions, UltrashortPiPulseEmitsExactlyOnePhoton) {
    auto log = simulate_emissions(config(1, 0.1, 200'000));
    double n = 200'000;
    double one = fraction_at_least(log, 1);
    // sin^2(pi/2) = 1 up to O(Gamma T_p).
    EXPECT_GE(one, 1 - 3 * std::sqrt(one * (1 - one) / n) - 1e-4);
    EXPECT_LT(fraction_at_least(log, 2), 1e-3);
}

TEST(SimulateEmissions, Ultrashort2PiPulseReturnsToGround) {
    auto log = simulate_emissions(config(2, 0.1, 200'000));
    EXPECT_LT(fraction_at_least(log, 1), 1e-2);
}

TEST(SimulateEmissions, TwoPhotonFractionScalesWithPulseDuration) {
    std::vector<double> f;
    for (double d : {2.0, 4.0, 8.0}) {
        f.push_back(fraction_at_least(simulate_emissions(config(2, d, 2'000'000, 3)), 2));
    }
    EXPECT_NEAR(f[1] / f[0], 2.0, 0.2);
    EXPECT_NEAR(f[2] / f[0], 4.0, 0.4);
}

TEST(SimulateEmissions, RecordsAreStrictlyTimeOrdered) {
    auto log = simulate_emissions(config(2, 15, 200'000));
    size_t multi = 0;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        auto t = log.record(k).emission_times;
        EXPECT_TRUE(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());
        multi += t.size() > 1;
    }
    EXPECT_GT(multi, 0u);
}

double ks_pvalue(double d, size_t n) {
    double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
    double p = 0;
    for (int k = 1; k <= 100; k++) {
        p += 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * lambda * lambda);
    }
    return std::clamp(p, 0.0, 1.0);
}

TEST(SimulateEmissions, FinalWaitingTimeIsExponential) {
    auto c = config(1, 15, 100'000, 8);
    auto log = simulate_emissions(c);
    std::vector<double> waits;
    for (size_t k = 0; k < log.n_pulses(); k++) {
        auto t = log.record(k).emission_times;
        if (!t.empty() && t.back() > c.pulse_duration_ps) {
            waits.push_back(t.back() - c.pulse_duration_ps);
        }
    }
    ASSERT_GT(waits.size(), 90'000u);
    std::sort(waits.begin(), waits.end());
    double d = 0;
    double n = static_cast<double>(waits.size());
    for (size_t i = 0; i < waits.size(); i++) {
        double cdf = 1 - std::exp(-waits[i] / c.lifetime_ps);
        d = std::max({d, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_GT(ks_pvalue(d, waits.size()), 0.01);
}

TEST(SimulateEmissions, MatchesExactFirstEmissionDensity) {
    for (double area : {1.0, 2.0}) {
        auto c = config(area, 15, 1'000'000, 21);
        auto log = simulate_emissions(c);
        auto density = PulsedEmitter(c).first_emission_density();
        double expected = density.total_mass();
        double n = static_cast<double>(c.n_pulses);
        EXPECT_NEAR(fraction_at_least(log, 1), expected, 5 * std::sqrt(expected * (1 - expected) / n));
        double in_pulse = 0;
        for (const auto &p : density.points) {
            in_pulse += p.mass;
        }
        double observed = 0;
        for (size_t k = 0; k < log.n_pulses(); k++) {
            auto t = log.record(k).emission_times;
            observed += !t.empty() && t.front() <= c.pulse_duration_ps;
        }
        EXPECT_NEAR(observed / n, in_pulse, 5 * std::sqrt(in_pulse * (1 - in_pulse) / n) + 1e-6);
    }
}

TEST(SimulateEmissions, ThreadCountDoesNotChangeOutput) {
    auto c = config(2, 15, 50'001, 77);
    auto one = simulate_emissions(c, 1);
    EXPECT_EQ(one, simulate_emissions(c, 3));
    EXPECT_EQ(one, simulate_emissions(c, 8));
    auto other = c;
    other.seed = 78;
    EXPECT_NE(one, simulate_emissions(other, 1));
}

TEST(PhotonNumberHistogram, CountsPerPulse) {
    EmissionLog log;
    std::vector<double> one{1.0}, two{1.0, 2.0};
    log.append_pulse(one);
    log.append_pulse(one);
    log.append_pulse(two);
    log.append_pulse({});
    auto d = photon_number_histogram(log);
    EXPECT_DOUBLE_EQ(d.p[0], 0.25);
    EXPECT_DOUBLE_EQ(d.p[1], 0.5);
    EXPECT_DOUBLE_EQ(d.p[2], 0.25);
    EXPECT_EQ(d.level, DistributionLevel::source);
    EXPECT_FALSE(d.truncated);
}

TEST(PhotonNumberHistogram, VacuumAndFolding) {
    EmissionLog empty;
    empty.append_pulse({});
    EXPECT_DOUBLE_EQ(photon_number_histogram(empty).p[0], 1.0);

    EmissionLog many;
    std::vector<double> six{1, 2, 3, 4, 5, 6};
    many.append_pulse(six);
    auto d = photon_number_histogram(many);
    EXPECT_DOUBLE_EQ(d.p[4], 1.0);
    EXPECT_TRUE(d.truncated);
    EXPECT_THROW(photon_number_histogram(EmissionLog{}), validation_error);
}

TEST(PhotonNumberHistogram, UltrashortPiPulseIsSinglePhoton) {
    auto d = photon_number_histogram(simulate_emissions(config(1, 0.1, 100'000, 5)));
    EXPECT_NEAR(d.p[1], 1.0, 3 * std::sqrt(1.0 / 100'000) + 1e-3);
}

}  // namespace
}  // namespace photostat
