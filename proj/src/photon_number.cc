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

#include "photostat/photon_number.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "photostat/errors.h"

namespace photostat {

namespace {

constexpr double kNegativityTolerance = 1e-6;
constexpr double kMuMax = 4.0;
constexpr int kMuScanSteps = 4000;
constexpr double kMuTolerance = 1e-12;
constexpr double kEtaTolerance = 1e-9;
constexpr double kEtaFloor = 1e-6;
constexpr int kEtaScanSteps = 6000;

constexpr double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; i++) {
        r = r * (n - k + i) / i;
    }
    return r;
}

/// p'_1..p'_4 for a trial mean, by back substitution; p[0] is left at zero.
std::array<double, kMaxPhotonNumber + 1> back_substitute(const MomentSet &m, double mu) {
    double f2 = m.g2.value * mu * mu;
    double f3 = m.g3.value * mu * mu * mu;
    double f4 = m.g4.value * mu * mu * mu * mu;
    std::array<double, kMaxPhotonNumber + 1> p{};
    p[4] = f4 / 24;
    p[3] = (f3 - 24 * p[4]) / 6;
    p[2] = (f2 - 6 * p[3] - 12 * p[4]) / 2;
    p[1] = mu - 2 * p[2] - 3 * p[3] - 4 * p[4];
    return p;
}

double click_sum(const MomentSet &m, double mu) {
    auto p = back_substitute(m, mu);
    return p[1] + p[2] + p[3] + p[4];
}

std::array<double, kMaxPhotonNumber + 1> invert_unchecked(const PhotonNumberDist &d, double eta) {
    std::array<double, kMaxPhotonNumber + 1> p{};
    double rest = 0;
    for (int n = kMaxPhotonNumber; n >= 1; n--) {
        double v = d.p[n];
        for (int k = n + 1; k <= kMaxPhotonNumber; k++) {
            v -= binomial(k, n) * std::pow(eta, n) * std::pow(1 - eta, k - n) * p[k];
        }
        p[n] = v / std::pow(eta, n);
        rest += p[n];
    }
    p[0] = 1 - rest;
    return p;
}

void require_probability(double v, const char *name) {
    if (!(v >= 0 && v <= 1)) {
        throw validation_error(std::string(name) + " must be in [0, 1], got " + std::to_string(v));
    }
}

using Vector = std::vector<double>;

/// sigma of each output of f under independent input errors, from a central-difference Jacobian.
Vector propagate(const std::function<Vector(const Vector &)> &f, const Vector &x, const Vector &sigma) {
    Vector centre = f(x);
    Vector var(centre.size(), 0.0);
    for (size_t j = 0; j < x.size(); j++) {
        if (sigma[j] <= 0) {
            continue;
        }
        double h = std::max(1e-3 * sigma[j], 1e-12 * std::max(1.0, std::abs(x[j])));
        Vector up = x;
        Vector down = x;
        up[j] += h;
        down[j] -= h;
        Vector fu, fd;
        double span = 2 * h;
        try {
            fu = f(up);
        } catch (const std::exception &) {
            fu = centre;
            span = h;
        }
        try {
            fd = f(down);
        } catch (const std::exception &) {
            if (span == h) {
                throw numerical_error("cannot differentiate the photon-number inversion");
            }
            fd = centre;
            span = h;
        }
        for (size_t i = 0; i < centre.size(); i++) {
            double d = (fu[i] - fd[i]) / span * sigma[j];
            var[i] += d * d;
        }
    }
    for (auto &v : var) {
        v = std::sqrt(v);
    }
    return var;
}

/// Loss inversion of measured data. Populations that come out negative but
/// within 3 sigma of zero are set to zero and the rest renormalized.
PhotonNumberDist source_within_errors(const PhotonNumberDist &detected, double eta,
                                      const std::array<double, kMaxPhotonNumber + 1> &sigma) {
    PhotonNumberDist out;
    out.level = DistributionLevel::source;
    out.eta_applied = eta;
    out.truncated = detected.truncated;
    out.p = invert_unchecked(detected, eta);
    double total = 0;
    for (int n = 0; n <= kMaxPhotonNumber; n++) {
        if (out.p[n] < -std::max(kNegativityTolerance, 3 * sigma[n])) {
            throw data_error("eta = " + std::to_string(eta) + " is too small for the data: p_" + std::to_string(n) +
                             " = " + std::to_string(out.p[n]));
        }
        out.p[n] = std::max(out.p[n], 0.0);
        total += out.p[n];
    }
    for (auto &v : out.p) {
        v /= total;
    }
    return out;
}

MomentSet with_values(const MomentSet &base, const Vector &x) {
    MomentSet m = base;
    m.g2.value = x[0];
    m.g3.value = x[1];
    m.g4.value = x[2];
    m.b_prime.value = x[3];
    return m;
}

}  // namespace

void MomentSet::validate() const {
    for (auto [v, name] : {std::pair{g2.value, "g2"}, {g3.value, "g3"}, {g4.value, "g4"}}) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw validation_error(std::string(name) + " must be finite and non-negative");
        }
    }
    if (!(b_prime.value > 0 && b_prime.value <= 1)) {
        throw validation_error("B' must be in (0, 1], got " + std::to_string(b_prime.value));
    }
}

BrightnessEstimate measure_brightness(const TimeTagStream &stream) {
    BrightnessEstimate b;
    bool have_clock = false;
    bool bright = false;
    for (const auto &tag : stream.tags()) {
        if (tag.channel == kClockChannel) {
            b.bright_periods += bright;
            b.periods++;
            have_clock = true;
            bright = false;
        } else if (have_clock) {
            bright = true;
        }
    }
    b.bright_periods += bright;
    if (b.periods == 0) {
        throw data_error("no clock tags (channel 0): brightness is undefined");
    }
    double n = static_cast<double>(b.periods);
    b.value = static_cast<double>(b.bright_periods) / n;
    b.sigma = std::sqrt(b.value * (1 - b.value) / n);
    return b;
}

double brightness(const TimeTagStream &stream) {
    return measure_brightness(stream).value;
}

std::array<double, 3> normalized_moments(const PhotonNumberDist &d) {
    double mu = d.mean();
    if (!(mu > 0)) {
        throw data_error("normalized moments of the vacuum are undefined");
    }
    std::array<double, 3> g{};
    for (int m = 2; m <= 4; m++) {
        double f = 0;
        for (int n = m; n <= kMaxPhotonNumber; n++) {
            double falling = 1;
            for (int k = 0; k < m; k++) {
                falling *= n - k;
            }
            f += falling * d.p[n];
        }
        g[m - 2] = f / std::pow(mu, m);
    }
    return g;
}

DetectedSolution solve_detected(const MomentSet &moments) {
    moments.validate();
    double target = moments.b_prime.value;
    double step = kMuMax / kMuScanSteps;
    double lo = 0;
    double hi = -1;
    for (int k = 1; k <= kMuScanSteps; k++) {
        double mu = step * k;
        if (click_sum(moments, mu) >= target) {
            lo = mu - step;
            hi = mu;
            break;
        }
    }
    if (hi < 0) {
        throw numerical_error("no mean photon number in (0, 4] reproduces B' = " + std::to_string(target));
    }
    while (hi - lo > kMuTolerance) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (click_sum(moments, mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    double mu = 0.5 * (lo + hi);
    DetectedSolution s;
    s.mu = mu;
    s.dist.level = DistributionLevel::detected;
    auto p = back_substitute(moments, mu);
    p[0] = 1 - target;
    bool clamped = false;
    for (int n = 0; n <= kMaxPhotonNumber; n++) {
        if (p[n] < -kNegativityTolerance) {
            throw data_error("inconsistent moments: p'_" + std::to_string(n) + " = " + std::to_string(p[n]));
        }
        if (p[n] < 0) {
            p[n] = 0;
            clamped = true;
        }
    }
    if (clamped) {
        double sum = 0;
        for (double v : p) {
            sum += v;
        }
        for (double &v : p) {
            v /= sum;
        }
    }
    s.dist.p = p;
    return s;
}

PhotonNumberDist moments_to_detected(const MomentSet &moments) {
    return solve_detected(moments).dist;
}

PhotonNumberDist apply_loss(const PhotonNumberDist &source, double eta) {
    require_probability(eta, "eta");
    PhotonNumberDist out;
    out.level = DistributionLevel::detected;
    out.eta_applied = eta;
    out.truncated = source.truncated;
    for (int m = 0; m <= kMaxPhotonNumber; m++) {
        double v = 0;
        for (int n = m; n <= kMaxPhotonNumber; n++) {
            v += binomial(n, m) * std::pow(eta, m) * std::pow(1 - eta, n - m) * source.p[n];
        }
        out.p[m] = v;
    }
    return out;
}

PhotonNumberDist invert_loss(const PhotonNumberDist &detected, double eta) {
    if (!(eta > 0 && eta <= 1)) {
        throw validation_error("eta must be in (0, 1], got " + std::to_string(eta));
    }
    PhotonNumberDist out;
    out.level = DistributionLevel::source;
    out.eta_applied = eta;
    out.truncated = detected.truncated;
    out.p = invert_unchecked(detected, eta);
    for (int n = 0; n <= kMaxPhotonNumber; n++) {
        if (out.p[n] < -kNegativityTolerance) {
            throw data_error("eta = " + std::to_string(eta) + " is too small for the data: p_" + std::to_string(n) +
                             " = " + std::to_string(out.p[n]));
        }
    }
    return out;
}

double estimate_eta(const PhotonNumberDist &detected_pi) {
    auto excess = [&](double eta) {
        auto p = invert_unchecked(detected_pi, eta);
        return p[1] + p[2] + p[3] + p[4] - 1;
    };
    if (!(detected_pi.non_vacuum() > 0)) {
        throw numerical_error("no feasible eta: the pi-pulse distribution has no clicks");
    }
    double hi = 1;
    if (excess(hi) >= 0) {
        return 1;
    }
    // The vacuum of the inverse is a polynomial in 1 - 1/eta that can have
    // several roots; take the one at the largest eta.
    double lo = -1;
    double ratio = std::pow(kEtaFloor, 1.0 / kEtaScanSteps);
    for (int k = 1; k <= kEtaScanSteps; k++) {
        double eta = std::pow(ratio, k);
        if (excess(eta) > 0) {
            lo = eta;
            break;
        }
        hi = eta;
    }
    if (lo < 0) {
        throw numerical_error("no feasible eta in (0, 1]");
    }
    while (hi - lo > kEtaTolerance) {
        double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::array<double, kMaxPhotonNumber> purities(const PhotonNumberDist &d) {
    double total = d.non_vacuum();
    if (!(total > 0)) {
        throw data_error("purities of an all-vacuum distribution are undefined");
    }
    std::array<double, kMaxPhotonNumber> pi{};
    for (int n = 1; n <= kMaxPhotonNumber; n++) {
        pi[n - 1] = d.p[n] / total;
    }
    return pi;
}

double bunching_g2(double p0, double p1, double p2) {
    if (std::abs(p0 + p1 + p2 - 1) > 1e-9) {
        throw validation_error("p0 + p1 + p2 must equal 1");
    }
    if (p1 == 0 && p2 == 0) {
        throw validation_error("bunching_g2 needs p1 + p2 > 0");
    }
    double d = p1 + 2 * p2;
    return 2 * p2 / (d * d);
}

bool bunching_possible(double p0) {
    return p0 > 0.5;
}

PhotonNumberReport extract_photon_numbers(const MomentSet &moments, std::optional<Estimate> eta) {
    PhotonNumberReport r;
    r.moments = moments;
    auto solution = solve_detected(moments);
    r.mu = solution.mu;
    r.detected = solution.dist;
    r.eta = eta;

    Vector x{moments.g2.value, moments.g3.value, moments.g4.value, moments.b_prime.value};
    Vector sx{moments.g2.sigma(), moments.g3.sigma(), moments.g4.sigma(), moments.b_prime.sigma()};
    if (eta) {
        if (!(eta->value > 0 && eta->value <= 1)) {
            throw validation_error("eta must be in (0, 1], got " + std::to_string(eta->value));
        }
        x.push_back(eta->value);
        sx.push_back(eta->sigma);
    }

    auto pipeline = [&](const Vector &v) {
        auto det = moments_to_detected(with_values(moments, v));
        Vector out(det.p.begin(), det.p.end());
        PhotonNumberDist fin = det;
        if (v.size() > 4) {
            PhotonNumberDist src;
            src.p = invert_unchecked(det, v[4]);
            out.insert(out.end(), src.p.begin(), src.p.end());
            fin = src;
        }
        double total = fin.non_vacuum();
        for (int n = 1; n <= kMaxPhotonNumber; n++) {
            out.push_back(fin.p[n] / total);
        }
        return out;
    };
    Vector sigma = propagate(pipeline, x, sx);
    size_t at = 0;
    for (int n = 0; n <= kMaxPhotonNumber; n++) {
        r.detected_sigma[n] = sigma[at++];
    }
    if (eta) {
        for (int n = 0; n <= kMaxPhotonNumber; n++) {
            r.source_sigma[n] = sigma[at++];
        }
        r.source = source_within_errors(r.detected, eta->value, r.source_sigma);
    }
    for (int n = 0; n < kMaxPhotonNumber; n++) {
        r.purity_sigma[n] = sigma[at++];
    }
    r.purity = purities(r.source ? *r.source : r.detected);
    return r;
}

Estimate estimate_eta_from_moments(const MomentSet &pi_moments) {
    Vector x{pi_moments.g2.value, pi_moments.g3.value, pi_moments.g4.value, pi_moments.b_prime.value};
    Vector sx{pi_moments.g2.sigma(), pi_moments.g3.sigma(), pi_moments.g4.sigma(), pi_moments.b_prime.sigma()};
    auto f = [&](const Vector &v) {
        return Vector{estimate_eta(moments_to_detected(with_values(pi_moments, v)))};
    };
    Estimate e;
    e.value = f(x)[0];
    e.sigma = propagate(f, x, sx)[0];
    return e;
}

HistogramOptions MomentOptions::wide(int order, int periods, picoseconds clock_period) {
    HistogramOptions o = HistogramOptions::defaults(order, clock_period);
    o.max_delay = periods * clock_period;
    return o;
}

MomentSet measure_moments(const TimeTagStream &stream, const MomentOptions &options) {
    MomentSet m;
    m.g2 = Measured::from(g_zero(build_combined_histogram(stream, options.g2)));
    m.g3 = Measured::from(g_zero(build_combined_histogram(stream, options.g3)));
    m.g4 = Measured::from(g_zero(build_combined_histogram(stream, options.g4)));
    auto b = measure_brightness(stream);
    m.b_prime = {b.value, b.sigma, b.sigma};
    return m;
}

}  // namespace photostat
