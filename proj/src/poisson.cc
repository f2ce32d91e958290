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

#include "photostat/poisson.h"

#include <cmath>
#include <limits>
#include <string>

#include "photostat/errors.h"

namespace photostat {

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; n++) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper function Q(a, x) by Lentz's continued fraction.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1 - a;
    double c = 1 / tiny;
    double d = 1 / b;
    double h = d;
    for (int i = 1; i < 10000; i++) {
        double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < 1e-16) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0) || !(x >= 0)) {
        throw validation_error("regularized_gamma_p needs a > 0 and x >= 0");
    }
    if (x == 0) {
        return 0;
    }
    if (x < a + 1) {
        return gamma_p_series(a, x);
    }
    return 1 - gamma_q_fraction(a, x);
}

double gamma_p_quantile(double a, double p) {
    if (!(p > 0 && p < 1)) {
        throw validation_error("gamma_p_quantile needs p in (0, 1)");
    }
    double lo = 0;
    double hi = std::max(1.0, a);
    while (regularized_gamma_p(a, hi) < p) {
        lo = hi;
        hi *= 2;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; i++) {
        double mid = 0.5 * (lo + hi);
        if (regularized_gamma_p(a, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CountInterval poisson_interval(uint64_t n_counts, double cl) {
    if (!(cl > 0 && cl < 1)) {
        throw validation_error("confidence level must be in (0, 1), got " + std::to_string(cl));
    }
    double n = static_cast<double>(n_counts);
    if (n_counts > 100) {
        return {std::sqrt(n), std::sqrt(n)};
    }
    double alpha = 1 - cl;
    // Q_chi2(q; 2k) / 2 is the q-quantile of a Gamma(k, 1) variable.
    double lower = n_counts == 0 ? 0.0 : gamma_p_quantile(n, alpha / 2);
    double upper = gamma_p_quantile(n + 1, 1 - alpha / 2);
    return {n - lower, upper - n};
}

double uncorrelated_sigma(std::span<const double> peaks) {
    if (peaks.size() < 2) {
        throw data_error("uncorrelated_sigma needs at least 2 peaks, got " + std::to_string(peaks.size()));
    }
    double mean = 0;
    for (double p : peaks) {
        mean += p;
    }
    mean /= static_cast<double>(peaks.size());
    double ss = 0;
    for (double p : peaks) {
        ss += (p - mean) * (p - mean);
    }
    double sd = std::sqrt(ss / static_cast<double>(peaks.size()));
    return sd / std::sqrt(static_cast<double>(peaks.size()));
}

}  // namespace photostat
