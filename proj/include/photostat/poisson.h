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

#ifndef PHOTOSTAT_POISSON_H
#define PHOTOSTAT_POISSON_H

#include <cstdint>
#include <span>

namespace photostat {

/// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Smallest x with P(a, x) >= p, by bisection on the monotone P.
double gamma_p_quantile(double a, double p);

struct CountInterval {
    double sigma_low;
    double sigma_up;
};

/// Asymmetric 1-sigma uncertainty of a Poisson count.
///
/// Above 100 counts this is sqrt(N) both ways. Otherwise the central Garwood
/// interval: lower = Q_chi2(alpha/2; 2N)/2, upper = Q_chi2(1 - alpha/2; 2N + 2)/2
/// with alpha = 1 - cl, evaluated through the incomplete gamma function.
CountInterval poisson_interval(uint64_t n_counts, double cl = 0.683);

/// Population standard deviation of the uncorrelated peak integrals divided by sqrt(n),
/// i.e. the uncertainty of their mean. Needs at least two peaks.
double uncorrelated_sigma(std::span<const double> peaks);

}  // namespace photostat

#endif
