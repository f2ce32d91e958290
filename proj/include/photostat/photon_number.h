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

#ifndef PHOTOSTAT_PHOTON_NUMBER_H
#define PHOTOSTAT_PHOTON_NUMBER_H

#include <array>
#include <cstdint>
#include <optional>

#include "photostat/correlator.h"
#include "photostat/distribution.h"
#include "photostat/timetag.h"

namespace photostat {

/// A measured quantity with asymmetric 1-sigma errors.
struct Measured {
    double value = 0;
    double sigma_low = 0;
    double sigma_up = 0;

    double sigma() const {
        return std::max(sigma_low, sigma_up);
    }
    static Measured from(const GEstimate &g) {
        return {g.value, g.sigma_low, g.sigma_up};
    }
};

/// Normalized correlations of the detected light and the per-pulse click probability.
struct MomentSet {
    Measured g2;
    Measured g3;
    Measured g4;
    Measured b_prime;

    void validate() const;
};

struct BrightnessEstimate {
    double value = 0;
    double sigma = 0;
    uint64_t periods = 0;
    uint64_t bright_periods = 0;
};

/// Fraction of clock periods with at least one detector tag; a period with
/// clicks on several detectors counts once. Tags before the first clock tag
/// are ignored. Throws data_error without clock tags.
BrightnessEstimate measure_brightness(const TimeTagStream &stream);
double brightness(const TimeTagStream &stream);

/// g2, g3, g4 of a truncated distribution from its factorial moments
/// <n(n-1)...(n-m+1)> / <n>^m. Throws data_error for the vacuum.
std::array<double, 3> normalized_moments(const PhotonNumberDist &d);

struct DetectedSolution {
    PhotonNumberDist dist;
    /// Mean detected photon number.
    double mu = 0;
};

/// Solves the truncated moment system for p'_0..p'_4.
///
/// For a trial mean mu the factorial moments F_m = g_m mu^m give p'_4..p'_1
/// by back substitution; mu is the smallest root in (0, 4] of
/// p'_1 + ... + p'_4 = B'. Probabilities down to -1e-6 are clamped to zero
/// and the result renormalized; anything more negative is a data_error.
DetectedSolution solve_detected(const MomentSet &moments);
PhotonNumberDist moments_to_detected(const MomentSet &moments);

/// Binomial loss: p'_m = sum_{n >= m} C(n, m) eta^m (1 - eta)^(n - m) p_n.
PhotonNumberDist apply_loss(const PhotonNumberDist &source, double eta);

/// Exact inverse of apply_loss, solved from p_4 downwards, with p_0 from
/// normalization. Throws data_error if some p_n < -1e-6.
PhotonNumberDist invert_loss(const PhotonNumberDist &detected, double eta);

/// The transmission for which the inverted distribution has no vacuum
/// (every pi pulse yields at least one photon), by bisection to 1e-9.
double estimate_eta(const PhotonNumberDist &detected_pi);

/// pi_n = p_n / (p_1 + ... + p_4), n = 1..4 (index 0 holds pi_1).
std::array<double, kMaxPhotonNumber> purities(const PhotonNumberDist &d);

/// g2 = 2 p2 / (p1 + 2 p2)^2 for a distribution without n > 2 terms.
double bunching_g2(double p0, double p1, double p2);

/// Whether some split of 1 - p0 into p1, p2 gives bunching_g2 > 1. The
/// maximum over the split is 1 / (2 (1 - p0)), so this is p0 > 0.5.
bool bunching_possible(double p0);

struct Estimate {
    double value = 0;
    double sigma = 0;
};

/// Full inversion with first-order error propagation.
struct PhotonNumberReport {
    MomentSet moments;
    double mu = 0;
    PhotonNumberDist detected;
    std::array<double, kMaxPhotonNumber + 1> detected_sigma{};
    std::optional<Estimate> eta;
    std::optional<PhotonNumberDist> source;
    std::array<double, kMaxPhotonNumber + 1> source_sigma{};
    /// Of the source distribution when eta is known, else of the detected one.
    std::array<double, kMaxPhotonNumber> purity{};
    std::array<double, kMaxPhotonNumber> purity_sigma{};
};

/// Uncertainties come from a central-difference Jacobian with respect to
/// (g2, g3, g4, B', eta), each input taken with its larger one-sided sigma.
/// Source populations that invert to negative values within 3 sigma of zero
/// are set to zero and the distribution renormalized; larger ones are a data_error.
PhotonNumberReport extract_photon_numbers(const MomentSet &moments, std::optional<Estimate> eta = std::nullopt);

/// estimate_eta applied to the detected distribution of a pi-pulse run, with
/// the same propagation.
Estimate estimate_eta_from_moments(const MomentSet &pi_moments);

struct MomentOptions {
    HistogramOptions g2 = HistogramOptions::defaults(2);
    HistogramOptions g3 = wide(3, 10);
    HistogramOptions g4 = wide(4, 20);

    /// Default binning of `order` over +-`periods` clock periods.
    static HistogramOptions wide(int order, int periods, picoseconds clock_period = kDefaultClockPeriod);
};

/// g2, g3, g4 from histograms merged over every combination of detector
/// channels, plus the brightness.
MomentSet measure_moments(const TimeTagStream &stream, const MomentOptions &options = {});

}  // namespace photostat

#endif
