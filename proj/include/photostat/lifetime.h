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

#ifndef PHOTOSTAT_LIFETIME_H
#define PHOTOSTAT_LIFETIME_H

#include <cstdint>
#include <vector>

#include "photostat/timetag.h"

namespace photostat {

/// Detector arrival times relative to the preceding clock tag, over [0, clock_period).
struct LifetimeHistogram {
    picoseconds bin_width = 0;
    picoseconds clock_period = kDefaultClockPeriod;
    std::vector<uint64_t> counts;

    double bin_centre(size_t i) const {
        return (static_cast<double>(i) + 0.5) * static_cast<double>(bin_width);
    }
};

/// Tags before the first clock tag, or more than one period after the last
/// one, are skipped. Throws data_error if the stream has no clock tags.
LifetimeHistogram lifetime_histogram(const TimeTagStream &stream, picoseconds bin_width);

/// Model A exp(-(t - fit_start) / tau) + offset, t the bin centre.
struct LifetimeFit {
    double tau_hat = 0;
    double amplitude = 0;
    double offset = 0;
    /// sqrt of the weighted residual sum of squares.
    double residual_norm = 0;
    size_t n_bins = 0;
};

/// Weighted least squares over the bins whose centre is at or after
/// fit_start, weights 1 / max(count, 1). Amplitude and offset are solved
/// exactly for each tau; tau is found by a log-grid scan refined by golden
/// section search.
LifetimeFit fit_lifetime(const LifetimeHistogram &histogram, picoseconds fit_start);

}  // namespace photostat

#endif
