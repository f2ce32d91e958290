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

#ifndef PHOTOSTAT_TESTS_SUPPORT_H
#define PHOTOSTAT_TESTS_SUPPORT_H

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "photostat/correlator.h"
#include "photostat/timetag.h"

namespace photostat::testing {

/// Random sorted stream: uniform tags plus tags clustered on the clock lattice.
inline TimeTagStream random_stream(uint64_t seed, size_t n_tags, int n_detectors, picoseconds span,
                                   picoseconds period = kDefaultClockPeriod) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<picoseconds> uniform(0, span);
    std::uniform_int_distribution<int> channel(1, n_detectors);
    std::normal_distribution<double> spread(0.0, 600.0);
    std::bernoulli_distribution clustered(0.6);
    std::vector<TimeTag> tags;
    for (size_t i = 0; i < n_tags; i++) {
        picoseconds t = uniform(rng);
        if (clustered(rng)) {
            t = std::max<picoseconds>(0, t - t % period + static_cast<picoseconds>(spread(rng)));
        }
        tags.push_back({t, static_cast<uint8_t>(channel(rng))});
    }
    return TimeTagStream::from_unsorted(std::move(tags), period, static_cast<uint16_t>(n_detectors));
}

/// Histogram contents keyed by bin (or lattice) coordinates, from a plain
/// enumeration of every tuple with floating-point rounding of each delay.
struct BruteForce {
    std::map<std::vector<int64_t>, uint64_t> bins;
    std::map<std::vector<int64_t>, uint64_t> peaks;
};

/// Adds one tuple, given as one time per axis position, to `out`.
inline void tally(BruteForce &out, std::span<const picoseconds> t, const HistogramOptions &o, picoseconds period_ps) {
    const double period = static_cast<double>(period_ps);
    const double w = static_cast<double>(o.bin_width);
    const int64_t half_bins = o.max_delay / o.bin_width;
    const int64_t radius = o.max_delay / period_ps;
    std::vector<int64_t> bin;
    std::vector<int64_t> lattice;
    bool in_bins = o.order < 4;
    bool in_peak = true;
    for (int i = 0; i + 1 < o.order; i++) {
        double tau = static_cast<double>(t[i + 1] - t[i]);
        auto b = static_cast<int64_t>(std::floor(tau / w + 0.5));
        auto l = static_cast<int64_t>(std::floor(tau / period + 0.5));
        in_bins = in_bins && std::llabs(b) <= half_bins;
        in_peak = in_peak && std::llabs(l) <= radius &&
                  std::abs(tau - static_cast<double>(l) * period) <= 0.5 * static_cast<double>(o.window);
        bin.push_back(b);
        lattice.push_back(l);
    }
    if (in_bins) {
        out.bins[bin]++;
    }
    if (in_peak) {
        out.peaks[lattice]++;
    }
}

inline std::vector<std::vector<picoseconds>> selected_times(const TimeTagStream &stream, const HistogramOptions &o) {
    std::vector<std::vector<picoseconds>> times;
    for (auto ch : o.channels) {
        times.push_back(stream.channel_times(ch));
    }
    return times;
}

/// Every tuple of the selected channels, one nested loop per axis position.
inline BruteForce brute_force(const TimeTagStream &stream, const HistogramOptions &o) {
    BruteForce out;
    auto times = selected_times(stream, o);
    for (const auto &t : times) {
        if (t.empty()) {
            return out;
        }
    }
    std::vector<size_t> idx(o.order, 0);
    std::vector<picoseconds> tuple(o.order);
    for (;;) {
        for (int i = 0; i < o.order; i++) {
            tuple[i] = times[i][idx[i]];
        }
        tally(out, tuple, o, stream.clock_period());
        int pos = o.order - 1;
        while (pos >= 0 && ++idx[pos] == times[pos].size()) {
            idx[pos] = 0;
            pos--;
        }
        if (pos < 0) {
            return out;
        }
    }
}

/// Same result as brute_force. Each nested loop only visits tags within a
/// delay that could still reach a bin or a peak of the previous position.
inline BruteForce windowed_brute_force(const TimeTagStream &stream, const HistogramOptions &o) {
    BruteForce out;
    auto times = selected_times(stream, o);
    const picoseconds period = stream.clock_period();
    const picoseconds reach = std::max(o.max_delay + o.bin_width, o.max_delay + period);
    std::vector<picoseconds> tuple(o.order);
    std::function<void(int)> descend = [&](int pos) {
        if (pos == o.order) {
            tally(out, tuple, o, period);
            return;
        }
        const auto &t = times[pos];
        auto first = t.begin();
        auto last = t.end();
        if (pos > 0) {
            first = std::lower_bound(t.begin(), t.end(), tuple[pos - 1] - reach);
            last = std::upper_bound(t.begin(), t.end(), tuple[pos - 1] + reach);
        }
        for (auto it = first; it != last; ++it) {
            tuple[pos] = *it;
            descend(pos + 1);
        }
    };
    descend(0);
    return out;
}

/// Sparse view of a histogram in the same keying as BruteForce.
inline BruteForce sparse(const CorrelationHistogram &h) {
    BruteForce out;
    int axes = h.order - 1;
    int len = h.bins_per_axis();
    for (size_t i = 0; i < h.counts.size(); i++) {
        if (h.counts[i] == 0) {
            continue;
        }
        std::vector<int64_t> bin(axes);
        size_t rest = i;
        for (int a = axes - 1; a >= 0; a--) {
            bin[a] = static_cast<int64_t>(rest % len) - len / 2;
            rest /= len;
        }
        out.bins[bin] = h.counts[i];
    }
    for (size_t i = 0; i < h.peaks.size(); i++) {
        if (h.peaks.counts[i] == 0) {
            continue;
        }
        auto p = h.peaks.point(i);
        out.peaks[std::vector<int64_t>(p.begin(), p.begin() + axes)] = h.peaks.counts[i];
    }
    return out;
}

/// Two estimates agree within k combined standard deviations.
inline bool agree(double a, double sigma_a, double b, double sigma_b, double k = 3.0) {
    return std::abs(a - b) <= k * std::hypot(sigma_a, sigma_b);
}

/// The sigma on the side of `g` facing `target`.
inline double sigma_toward(const GEstimate &g, double target) {
    return target > g.value ? g.sigma_up : g.sigma_low;
}

}  // namespace photostat::testing

#endif
