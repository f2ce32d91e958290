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

#ifndef PHOTOSTAT_CORRELATOR_H
#define PHOTOSTAT_CORRELATOR_H

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "photostat/timetag.h"

namespace photostat {

constexpr int kMinOrder = 2;
constexpr int kMaxOrder = 4;

/// Full width of the peak integration window.
constexpr picoseconds kDefaultPeakWindow = 3000;

struct HistogramOptions {
    int order = 2;
    picoseconds bin_width = 50;
    /// Half range of every delay axis. Must be a multiple of bin_width and at least 3 clock periods.
    picoseconds max_delay = 10 * kDefaultClockPeriod;
    picoseconds window = kDefaultPeakWindow;
    /// One distinct channel per axis position. Empty means "every combination
    /// of detector channels" where a function supports it.
    std::vector<uint8_t> channels;
    unsigned threads = 0;

    /// 50 ps bins over +-10 periods for m=2, 3.125 ns bins over +-5 periods
    /// for m=3, one bin per period over +-3 periods for m=4.
    static HistogramOptions defaults(int order, picoseconds clock_period = kDefaultClockPeriod);
};

/// A point of the peak lattice: delay axis i sits at lattice[i] clock periods.
using LatticePoint = std::array<int, kMaxOrder - 1>;

/// Integrated counts of every lattice peak with |lattice[i]| <= radius.
struct PeakTable {
    int order = 2;
    int radius = 0;
    picoseconds clock_period = kDefaultClockPeriod;
    picoseconds window = kDefaultPeakWindow;
    std::vector<uint64_t> counts;

    int axes() const {
        return order - 1;
    }
    size_t index(const LatticePoint &point) const;
    LatticePoint point(size_t index) const;
    uint64_t at(const LatticePoint &point) const {
        return counts[index(point)];
    }
    size_t size() const {
        return counts.size();
    }
    uint64_t total() const;
};

/// Multi-start multi-stop coincidence histogram of order m.
///
/// A tuple (t_1, ..., t_m), one tag per selected channel, has delays
/// tau_i = t_{i+1} - t_i. Every tuple whose delays fall in the axis range is
/// binned; every tuple whose delays all lie within window/2 of a lattice point
/// is added to that peak. Orders 2 and 3 keep dense bins; order 4 keeps only
/// the peak table.
struct CorrelationHistogram {
    int order = 2;
    picoseconds bin_width = 0;
    picoseconds max_delay = 0;
    picoseconds clock_period = kDefaultClockPeriod;
    /// Channel tuples that contributed (more than one after merging).
    std::vector<std::vector<uint8_t>> channel_sets;
    /// Dense counts, row-major over axes of length bins_per_axis(); empty for m = 4.
    std::vector<uint64_t> counts;
    PeakTable peaks;
    /// Tags per selected channel position (C_1..C_m), summed over channel sets.
    std::vector<uint64_t> channel_totals;

    int bins_per_axis() const {
        return static_cast<int>(2 * (max_delay / bin_width) + 1);
    }
    bool has_dense_counts() const {
        return !counts.empty();
    }
    /// Count in the bin whose centres are bin[i] * bin_width.
    uint64_t count_at(std::span<const int> bin) const;
    uint64_t total_counts() const;
};

void validate_options(const HistogramOptions &options, picoseconds clock_period);

/// Throws validation_error for bad geometry or duplicate channels. Identical
/// output for every thread count.
CorrelationHistogram build_histogram(const TimeTagStream &stream, const HistogramOptions &options);

/// Elementwise sum of histograms with identical geometry.
CorrelationHistogram merge_histograms(std::span<const CorrelationHistogram> parts);

/// Builds and merges one histogram per ascending combination of `order`
/// channels out of `channels` (every detector channel when empty).
CorrelationHistogram build_combined_histogram(const TimeTagStream &stream, const HistogramOptions &options);

/// Peak integrals for a window (full width). Exact tuple-level integrals for
/// the build window; otherwise re-integrated from the dense bins, with a bin
/// assigned to a peak when its centre lies inside the window.
PeakTable integrate_peaks(const CorrelationHistogram &histogram, picoseconds window = kDefaultPeakWindow);

/// How the m photons of a lattice peak group into pulses.
/// block[i] is the group of axis position i, numbered by first appearance.
struct PeakPattern {
    std::array<int, kMaxOrder> block{};
    int order = 2;

    int n_blocks() const;
    bool uncorrelated() const {
        return n_blocks() == order;
    }
    bool central() const {
        return n_blocks() == 1;
    }
    bool operator==(const PeakPattern &) const = default;
};

/// Photons at positions i and j come from the same pulse exactly when their
/// cumulative lattice offsets agree.
PeakPattern classify_peak(const LatticePoint &point, int order);

/// A g^(m)(0)-style ratio of integrated counts with its raw ingredients.
struct GEstimate {
    double value = 0;
    double sigma_low = 0;
    double sigma_up = 0;
    uint64_t n_c = 0;
    /// Expected uncorrelated counts for the same number of peaks as n_c integrates.
    double n_u_mean = 0;
    double n_u_sigma = 0;
    int n_uncorrelated_peaks = 0;
    int n_correlated_peaks = 1;
};

/// Zero-delay estimate: the central peak over the mean of the peaks whose
/// photons come from pairwise distinct pulses.
GEstimate g_zero(const PeakTable &peaks);
GEstimate g_zero(const CorrelationHistogram &histogram);

enum class SliceKind {
    /// Exactly two photons share a pulse: estimates g2(0).
    pair,
    /// Two disjoint pairs share pulses: estimates g2(0)^2.
    pair_pair,
    /// Three photons share a pulse: estimates g3(0, 0).
    triple,
};

struct SliceEstimate {
    std::string label;
    SliceKind kind;
    GEstimate estimate;
};

/// One estimate per partially-correlated line or plane of an m >= 3 peak table,
/// labelled by the coinciding channels, e.g. "{1,2}{3}" or "{1,3}{2,4}".
std::vector<SliceEstimate> g_lower_order_slices(const CorrelationHistogram &histogram);

/// Pools all slices of one kind into a single estimate.
GEstimate combined_slice_estimate(const CorrelationHistogram &histogram, SliceKind kind);

}  // namespace photostat

#endif
