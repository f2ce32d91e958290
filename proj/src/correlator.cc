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

#include "photostat/correlator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "photostat/errors.h"
#include "photostat/parallel.h"
#include "photostat/poisson.h"

namespace photostat {

namespace {

/// Largest dense histogram we are willing to allocate per thread.
constexpr size_t kMaxDenseBins = size_t{1} << 26;
constexpr int kMinUncorrelatedPeaks = 5;

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

size_t ipow(size_t base, int exp) {
    size_t r = 1;
    for (int i = 0; i < exp; i++) {
        r *= base;
    }
    return r;
}

std::string join_channels(std::span<const uint8_t> channels) {
    std::string s;
    for (auto c : channels) {
        if (!s.empty()) {
            s += ", ";
        }
        s += std::to_string(c);
    }
    return s.empty() ? "none" : s;
}

struct Geometry {
    int axes;
    picoseconds period;
    picoseconds window;
    picoseconds bin_width;
    /// Dense bins per side of zero; -1 when no dense array is kept.
    int64_t half_bins;
    int64_t radius;
    /// Widest delay any counted tuple can have on one axis.
    picoseconds reach;
    std::array<size_t, kMaxOrder - 1> dense_stride{};
    std::array<size_t, kMaxOrder - 1> peak_stride{};
    size_t dense_size = 0;
    size_t peak_size = 0;
};

Geometry make_geometry(const HistogramOptions &o, picoseconds period) {
    Geometry g;
    g.axes = o.order - 1;
    g.period = period;
    g.window = o.window;
    g.bin_width = o.bin_width;
    g.radius = o.max_delay / period;
    g.half_bins = o.order < 4 ? o.max_delay / o.bin_width : -1;
    g.reach = g.radius * period + o.window / 2;
    if (g.half_bins >= 0) {
        g.reach = std::max(g.reach, o.max_delay + o.bin_width / 2);
    }
    size_t dense_len = g.half_bins >= 0 ? static_cast<size_t>(2 * g.half_bins + 1) : 0;
    size_t peak_len = static_cast<size_t>(2 * g.radius + 1);
    size_t ds = 1;
    size_t ps = 1;
    for (int i = g.axes - 1; i >= 0; i--) {
        g.dense_stride[i] = ds;
        g.peak_stride[i] = ps;
        ds *= dense_len;
        ps *= peak_len;
    }
    g.dense_size = g.half_bins >= 0 ? ds : 0;
    g.peak_size = ps;
    return g;
}

struct Tally {
    std::vector<uint64_t> dense;
    std::vector<uint64_t> peaks;
};

using ChannelTimes = std::array<std::span<const picoseconds>, kMaxOrder>;

template <int Level, int Axes>
void visit(const Geometry &g, const ChannelTimes &ch, picoseconds prev, size_t begin, size_t dense_index,
           size_t peak_index, bool dense_ok, bool peak_ok, Tally &tally) {
    auto times = ch[Level + 1];
    for (size_t k = begin; k < times.size() && times[k] <= prev + g.reach; k++) {
        picoseconds tau = times[k] - prev;
        bool d = dense_ok;
        size_t di = dense_index;
        if (d) {
            int64_t b = floor_div(2 * tau + g.bin_width, 2 * g.bin_width);
            if (b < -g.half_bins || b > g.half_bins) {
                d = false;
            } else {
                di += static_cast<size_t>(b + g.half_bins) * g.dense_stride[Level];
            }
        }
        bool p = peak_ok;
        size_t pi = peak_index;
        if (p) {
            int64_t lattice = floor_div(2 * tau + g.period, 2 * g.period);
            picoseconds residual = tau - lattice * g.period;
            if (lattice < -g.radius || lattice > g.radius || 2 * std::abs(residual) > g.window) {
                p = false;
            } else {
                pi += static_cast<size_t>(lattice + g.radius) * g.peak_stride[Level];
            }
        }
        if (!d && !p) {
            continue;
        }
        if constexpr (Level + 1 == Axes) {
            if (d) {
                tally.dense[di]++;
            }
            if (p) {
                tally.peaks[pi]++;
            }
        } else {
            auto next = ch[Level + 2];
            size_t start = std::lower_bound(next.begin(), next.end(), times[k] - g.reach) - next.begin();
            visit<Level + 1, Axes>(g, ch, times[k], start, di, pi, d, p, tally);
        }
    }
}

template <int Axes>
void enumerate(const Geometry &g, const ChannelTimes &ch, size_t begin, size_t end, Tally &tally) {
    auto first = ch[0];
    auto second = ch[1];
    size_t start = 0;
    bool dense = g.half_bins >= 0;
    for (size_t k = begin; k < end; k++) {
        picoseconds lo = first[k] - g.reach;
        while (start < second.size() && second[start] < lo) {
            start++;
        }
        visit<0, Axes>(g, ch, first[k], start, 0, 0, dense, true, tally);
    }
}

bool same_geometry(const CorrelationHistogram &a, const CorrelationHistogram &b) {
    return a.order == b.order && a.bin_width == b.bin_width && a.max_delay == b.max_delay &&
           a.clock_period == b.clock_period && a.peaks.window == b.peaks.window && a.peaks.radius == b.peaks.radius &&
           a.counts.size() == b.counts.size();
}

struct Normalization {
    double mean;
    double sigma;
    int n_peaks;
};

Normalization uncorrelated_level(const PeakTable &peaks) {
    std::vector<double> values;
    for (size_t i = 0; i < peaks.size(); i++) {
        if (classify_peak(peaks.point(i), peaks.order).uncorrelated()) {
            values.push_back(static_cast<double>(peaks.counts[i]));
        }
    }
    if (static_cast<int>(values.size()) < kMinUncorrelatedPeaks) {
        throw data_error("need at least " + std::to_string(kMinUncorrelatedPeaks) + " uncorrelated peaks, found " +
                         std::to_string(values.size()));
    }
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (mean <= 0) {
        throw data_error("no uncorrelated coincidences; cannot normalize");
    }
    return {mean, uncorrelated_sigma(values), static_cast<int>(values.size())};
}

GEstimate ratio_estimate(uint64_t n_c, int n_correlated, const Normalization &u) {
    GEstimate e;
    e.n_c = n_c;
    e.n_correlated_peaks = n_correlated;
    e.n_uncorrelated_peaks = u.n_peaks;
    e.n_u_mean = n_correlated * u.mean;
    e.n_u_sigma = n_correlated * u.sigma;
    e.value = static_cast<double>(n_c) / e.n_u_mean;
    auto counts = poisson_interval(n_c);
    double rel_u = e.n_u_sigma / e.n_u_mean;
    e.sigma_low = std::hypot(counts.sigma_low / e.n_u_mean, e.value * rel_u);
    e.sigma_up = std::hypot(counts.sigma_up / e.n_u_mean, e.value * rel_u);
    return e;
}

std::vector<int> block_sizes(const PeakPattern &pattern) {
    std::vector<int> sizes(pattern.n_blocks(), 0);
    for (int i = 0; i < pattern.order; i++) {
        sizes[pattern.block[i]]++;
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

std::optional<SliceKind> slice_kind(const PeakPattern &pattern) {
    auto sizes = block_sizes(pattern);
    if (sizes.size() <= 1 || sizes.size() == static_cast<size_t>(pattern.order)) {
        return std::nullopt;
    }
    if (sizes[0] == 3) {
        return SliceKind::triple;
    }
    if (sizes.size() >= 2 && sizes[1] == 2) {
        return SliceKind::pair_pair;
    }
    return SliceKind::pair;
}

std::string pattern_label(const PeakPattern &pattern) {
    std::string label;
    for (int b = 0; b < pattern.n_blocks(); b++) {
        label += '{';
        bool first = true;
        for (int i = 0; i < pattern.order; i++) {
            if (pattern.block[i] == b) {
                if (!first) {
                    label += ',';
                }
                label += std::to_string(i + 1);
                first = false;
            }
        }
        label += '}';
    }
    return label;
}

void require_slices(const CorrelationHistogram &histogram) {
    if (histogram.order < 3) {
        throw validation_error("lower-order slices need an m >= 3 histogram");
    }
}

}  // namespace

HistogramOptions HistogramOptions::defaults(int order, picoseconds clock_period) {
    HistogramOptions o;
    o.order = order;
    switch (order) {
    case 2:
        o.bin_width = 50;
        o.max_delay = 10 * clock_period;
        break;
    case 3:
        o.bin_width = clock_period / 4;
        o.max_delay = 5 * clock_period;
        break;
    default:
        o.bin_width = clock_period;
        o.max_delay = 3 * clock_period;
        break;
    }
    return o;
}

size_t PeakTable::index(const LatticePoint &point) const {
    size_t idx = 0;
    for (int i = 0; i < axes(); i++) {
        if (std::abs(point[i]) > radius) {
            throw validation_error("lattice point outside the peak table");
        }
        idx = idx * static_cast<size_t>(2 * radius + 1) + static_cast<size_t>(point[i] + radius);
    }
    return idx;
}

LatticePoint PeakTable::point(size_t index) const {
    LatticePoint p{};
    size_t len = static_cast<size_t>(2 * radius + 1);
    for (int i = axes() - 1; i >= 0; i--) {
        p[i] = static_cast<int>(index % len) - radius;
        index /= len;
    }
    return p;
}

uint64_t PeakTable::total() const {
    return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

uint64_t CorrelationHistogram::count_at(std::span<const int> bin) const {
    if (!has_dense_counts()) {
        throw validation_error("histogram keeps no dense bins");
    }
    if (static_cast<int>(bin.size()) != order - 1) {
        throw validation_error("bin index needs one entry per delay axis");
    }
    int half = bins_per_axis() / 2;
    size_t idx = 0;
    for (int b : bin) {
        if (std::abs(b) > half) {
            return 0;
        }
        idx = idx * static_cast<size_t>(bins_per_axis()) + static_cast<size_t>(b + half);
    }
    return counts[idx];
}

uint64_t CorrelationHistogram::total_counts() const {
    return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

void validate_options(const HistogramOptions &o, picoseconds clock_period) {
    if (o.order < kMinOrder || o.order > kMaxOrder) {
        throw validation_error("order must be 2, 3 or 4, got " + std::to_string(o.order));
    }
    if (o.bin_width <= 0) {
        throw validation_error("bin_width must be positive");
    }
    if (o.max_delay < 3 * clock_period) {
        throw validation_error("max_delay must span at least 3 clock periods");
    }
    if (o.order < 4 && o.max_delay % o.bin_width != 0) {
        throw validation_error("bin_width must divide max_delay");
    }
    if (o.window <= 0 || o.window > clock_period) {
        throw validation_error("peak window must be in (0, clock_period]");
    }
    if (!o.channels.empty()) {
        std::set<uint8_t> distinct(o.channels.begin(), o.channels.end());
        if (distinct.size() != o.channels.size()) {
            throw validation_error("duplicate channels in histogram selection");
        }
        if (distinct.count(kClockChannel)) {
            throw validation_error("channel 0 is the clock and cannot be correlated");
        }
    }
}

CorrelationHistogram build_histogram(const TimeTagStream &stream, const HistogramOptions &options) {
    picoseconds period = stream.clock_period();
    validate_options(options, period);
    if (static_cast<int>(options.channels.size()) != options.order) {
        throw validation_error("an order-" + std::to_string(options.order) + " histogram needs " +
                               std::to_string(options.order) + " channels");
    }
    Geometry g = make_geometry(options, period);
    if (g.dense_size > kMaxDenseBins) {
        throw validation_error("histogram too large: " + std::to_string(g.dense_size) + " bins");
    }

    std::vector<std::vector<picoseconds>> times;
    auto present = stream.detector_channels();
    for (uint8_t ch : options.channels) {
        times.push_back(stream.channel_times(ch));
        if (times.back().empty()) {
            throw data_error("channel " + std::to_string(ch) + " has no tags; channels present: " +
                             join_channels(present));
        }
    }
    ChannelTimes spans{};
    for (size_t i = 0; i < times.size(); i++) {
        spans[i] = times[i];
    }

    size_t n_first = times[0].size();
    size_t n_chunks = std::min<size_t>(resolve_threads(options.threads), std::max<size_t>(1, n_first / 4096));
    std::vector<Tally> partial(n_chunks);
    for_each_chunk(n_first, n_chunks, [&](size_t c, size_t begin, size_t end) {
        Tally &t = partial[c];
        t.dense.assign(g.dense_size, 0);
        t.peaks.assign(g.peak_size, 0);
        switch (g.axes) {
        case 1:
            enumerate<1>(g, spans, begin, end, t);
            break;
        case 2:
            enumerate<2>(g, spans, begin, end, t);
            break;
        default:
            enumerate<3>(g, spans, begin, end, t);
            break;
        }
    });

    CorrelationHistogram h;
    h.order = options.order;
    h.bin_width = options.bin_width;
    h.max_delay = options.max_delay;
    h.clock_period = period;
    h.channel_sets = {options.channels};
    h.peaks.order = options.order;
    h.peaks.radius = static_cast<int>(g.radius);
    h.peaks.clock_period = period;
    h.peaks.window = options.window;
    h.counts = std::move(partial[0].dense);
    h.peaks.counts = std::move(partial[0].peaks);
    for (size_t c = 1; c < partial.size(); c++) {
        for (size_t i = 0; i < h.counts.size(); i++) {
            h.counts[i] += partial[c].dense[i];
        }
        for (size_t i = 0; i < h.peaks.counts.size(); i++) {
            h.peaks.counts[i] += partial[c].peaks[i];
        }
    }
    for (auto &t : times) {
        h.channel_totals.push_back(t.size());
    }
    return h;
}

CorrelationHistogram merge_histograms(std::span<const CorrelationHistogram> parts) {
    if (parts.empty()) {
        throw validation_error("nothing to merge");
    }
    CorrelationHistogram out = parts[0];
    for (size_t p = 1; p < parts.size(); p++) {
        const auto &h = parts[p];
        if (!same_geometry(out, h)) {
            throw validation_error("cannot merge histograms with different geometry");
        }
        for (size_t i = 0; i < out.counts.size(); i++) {
            out.counts[i] += h.counts[i];
        }
        for (size_t i = 0; i < out.peaks.counts.size(); i++) {
            out.peaks.counts[i] += h.peaks.counts[i];
        }
        for (size_t i = 0; i < out.channel_totals.size(); i++) {
            out.channel_totals[i] += h.channel_totals[i];
        }
        out.channel_sets.insert(out.channel_sets.end(), h.channel_sets.begin(), h.channel_sets.end());
    }
    return out;
}

CorrelationHistogram build_combined_histogram(const TimeTagStream &stream, const HistogramOptions &options) {
    std::vector<uint8_t> channels = options.channels;
    if (channels.empty()) {
        channels = stream.detector_channels();
    }
    std::sort(channels.begin(), channels.end());
    if (static_cast<int>(channels.size()) < options.order) {
        throw data_error("order " + std::to_string(options.order) + " needs " + std::to_string(options.order) +
                         " detector channels; channels present: " + join_channels(stream.detector_channels()));
    }
    std::vector<CorrelationHistogram> parts;
    size_t n = channels.size();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + options.order, true);
    do {
        HistogramOptions o = options;
        o.channels.clear();
        for (size_t i = 0; i < n; i++) {
            if (pick[i]) {
                o.channels.push_back(channels[i]);
            }
        }
        parts.push_back(build_histogram(stream, o));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return merge_histograms(parts);
}

PeakTable integrate_peaks(const CorrelationHistogram &histogram, picoseconds window) {
    picoseconds period = histogram.clock_period;
    if (window <= 0 || window > period) {
        throw validation_error("integration window must be in (0, clock_period], got " + std::to_string(window));
    }
    if (window == histogram.peaks.window) {
        return histogram.peaks;
    }
    if (!histogram.has_dense_counts()) {
        throw validation_error("order-4 histograms keep only peak integrals for their build window (" +
                               std::to_string(histogram.peaks.window) + " ps)");
    }
    PeakTable table;
    table.order = histogram.order;
    table.clock_period = period;
    table.window = window;
    // Peaks whose window is fully covered by the binned range.
    table.radius = static_cast<int>(floor_div(2 * histogram.max_delay + histogram.bin_width - window, 2 * period));
    table.counts.assign(ipow(2 * table.radius + 1, table.axes()), 0);

    int axes = histogram.order - 1;
    int len = histogram.bins_per_axis();
    int half = len / 2;
    for (size_t idx = 0; idx < histogram.counts.size(); idx++) {
        if (histogram.counts[idx] == 0) {
            continue;
        }
        LatticePoint lattice{};
        bool inside = true;
        size_t rest = idx;
        for (int i = axes - 1; i >= 0 && inside; i--) {
            int64_t b = static_cast<int64_t>(rest % len) - half;
            rest /= len;
            picoseconds centre = b * histogram.bin_width;
            int64_t l = floor_div(2 * centre + period, 2 * period);
            inside = std::abs(l) <= table.radius && 2 * std::abs(centre - l * period) <= window;
            lattice[i] = static_cast<int>(l);
        }
        if (inside) {
            table.counts[table.index(lattice)] += histogram.counts[idx];
        }
    }
    return table;
}

int PeakPattern::n_blocks() const {
    return *std::max_element(block.begin(), block.begin() + order) + 1;
}

PeakPattern classify_peak(const LatticePoint &point, int order) {
    PeakPattern pattern;
    pattern.order = order;
    std::array<int64_t, kMaxOrder> offset{};
    for (int i = 1; i < order; i++) {
        offset[i] = offset[i - 1] + point[i - 1];
    }
    int next = 0;
    for (int i = 0; i < order; i++) {
        pattern.block[i] = -1;
        for (int j = 0; j < i; j++) {
            if (offset[j] == offset[i]) {
                pattern.block[i] = pattern.block[j];
                break;
            }
        }
        if (pattern.block[i] < 0) {
            pattern.block[i] = next++;
        }
    }
    return pattern;
}

GEstimate g_zero(const PeakTable &peaks) {
    Normalization u = uncorrelated_level(peaks);
    return ratio_estimate(peaks.at(LatticePoint{}), 1, u);
}

GEstimate g_zero(const CorrelationHistogram &histogram) {
    return g_zero(histogram.peaks);
}

std::vector<SliceEstimate> g_lower_order_slices(const CorrelationHistogram &histogram) {
    require_slices(histogram);
    const PeakTable &peaks = histogram.peaks;
    Normalization u = uncorrelated_level(peaks);

    struct Line {
        PeakPattern pattern;
        SliceKind kind;
        uint64_t counts = 0;
        int n_peaks = 0;
    };
    std::vector<Line> lines;
    for (size_t i = 0; i < peaks.size(); i++) {
        PeakPattern pattern = classify_peak(peaks.point(i), peaks.order);
        auto kind = slice_kind(pattern);
        if (!kind) {
            continue;
        }
        auto it = std::find_if(lines.begin(), lines.end(), [&](const Line &l) {
            return l.pattern == pattern;
        });
        if (it == lines.end()) {
            lines.push_back({pattern, *kind});
            it = lines.end() - 1;
        }
        it->counts += peaks.counts[i];
        it->n_peaks++;
    }
    std::sort(lines.begin(), lines.end(), [](const Line &a, const Line &b) {
        return a.pattern.block < b.pattern.block;
    });
    std::vector<SliceEstimate> out;
    for (const auto &l : lines) {
        out.push_back({pattern_label(l.pattern), l.kind, ratio_estimate(l.counts, l.n_peaks, u)});
    }
    return out;
}

GEstimate combined_slice_estimate(const CorrelationHistogram &histogram, SliceKind kind) {
    require_slices(histogram);
    const PeakTable &peaks = histogram.peaks;
    Normalization u = uncorrelated_level(peaks);
    uint64_t counts = 0;
    int n_peaks = 0;
    for (size_t i = 0; i < peaks.size(); i++) {
        if (slice_kind(classify_peak(peaks.point(i), peaks.order)) == kind) {
            counts += peaks.counts[i];
            n_peaks++;
        }
    }
    if (n_peaks == 0) {
        throw data_error("no peaks of the requested slice kind in an order-" + std::to_string(histogram.order) +
                         " histogram");
    }
    return ratio_estimate(counts, n_peaks, u);
}

}  // namespace photostat
