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

#include "photostat/selftest.h"

#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "photostat/detection.h"
#include "photostat/errors.h"
#include "photostat/rng.h"
#include "photostat/tag_file.h"

namespace photostat {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

TimeTagStream random_stream(uint64_t seed, size_t n_tags, int n_detectors, picoseconds span) {
    CounterRng rng(seed, RngPurpose::test, 0);
    std::vector<TimeTag> tags;
    for (size_t i = 0; i < n_tags; i++) {
        auto t = static_cast<picoseconds>(rng.uniform() * static_cast<double>(span));
        // Bunch half of the tags onto the pulse lattice so peaks are populated.
        if (rng.uniform() < 0.5) {
            t = t / kDefaultClockPeriod * kDefaultClockPeriod + static_cast<picoseconds>(rng.normal() * 400);
            t = std::max<picoseconds>(t, 0);
        }
        tags.push_back({t, static_cast<uint8_t>(1 + rng() % n_detectors)});
    }
    return TimeTagStream::from_unsorted(std::move(tags), kDefaultClockPeriod, n_detectors);
}

SelfTestResult check(const std::string &name, const std::function<std::string()> &body) {
    try {
        std::string detail = body();
        return {name, detail.empty(), detail.empty() ? "ok" : detail};
    } catch (const std::exception &e) {
        return {name, false, e.what()};
    }
}

std::string within(const char *what, const GEstimate &g, double expected) {
    double sigma = g.value < expected ? g.sigma_up : g.sigma_low;
    if (std::abs(g.value - expected) <= 3 * sigma) {
        return "";
    }
    return fmt::format("{} = {:.4g} (+{:.2g}/-{:.2g}), expected {}", what, g.value, g.sigma_up, g.sigma_low,
                       expected);
}

}  // namespace

CorrelationHistogram naive_histogram(const TimeTagStream &stream, const HistogramOptions &options) {
    picoseconds period = stream.clock_period();
    validate_options(options, period);
    if (static_cast<int>(options.channels.size()) != options.order) {
        throw validation_error("naive_histogram needs one channel per axis position");
    }
    int axes = options.order - 1;
    int radius = static_cast<int>(options.max_delay / period);
    bool dense = options.order < 4;
    int64_t half = options.max_delay / options.bin_width;
    int64_t len = 2 * half + 1;

    CorrelationHistogram h;
    h.order = options.order;
    h.bin_width = options.bin_width;
    h.max_delay = options.max_delay;
    h.clock_period = period;
    h.channel_sets = {options.channels};
    h.peaks.order = options.order;
    h.peaks.radius = radius;
    h.peaks.clock_period = period;
    h.peaks.window = options.window;
    size_t peak_size = 1;
    size_t dense_size = 1;
    for (int i = 0; i < axes; i++) {
        peak_size *= 2 * radius + 1;
        dense_size *= len;
    }
    h.peaks.counts.assign(peak_size, 0);
    if (dense) {
        h.counts.assign(dense_size, 0);
    }

    std::vector<std::vector<picoseconds>> times;
    for (uint8_t ch : options.channels) {
        times.push_back(stream.channel_times(ch));
        h.channel_totals.push_back(times.back().size());
    }
    std::vector<size_t> idx(options.order, 0);
    for (const auto &t : times) {
        if (t.empty()) {
            return h;
        }
    }
    while (true) {
        bool in_dense = dense;
        bool in_peak = true;
        size_t di = 0;
        LatticePoint lattice{};
        for (int i = 0; i < axes; i++) {
            picoseconds tau = times[i + 1][idx[i + 1]] - times[i][idx[i]];
            int64_t b = floor_div(2 * tau + options.bin_width, 2 * options.bin_width);
            in_dense = in_dense && std::abs(b) <= half;
            di = di * len + static_cast<size_t>(b + half);
            int64_t l = floor_div(2 * tau + period, 2 * period);
            in_peak = in_peak && std::abs(l) <= radius && 2 * std::abs(tau - l * period) <= options.window;
            lattice[i] = static_cast<int>(l);
        }
        if (in_dense) {
            h.counts[di]++;
        }
        if (in_peak) {
            h.peaks.counts[h.peaks.index(lattice)]++;
        }
        int pos = options.order - 1;
        while (pos >= 0 && ++idx[pos] == times[pos].size()) {
            idx[pos] = 0;
            pos--;
        }
        if (pos < 0) {
            break;
        }
    }
    return h;
}

std::vector<SelfTestResult> run_selftest(unsigned threads) {
    std::vector<SelfTestResult> results;
    for (int m = 2; m <= 4; m++) {
        results.push_back(check(fmt::format("oracle equivalence m={}", m), [&]() -> std::string {
            size_t n_tags = m == 2 ? 4000 : (m == 3 ? 600 : 160);
            for (uint64_t seed = 1; seed <= 5; seed++) {
                auto stream = random_stream(seed, n_tags, m, 60 * kDefaultClockPeriod);
                auto o = HistogramOptions::defaults(m);
                o.bin_width = m == 4 ? o.bin_width : 500;
                o.max_delay = 4 * kDefaultClockPeriod;
                o.threads = threads;
                for (int i = 1; i <= m; i++) {
                    o.channels.push_back(static_cast<uint8_t>(i));
                }
                auto fast = build_histogram(stream, o);
                auto slow = naive_histogram(stream, o);
                if (fast.counts != slow.counts || fast.peaks.counts != slow.peaks.counts) {
                    return fmt::format("mismatch on random stream {}", seed);
                }
            }
            return "";
        }));
    }

    DetectionConfig det;
    const uint64_t pulses = 200000;
    auto reference = [&](const ReferenceSource &source, std::array<double, 3> expected) -> std::string {
        auto stream = simulate_reference(source, pulses, det, 11, kDefaultClockPeriod, 204.0, threads);
        for (int m = 2; m <= 4; m++) {
            auto o = HistogramOptions::defaults(m);
            o.threads = threads;
            auto g = g_zero(build_combined_histogram(stream, o));
            auto bad = within(fmt::format("g{}(0)", m).c_str(), g, expected[m - 2]);
            if (!bad.empty()) {
                return bad;
            }
        }
        return "";
    };
    results.push_back(check("coherent source g(m)(0) = 1", [&] {
        return reference(CoherentSource{2.0}, {1, 1, 1});
    }));
    results.push_back(check("thermal source g(m)(0) = m!", [&] {
        return reference(ThermalSource{2.0}, {2, 6, 24});
    }));
    results.push_back(check("fock(1) source g2(0) = 0", [&]() -> std::string {
        auto stream = simulate_reference(FockSource{1}, pulses, det, 12, kDefaultClockPeriod, 204.0, threads);
        auto g = g_zero(build_combined_histogram(stream, HistogramOptions::defaults(2)));
        return g.n_c == 0 ? "" : fmt::format("N_c = {}", g.n_c);
    }));
    results.push_back(check("thread-count independence", [&]() -> std::string {
        auto stream = simulate_reference(CoherentSource{1.0}, 50000, det, 13);
        auto o = HistogramOptions::defaults(2);
        o.channels = {1, 2};
        o.threads = 1;
        auto one = build_histogram(stream, o);
        o.threads = 7;
        auto many = build_histogram(stream, o);
        return one.counts == many.counts && one.peaks.counts == many.peaks.counts ? "" : "counts differ";
    }));
    results.push_back(check("tag file round trip", [&]() -> std::string {
        auto stream = random_stream(99, 10000, 4, 1000 * kDefaultClockPeriod);
        return decode_stream(encode_stream(stream)) == stream ? "" : "decoded stream differs";
    }));
    return results;
}

}  // namespace photostat
