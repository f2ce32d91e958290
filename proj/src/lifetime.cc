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

#include "photostat/lifetime.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "photostat/errors.h"

namespace photostat {

namespace {

constexpr int kGridPoints = 400;
constexpr int kMaxRefineIterations = 200;
constexpr double kTauTolerance = 1e-10;

struct Residual {
    double chi2;
    double amplitude;
    double offset;
};

class TailData {
  public:
    TailData(const LifetimeHistogram &h, picoseconds fit_start) {
        for (size_t i = 0; i < h.counts.size(); i++) {
            double t = h.bin_centre(i);
            if (t < static_cast<double>(fit_start)) {
                continue;
            }
            t_.push_back(t - static_cast<double>(fit_start));
            y_.push_back(static_cast<double>(h.counts[i]));
            w_.push_back(1.0 / std::max(y_.back(), 1.0));
        }
    }

    size_t size() const {
        return t_.size();
    }
    double span() const {
        return t_.empty() ? 0 : t_.back() - t_.front();
    }
    double max_count() const {
        return y_.empty() ? 0 : *std::max_element(y_.begin(), y_.end());
    }

    /// Best amplitude and offset for a fixed tau, by the 2x2 normal equations.
    Residual solve(double tau) const {
        double s_ww = 0, s_we = 0, s_wee = 0, s_wy = 0, s_wey = 0;
        for (size_t i = 0; i < t_.size(); i++) {
            double e = std::exp(-t_[i] / tau);
            s_ww += w_[i];
            s_we += w_[i] * e;
            s_wee += w_[i] * e * e;
            s_wy += w_[i] * y_[i];
            s_wey += w_[i] * e * y_[i];
        }
        double det = s_wee * s_ww - s_we * s_we;
        Residual r{0, 0, 0};
        if (std::abs(det) <= 1e-300) {
            r.offset = s_wy / s_ww;
        } else {
            r.amplitude = (s_wey * s_ww - s_we * s_wy) / det;
            r.offset = (s_wee * s_wy - s_we * s_wey) / det;
        }
        for (size_t i = 0; i < t_.size(); i++) {
            double d = y_[i] - r.amplitude * std::exp(-t_[i] / tau) - r.offset;
            r.chi2 += w_[i] * d * d;
        }
        return r;
    }

  private:
    std::vector<double> t_, y_, w_;
};

}  // namespace

LifetimeHistogram lifetime_histogram(const TimeTagStream &stream, picoseconds bin_width) {
    if (bin_width <= 0) {
        throw validation_error("bin_width must be positive");
    }
    picoseconds period = stream.clock_period();
    LifetimeHistogram h;
    h.bin_width = bin_width;
    h.clock_period = period;
    h.counts.assign(static_cast<size_t>((period + bin_width - 1) / bin_width), 0);
    bool have_clock = false;
    picoseconds last_clock = 0;
    for (const auto &tag : stream.tags()) {
        if (tag.channel == kClockChannel) {
            have_clock = true;
            last_clock = tag.time;
            continue;
        }
        if (!have_clock) {
            continue;
        }
        picoseconds d = tag.time - last_clock;
        if (d < period) {
            h.counts[static_cast<size_t>(d / bin_width)]++;
        }
    }
    if (!have_clock) {
        throw data_error("no clock tags (channel 0) in stream");
    }
    return h;
}

LifetimeFit fit_lifetime(const LifetimeHistogram &histogram, picoseconds fit_start) {
    TailData data(histogram, fit_start);
    if (data.size() < 3) {
        throw data_error("fewer than 3 bins after fit_start=" + std::to_string(fit_start));
    }
    if (data.max_count() <= 0) {
        throw data_error("degenerate tail: all bins after fit_start are empty");
    }

    double lo = 0.25 * static_cast<double>(histogram.bin_width);
    double hi = 10.0 * std::max(data.span(), static_cast<double>(histogram.bin_width));
    double ratio = std::log(hi / lo) / (kGridPoints - 1);
    int best = 0;
    double best_chi2 = INFINITY;
    for (int k = 0; k < kGridPoints; k++) {
        auto r = data.solve(lo * std::exp(ratio * k));
        if (r.amplitude > 0 && r.chi2 < best_chi2) {
            best_chi2 = r.chi2;
            best = k;
        }
    }
    if (!std::isfinite(best_chi2) || best == 0 || best == kGridPoints - 1) {
        throw numerical_error("degenerate tail: no decaying component within tau in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] ps");
    }

    // Golden section search in log(tau) between the grid neighbours of the best point.
    const double golden = (std::sqrt(5.0) - 1) / 2;
    double a = std::log(lo) + ratio * (best - 1);
    double b = std::log(lo) + ratio * (best + 1);
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = data.solve(std::exp(c)).chi2;
    double fd = data.solve(std::exp(d)).chi2;
    int it = 0;
    for (; it < kMaxRefineIterations && b - a > kTauTolerance; it++) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = data.solve(std::exp(c)).chi2;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = data.solve(std::exp(d)).chi2;
        }
    }
    if (b - a > kTauTolerance) {
        throw numerical_error("lifetime fit did not converge");
    }
    double tau = std::exp((a + b) / 2);
    auto r = data.solve(tau);
    if (!(r.amplitude > 1e-9 * data.max_count())) {
        throw numerical_error("degenerate tail: fitted amplitude is not positive");
    }
    LifetimeFit fit;
    fit.tau_hat = tau;
    fit.amplitude = r.amplitude;
    fit.offset = r.offset;
    fit.residual_norm = std::sqrt(r.chi2);
    fit.n_bins = data.size();
    return fit;
}

}  // namespace photostat
