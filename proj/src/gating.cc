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

#include "photostat/gating.h"

#include <string>

#include "photostat/errors.h"

namespace photostat {

double acquisition_seconds(const TimeTagStream &stream) {
    size_t clocks = stream.count_channel(kClockChannel);
    if (clocks == 0) {
        throw data_error("no clock tags (channel 0) in stream");
    }
    return static_cast<double>(clocks) * static_cast<double>(stream.clock_period()) * 1e-12;
}

std::vector<GateScanPoint> gated_g2_scan(const TimeTagStream &stream, std::span<const picoseconds> t_starts,
                                         picoseconds t_stop, const HistogramOptions &options, picoseconds offset) {
    if (options.order != 2) {
        throw validation_error("gate scans use order-2 histograms");
    }
    double seconds = acquisition_seconds(stream);
    std::vector<GateScanPoint> out;
    for (picoseconds t_start : t_starts) {
        GateScanPoint point;
        point.gate = {t_start, t_stop};
        validate_gate(point.gate, stream.clock_period());
        TimeTagStream gated = apply_gate(stream, point.gate, offset);
        point.retained_tags = gated.count_detector_tags();
        if (point.retained_tags == 0) {
            throw data_error("gate [" + std::to_string(t_start) + ", " + std::to_string(t_stop) +
                             ") ps keeps no detector tags");
        }
        point.count_rate_cps = static_cast<double>(point.retained_tags) / seconds;
        point.g2 = g_zero(build_combined_histogram(gated, options));
        out.push_back(point);
    }
    return out;
}

}  // namespace photostat
