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

#ifndef PHOTOSTAT_GATING_H
#define PHOTOSTAT_GATING_H

#include <span>
#include <vector>

#include "photostat/correlator.h"
#include "photostat/timetag.h"

namespace photostat {

struct GateScanPoint {
    GateWindow gate;
    size_t retained_tags = 0;
    /// Retained detector tags per second of acquisition (clock tags x period).
    double count_rate_cps = 0;
    GEstimate g2;
};

/// Applies each gate [t_start, t_stop) and estimates g2(0) from the merged
/// order-2 histogram over all detector pairs (or options.channels).
/// Throws data_error when a gate keeps no detector tags.
std::vector<GateScanPoint> gated_g2_scan(const TimeTagStream &stream, std::span<const picoseconds> t_starts,
                                         picoseconds t_stop, const HistogramOptions &options, picoseconds offset = 0);

/// Seconds covered by the stream: number of clock tags times the clock period.
double acquisition_seconds(const TimeTagStream &stream);

}  // namespace photostat

#endif
