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

#ifndef PHOTOSTAT_SELFTEST_H
#define PHOTOSTAT_SELFTEST_H

#include <string>
#include <vector>

#include "photostat/correlator.h"

namespace photostat {

/// Brute-force histogram over every m-tuple of tags, for cross-checking
/// build_histogram on small streams. O(N^m).
CorrelationHistogram naive_histogram(const TimeTagStream &stream, const HistogramOptions &options);

struct SelfTestResult {
    std::string name;
    bool passed;
    std::string detail;
};

/// Oracle equivalence on random streams, reference-source statistics,
/// thread independence and file round trip.
std::vector<SelfTestResult> run_selftest(unsigned threads = 0);

}  // namespace photostat

#endif
