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

#ifndef PHOTOSTAT_DISTRIBUTION_H
#define PHOTOSTAT_DISTRIBUTION_H

#include <array>
#include <optional>

namespace photostat {

/// Photon numbers 0..4 are tracked; anything above is folded into p[4].
constexpr int kMaxPhotonNumber = 4;

enum class DistributionLevel { detected, source };

struct PhotonNumberDist {
    std::array<double, kMaxPhotonNumber + 1> p{};
    DistributionLevel level = DistributionLevel::source;
    /// Transmission used to map between levels, when one was applied.
    std::optional<double> eta_applied;
    /// Set when counts above kMaxPhotonNumber were folded into p[4].
    bool truncated = false;

    double non_vacuum() const {
        return p[1] + p[2] + p[3] + p[4];
    }
    double mean() const {
        return p[1] + 2 * p[2] + 3 * p[3] + 4 * p[4];
    }
};

}  // namespace photostat

#endif
