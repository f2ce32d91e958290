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

#ifndef PHOTOSTAT_RNG_H
#define PHOTOSTAT_RNG_H

#include <cmath>
#include <cstdint>
#include <limits>

namespace photostat {

/// Stafford's "Mix13" finalizer, as used by SplitMix64.
constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Identifies independent consumers of one seed so their streams never coincide.
enum class RngPurpose : uint64_t {
    emission = 1,
    detection = 2,
    background = 3,
    reference_source = 4,
    thinning = 5,
    test = 99,
};

/// Counter-based generator: the k-th output is a pure function of (key, k).
///
/// The key is derived from (seed, purpose, index), so a simulation can give
/// each pulse its own substream and process pulses in any order or on any
/// thread while producing identical results. Satisfies
/// UniformRandomBitGenerator, so it can drive the <random> distributions.
class CounterRng {
  public:
    using result_type = uint64_t;

    CounterRng(uint64_t seed, RngPurpose purpose, uint64_t index)
        : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(static_cast<uint64_t>(purpose) + 0x3c6ef372fe94f82bULL) ^
                     (index * 0x9e3779b97f4a7c15ULL))) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double mean) {
        return -mean * std::log(uniform());
    }

    /// Standard normal deviate (Box-Muller, cosine branch only; no hidden state).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace photostat

#endif
