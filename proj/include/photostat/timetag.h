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

#ifndef PHOTOSTAT_TIMETAG_H
#define PHOTOSTAT_TIMETAG_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace photostat {

using picoseconds = int64_t;

/// 80 MHz repetition clock.
constexpr picoseconds kDefaultClockPeriod = 12500;
constexpr uint8_t kClockChannel = 0;

struct TimeTag {
    picoseconds time;
    uint8_t channel;

    bool operator==(const TimeTag &) const = default;
};

/// Stream ordering: by time, ties by ascending channel.
constexpr bool tag_before(const TimeTag &a, const TimeTag &b) {
    return a.time < b.time || (a.time == b.time && a.channel < b.channel);
}

/// Index of the first record that breaks the stream ordering (or is negative),
/// or nullopt if the sequence is a valid stream body.
std::optional<size_t> first_order_violation(std::span<const TimeTag> tags);

/// Immutable sorted sequence of detection records plus clock metadata.
class TimeTagStream {
  public:
    TimeTagStream() = default;

    /// Throws validation_error if `tags` is not sorted or clock_period <= 0.
    TimeTagStream(std::vector<TimeTag> tags, picoseconds clock_period, uint16_t n_channels);

    /// Sorts `tags` first.
    static TimeTagStream from_unsorted(std::vector<TimeTag> tags, picoseconds clock_period, uint16_t n_channels);

    std::span<const TimeTag> tags() const {
        return tags_;
    }
    size_t size() const {
        return tags_.size();
    }
    bool empty() const {
        return tags_.empty();
    }
    picoseconds clock_period() const {
        return clock_period_;
    }
    uint16_t n_channels() const {
        return n_channels_;
    }

    size_t count_channel(uint8_t channel) const;
    size_t count_detector_tags() const;

    /// Sorted arrival times of one channel.
    std::vector<picoseconds> channel_times(uint8_t channel) const;

    /// Distinct non-clock channels present, ascending.
    std::vector<uint8_t> detector_channels() const;

    bool operator==(const TimeTagStream &) const = default;

  private:
    std::vector<TimeTag> tags_;
    picoseconds clock_period_ = kDefaultClockPeriod;
    uint16_t n_channels_ = 0;
};

/// Acceptance window relative to the clock edge. Phases are taken modulo the clock period.
struct GateWindow {
    picoseconds t_start = 0;
    /// The clock signal delayed by 12.4 ns.
    picoseconds t_stop = 12400;

    bool operator==(const GateWindow &) const = default;
};

/// Throws validation_error unless 0 <= t_start < t_stop <= clock_period.
void validate_gate(const GateWindow &gate, picoseconds clock_period);

/// Keeps clock tags and detector tags whose phase ((time - offset) mod period) lies in [t_start, t_stop).
TimeTagStream apply_gate(const TimeTagStream &stream, const GateWindow &gate, picoseconds offset = 0);

/// Binomial thinning of detector tags: each survives with probability eta.
/// Survival of record i depends only on (seed, i), so the draw is reproducible.
TimeTagStream thin(const TimeTagStream &stream, double eta, uint64_t seed);

/// Merge streams sharing a clock period into one sorted stream.
TimeTagStream merge(std::span<const TimeTagStream> streams);

/// Adds `delay` to every tag on `channel` (cable/clock alignment) and restores ordering.
/// Tags pushed below zero are dropped.
TimeTagStream delay_channel(const TimeTagStream &stream, uint8_t channel, picoseconds delay);

}  // namespace photostat

#endif
