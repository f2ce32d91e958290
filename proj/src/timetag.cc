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

#include "photostat/timetag.h"

#include <algorithm>
#include <string>

#include "photostat/errors.h"
#include "photostat/rng.h"

namespace photostat {

std::optional<size_t> first_order_violation(std::span<const TimeTag> tags) {
    for (size_t k = 0; k < tags.size(); k++) {
        if (tags[k].time < 0) {
            return k;
        }
        if (k > 0 && tag_before(tags[k], tags[k - 1])) {
            return k;
        }
    }
    return std::nullopt;
}

TimeTagStream::TimeTagStream(std::vector<TimeTag> tags, picoseconds clock_period, uint16_t n_channels)
    : tags_(std::move(tags)), clock_period_(clock_period), n_channels_(n_channels) {
    if (clock_period_ <= 0) {
        throw validation_error("clock_period must be positive, got " + std::to_string(clock_period_));
    }
    if (auto bad = first_order_violation(tags_)) {
        throw validation_error("non-monotone at record " + std::to_string(*bad));
    }
}

TimeTagStream TimeTagStream::from_unsorted(std::vector<TimeTag> tags, picoseconds clock_period, uint16_t n_channels) {
    std::sort(tags.begin(), tags.end(), tag_before);
    return TimeTagStream(std::move(tags), clock_period, n_channels);
}

size_t TimeTagStream::count_channel(uint8_t channel) const {
    return std::count_if(tags_.begin(), tags_.end(), [&](const TimeTag &t) {
        return t.channel == channel;
    });
}

size_t TimeTagStream::count_detector_tags() const {
    return tags_.size() - count_channel(kClockChannel);
}

std::vector<picoseconds> TimeTagStream::channel_times(uint8_t channel) const {
    std::vector<picoseconds> out;
    for (const auto &t : tags_) {
        if (t.channel == channel) {
            out.push_back(t.time);
        }
    }
    return out;
}

std::vector<uint8_t> TimeTagStream::detector_channels() const {
    bool seen[256] = {};
    for (const auto &t : tags_) {
        seen[t.channel] = true;
    }
    std::vector<uint8_t> out;
    for (int c = 1; c < 256; c++) {
        if (seen[c]) {
            out.push_back(static_cast<uint8_t>(c));
        }
    }
    return out;
}

void validate_gate(const GateWindow &gate, picoseconds clock_period) {
    if (gate.t_start < 0 || gate.t_start >= gate.t_stop || gate.t_stop > clock_period) {
        throw validation_error(
            "invalid gate [" + std::to_string(gate.t_start) + ", " + std::to_string(gate.t_stop) +
            ") ps: need 0 <= t_start < t_stop <= clock_period (" + std::to_string(clock_period) + ")");
    }
}

TimeTagStream apply_gate(const TimeTagStream &stream, const GateWindow &gate, picoseconds offset) {
    picoseconds period = stream.clock_period();
    validate_gate(gate, period);
    std::vector<TimeTag> kept;
    kept.reserve(stream.size());
    for (const auto &t : stream.tags()) {
        if (t.channel == kClockChannel) {
            kept.push_back(t);
            continue;
        }
        picoseconds phase = (t.time - offset) % period;
        if (phase < 0) {
            phase += period;
        }
        if (phase >= gate.t_start && phase < gate.t_stop) {
            kept.push_back(t);
        }
    }
    return TimeTagStream(std::move(kept), period, stream.n_channels());
}

TimeTagStream thin(const TimeTagStream &stream, double eta, uint64_t seed) {
    if (!(eta >= 0 && eta <= 1)) {
        throw validation_error("thinning probability must be in [0, 1]");
    }
    std::vector<TimeTag> kept;
    kept.reserve(stream.size());
    auto tags = stream.tags();
    for (size_t k = 0; k < tags.size(); k++) {
        if (tags[k].channel == kClockChannel || CounterRng(seed, RngPurpose::thinning, k).uniform() < eta) {
            kept.push_back(tags[k]);
        }
    }
    return TimeTagStream(std::move(kept), stream.clock_period(), stream.n_channels());
}

TimeTagStream merge(std::span<const TimeTagStream> streams) {
    if (streams.empty()) {
        return TimeTagStream();
    }
    picoseconds period = streams.front().clock_period();
    uint16_t n_channels = 0;
    std::vector<TimeTag> all;
    for (const auto &s : streams) {
        if (s.clock_period() != period) {
            throw validation_error("cannot merge streams with different clock periods");
        }
        n_channels = std::max(n_channels, s.n_channels());
        auto middle = all.size();
        all.insert(all.end(), s.tags().begin(), s.tags().end());
        std::inplace_merge(all.begin(), all.begin() + middle, all.end(), tag_before);
    }
    return TimeTagStream(std::move(all), period, n_channels);
}

TimeTagStream delay_channel(const TimeTagStream &stream, uint8_t channel, picoseconds delay) {
    std::vector<TimeTag> out;
    out.reserve(stream.size());
    for (auto t : stream.tags()) {
        if (t.channel == channel) {
            t.time += delay;
            if (t.time < 0) {
                continue;
            }
        }
        out.push_back(t);
    }
    return TimeTagStream::from_unsorted(std::move(out), stream.clock_period(), stream.n_channels());
}

}  // namespace photostat
