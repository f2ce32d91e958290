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

#include "photostat/tag_file.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "photostat/errors.h"

namespace photostat {

namespace {

void put_le(std::vector<uint8_t> &out, uint64_t value, int n_bytes) {
    for (int k = 0; k < n_bytes; k++) {
        out.push_back(static_cast<uint8_t>(value >> (8 * k)));
    }
}

uint64_t get_le(std::span<const uint8_t> bytes, size_t offset, int n_bytes) {
    uint64_t value = 0;
    for (int k = 0; k < n_bytes; k++) {
        value |= static_cast<uint64_t>(bytes[offset + k]) << (8 * k);
    }
    return value;
}

}  // namespace

std::vector<uint8_t> encode_stream(const TimeTagStream &stream) {
    std::vector<uint8_t> out;
    out.reserve(kTagFileHeaderSize + kTagFileRecordSize * stream.size());
    for (char c : std::string_view("PTAG")) {
        out.push_back(static_cast<uint8_t>(c));
    }
    put_le(out, kTagFileVersion, 2);
    put_le(out, stream.n_channels(), 2);
    put_le(out, static_cast<uint64_t>(stream.clock_period()), 8);
    put_le(out, stream.size(), 8);
    put_le(out, 0, 8);
    for (const auto &t : stream.tags()) {
        put_le(out, static_cast<uint64_t>(t.time), 8);
        put_le(out, t.channel, 2);
        put_le(out, 0, 6);
    }
    return out;
}

TimeTagStream decode_stream(std::span<const uint8_t> bytes) {
    if (bytes.size() < kTagFileHeaderSize || std::memcmp(bytes.data(), "PTAG", 4) != 0) {
        throw data_error("malformed header: missing PTAG magic");
    }
    auto version = get_le(bytes, 4, 2);
    if (version != kTagFileVersion) {
        throw data_error("malformed header: unsupported format version " + std::to_string(version));
    }
    auto n_channels = static_cast<uint16_t>(get_le(bytes, 6, 2));
    auto clock_period = get_le(bytes, 8, 8);
    auto record_count = get_le(bytes, 16, 8);
    if (clock_period == 0 || clock_period > static_cast<uint64_t>(std::numeric_limits<picoseconds>::max())) {
        throw data_error("malformed header: invalid clock period " + std::to_string(clock_period));
    }
    size_t body = bytes.size() - kTagFileHeaderSize;
    if (body % kTagFileRecordSize != 0 || body / kTagFileRecordSize < record_count) {
        throw data_error(
            "truncated record " + std::to_string(body / kTagFileRecordSize) + ": header declares " +
            std::to_string(record_count) + " records");
    }
    if (body / kTagFileRecordSize > record_count) {
        throw data_error("malformed file: trailing data after " + std::to_string(record_count) + " records");
    }

    std::vector<TimeTag> tags;
    tags.reserve(record_count);
    for (uint64_t k = 0; k < record_count; k++) {
        size_t at = kTagFileHeaderSize + k * kTagFileRecordSize;
        auto time = get_le(bytes, at, 8);
        auto channel = get_le(bytes, at + 8, 2);
        if (time > static_cast<uint64_t>(std::numeric_limits<picoseconds>::max())) {
            throw data_error("record " + std::to_string(k) + ": time out of range");
        }
        if (channel > 255) {
            throw data_error("record " + std::to_string(k) + ": channel " + std::to_string(channel) + " out of range");
        }
        TimeTag tag{static_cast<picoseconds>(time), static_cast<uint8_t>(channel)};
        if (!tags.empty() && tag_before(tag, tags.back())) {
            throw data_error("non-monotone at record " + std::to_string(k));
        }
        tags.push_back(tag);
    }
    return TimeTagStream(std::move(tags), static_cast<picoseconds>(clock_period), n_channels);
}

TimeTagStream read_stream(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("cannot open tag file " + path.string());
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_stream(bytes);
}

void write_stream(const TimeTagStream &stream, const std::filesystem::path &path) {
    auto bytes = encode_stream(stream);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw data_error("failed writing tag file " + path.string());
    }
}

void write_stream_csv(const TimeTagStream &stream, std::ostream &out) {
    out << "time_ps,channel\n";
    for (const auto &t : stream.tags()) {
        out << t.time << ',' << static_cast<int>(t.channel) << '\n';
    }
}

}  // namespace photostat
