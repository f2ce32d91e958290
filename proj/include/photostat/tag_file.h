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

#ifndef PHOTOSTAT_TAG_FILE_H
#define PHOTOSTAT_TAG_FILE_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "photostat/timetag.h"

namespace photostat {

// Binary tag file, little-endian.
//   header (32 bytes): "PTAG", u16 version, u16 n_channels, u64 clock_period_ps,
//                      u64 record_count, 8 reserved bytes
//   record (16 bytes): u64 time_ps, u16 channel, 6 zero bytes
constexpr uint16_t kTagFileVersion = 1;
constexpr size_t kTagFileHeaderSize = 32;
constexpr size_t kTagFileRecordSize = 16;

std::vector<uint8_t> encode_stream(const TimeTagStream &stream);

/// Throws data_error on a malformed header, truncated record, out-of-range
/// channel or non-monotone timestamps (the message names the record index).
TimeTagStream decode_stream(std::span<const uint8_t> bytes);

TimeTagStream read_stream(const std::filesystem::path &path);
void write_stream(const TimeTagStream &stream, const std::filesystem::path &path);

/// Columns time_ps,channel with a header line.
void write_stream_csv(const TimeTagStream &stream, std::ostream &out);

}  // namespace photostat

#endif
