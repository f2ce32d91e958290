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

#ifndef PHOTOSTAT_PARALLEL_H
#define PHOTOSTAT_PARALLEL_H

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace photostat {

/// 0 means "one per hardware thread".
inline unsigned resolve_threads(unsigned threads) {
    return threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
}

/// Splits [0, n) into `n_chunks` contiguous ranges and calls fn(chunk, begin, end)
/// for each, one thread per chunk. Chunk boundaries depend only on (n, n_chunks).
/// The first exception thrown by any chunk is rethrown.
template <typename Fn>
void for_each_chunk(size_t n, size_t n_chunks, Fn &&fn) {
    n_chunks = std::max<size_t>(1, std::min(n_chunks, std::max<size_t>(n, 1)));
    auto bounds = [&](size_t c) {
        return n * c / n_chunks;
    };
    if (n_chunks == 1) {
        fn(size_t{0}, size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(n_chunks);
    std::vector<std::thread> workers;
    workers.reserve(n_chunks);
    for (size_t c = 0; c < n_chunks; c++) {
        workers.emplace_back([&, c] {
            try {
                fn(c, bounds(c), bounds(c + 1));
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto &w : workers) {
        w.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace photostat

#endif
