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

#ifndef PHOTOSTAT_ERRORS_H
#define PHOTOSTAT_ERRORS_H

#include <stdexcept>
#include <string>

namespace photostat {

/// Bad arguments or configuration. The CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be analyzed (malformed files, empty peaks, ...). Exit code 3.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root finding, fitting or inversion that failed to produce a usable number. Exit code 4.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace photostat

#endif
