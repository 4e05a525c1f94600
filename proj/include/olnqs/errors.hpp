// Copyright 2026 The OLNQS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace olnqs {

/// Raised when a computation produces non-finite values or hits a numeric
/// singularity (e.g. an exact zero of cosh in the ansatz).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by the experiment-configuration parser; the message names the
/// offending file, line and key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace olnqs
