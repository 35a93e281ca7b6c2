// Copyright 2026 The qimcorr Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qimcorr {

/// Invalid or inconsistent configuration (bad key, bad partition, bad file).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric cost guard was exceeded (permanent order, correlator order).
struct NumericGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Not enough accumulated statistics to form an estimate.
struct InsufficientStatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qimcorr
