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

#include <string>
#include <string_view>
#include <vector>

namespace qimcorr {

/// Shortest decimal form that round-trips a double exactly ('.' decimal
/// separator, locale independent).
std::string format_double(double v);

/// Strict double parse of the full string; throws ConfigError otherwise.
double parse_double(std::string_view s);

/// Strict nonnegative integer parse; throws ConfigError otherwise.
std::uint64_t parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace qimcorr
