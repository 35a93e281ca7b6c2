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

#include <filesystem>

#include "qimcorr/correlator.hpp"

namespace qimcorr {

/// Comma-separated grid dump: '#'-prefixed header lines carry the axes and
/// metadata, then one row per cell (axis1, axis2, value[, sigma]). Values
/// round-trip exactly.
void write_grid_csv(const std::filesystem::path& path, const CorrelationGrid& grid);
CorrelationGrid read_grid_csv(const std::filesystem::path& path);

/// 8-bit binary portable graymap, row-major, max-normalized; negative cells
/// render as black.
void write_grid_pgm(const std::filesystem::path& path, const CorrelationGrid& grid);

}  // namespace qimcorr
