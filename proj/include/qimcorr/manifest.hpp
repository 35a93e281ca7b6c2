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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qimcorr/config.hpp"

namespace qimcorr {

inline constexpr const char* kToolName = "qimcorr";
inline constexpr const char* kToolVersion = "0.1.0";

/// Written atomically next to the run outputs after a successful run; lists
/// every produced file with its checksum.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double wall_seconds = 0.0;
    std::string started_utc;
    std::vector<std::filesystem::path> outputs;  ///< relative to the manifest
    std::map<std::string, std::string> extra;    ///< estimator version, shots, ...
};

/// Serialize to <out_dir>/manifest.json (write-then-rename). File checksums
/// are FNV-1a of the file bytes.
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest,
                    const IniFile& config_echo);

}  // namespace qimcorr
