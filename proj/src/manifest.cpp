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

#include "qimcorr/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qimcorr/errors.hpp"
#include "qimcorr/hash.hpp"

namespace qimcorr {

namespace {

std::uint64_t file_fnv1a64(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("manifest: cannot hash missing output " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string bytes = buffer.str();
    return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest,
                    const IniFile& config_echo) {
    nlohmann::ordered_json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = manifest.command;
    doc["seed"] = manifest.seed;
    doc["workers"] = manifest.workers;
    doc["timing"] = {{"wall_seconds", manifest.wall_seconds},
                     {"started_utc", manifest.started_utc}};

    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& section : config_echo.sections) {
        nlohmann::ordered_json block = nlohmann::ordered_json::object();
        for (const auto& [k, v] : section.entries) {
            block[k] = v;
        }
        config[section.name] = block;
    }
    doc["config"] = config;

    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    for (const auto& rel : manifest.outputs) {
        std::filesystem::path full = out_dir / rel;
        outputs.push_back({{"path", rel.generic_string()},
                           {"bytes", std::filesystem::file_size(full)},
                           {"fnv1a64", to_hex(file_fnv1a64(full))}});
    }
    doc["outputs"] = outputs;

    for (const auto& [k, v] : manifest.extra) {
        doc["extra"][k] = v;
    }

    std::filesystem::path tmp = out_dir / "manifest.json.tmp";
    std::filesystem::path final_path = out_dir / "manifest.json";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("manifest: cannot write " + tmp.string());
        }
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, final_path);
}

}  // namespace qimcorr
