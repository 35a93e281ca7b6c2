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
#include <optional>
#include <string>
#include <vector>

#include "qimcorr/biphoton.hpp"
#include "qimcorr/correlator.hpp"
#include "qimcorr/stochastic.hpp"

namespace qimcorr {

/// Flat INI-style file: [section] headers, key = value lines, '#' or ';'
/// comments. Section and key order is preserved for config echoing.
struct IniFile {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;

        const std::string* find(const std::string& key) const;
    };
    std::vector<Section> sections;

    static IniFile parse(const std::string& text);
    static IniFile load(const std::filesystem::path& path);

    const Section* find(const std::string& name) const;
};

/// Swap-demo parameters (Alice separation, Bob windows, SLM settings).
struct SwapConfig {
    double a = 0.0;
    double l = 0.0;
    double delta = 0.0;
    double y_extent = 0.0;
    double epsilon = 0.5;
    std::vector<double> thetas;
    int order_cut = 8;
};

/// Stochastic-run parameters.
struct StochasticConfig {
    std::uint64_t shots = 50000;
    std::size_t batches = 25;
    double gain_peak = 0.6;
    std::uint64_t min_shots = 1000;  // below this the output is flagged
    bool checkpoint = true;
};

/// A parsed and validated run configuration. Sections that a subcommand does
/// not use may be absent; accessors throw ConfigError when a required
/// section is missing. Unknown sections or keys are rejected at parse time.
struct RunConfig {
    SourceParams source;
    std::optional<GridSpec> grid;
    std::optional<MapSpec> map;
    std::optional<StochasticConfig> stochastic;
    std::optional<SwapConfig> swap;
    std::uint64_t seed = 1;

    IniFile raw;  ///< for config echo and hashing

    /// Canonical text of the resolved config (sorted, normalized); hashing
    /// this ties checkpoints to their configuration.
    std::string canonical_text() const;

    const GridSpec& grid_or_throw() const;
    const MapSpec& map_or_throw() const;
    const StochasticConfig& stochastic_or_throw() const;
    const SwapConfig& swap_or_throw() const;
};

/// Which sections a subcommand accepts; anything else in the file is an
/// error with its key path.
enum class ConfigProfile { AnalyticMap, StochasticRun, SwapDemo };

RunConfig parse_run_config(const IniFile& ini, ConfigProfile profile);
RunConfig load_run_config(const std::filesystem::path& path, ConfigProfile profile);

/// Round-trip helpers for the [source] section.
IniFile::Section source_section(const SourceParams& p);
SourceParams parse_source_section(const IniFile::Section& section);

}  // namespace qimcorr
