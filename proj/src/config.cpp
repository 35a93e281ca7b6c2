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

#include "qimcorr/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qimcorr/errors.hpp"
#include "qimcorr/text.hpp"

namespace qimcorr {

const std::string* IniFile::Section::find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

const IniFile::Section* IniFile::find(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    Section* current = nullptr;
    std::istringstream stream(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(stream, raw)) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            }
            std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) {
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            }
            if (ini.find(name) != nullptr) {
                throw ConfigError("duplicate section [" + name + "]");
            }
            ini.sections.push_back({name, {}});
            current = &ini.sections.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        if (current == nullptr) {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        if (current->find(key) != nullptr) {
            throw ConfigError("[" + current->name + "] " + key + ": duplicate key");
        }
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

namespace {

/// Tracks which keys of a section were consumed; anything left over is an
/// unknown key, reported with its full path.
class SectionReader {
  public:
    SectionReader(const IniFile::Section& s) : section_(s) {}

    const std::string* get(const std::string& key) {
        consumed_.insert(key);
        return section_.find(key);
    }

    std::string require(const std::string& key) {
        const std::string* v = get(key);
        if (v == nullptr) {
            throw ConfigError("[" + section_.name + "] " + key + ": missing key");
        }
        return *v;
    }

    double require_double(const std::string& key) { return parse_number(key, require(key)); }

    double get_double(const std::string& key, double fallback) {
        const std::string* v = get(key);
        return v == nullptr ? fallback : parse_number(key, *v);
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) {
        const std::string* v = get(key);
        if (v == nullptr) {
            return fallback;
        }
        try {
            return parse_uint(*v);
        } catch (const ConfigError&) {
            throw ConfigError("[" + section_.name + "] " + key + ": " + *v +
                              " is not a nonnegative integer");
        }
    }

    std::string get_string(const std::string& key, std::string fallback) {
        const std::string* v = get(key);
        return v == nullptr ? fallback : *v;
    }

    void finish() const {
        for (const auto& [k, v] : section_.entries) {
            (void)v;
            if (consumed_.find(k) == consumed_.end()) {
                throw ConfigError("[" + section_.name + "] " + k + ": unknown key");
            }
        }
    }

  private:
    double parse_number(const std::string& key, const std::string& value) {
        try {
            return parse_double(value);
        } catch (const ConfigError&) {
            throw ConfigError("[" + section_.name + "] " + key + ": '" + value +
                              "' is not a number");
        }
    }

    const IniFile::Section& section_;
    std::set<std::string> consumed_;
};

MapCoord parse_coord_or_throw(const std::string& section, const std::string& key,
                              const std::string& value) {
    auto coord = parse_map_coord(value);
    if (!coord) {
        throw ConfigError("[" + section + "] " + key + ": unknown coordinate '" + value + "'");
    }
    return *coord;
}

GridSpec parse_grid_section(const IniFile::Section& section) {
    SectionReader r(section);
    GridSpec grid;
    grid.n_pixels = std::size_t(r.get_uint("n_pixels", 64));
    grid.pitch = r.get_double("pitch_um", 2.7);
    grid.window = std::size_t(r.get_uint("window_px", 7));
    r.finish();
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("[grid] " + std::string(e.what()));
    }
    return grid;
}

MapSpec parse_map_section(const IniFile::Section& section, const std::optional<GridSpec>& grid) {
    SectionReader r(section);
    MapSpec spec;
    auto read_axis = [&](const char* which) {
        ScanAxisSpec axis;
        std::string prefix(which);
        axis.coord = parse_coord_or_throw(section.name, prefix, r.require(prefix));
        axis.count = std::size_t(r.get_uint(prefix + "_count", 1));
        axis.pitch = r.get_double(prefix + "_pitch_um", 0.0);
        axis.center = r.get_double(prefix + "_center_um", 0.0);
        return axis;
    };
    spec.scan1 = read_axis("scan1");
    spec.scan2 = read_axis("scan2");
    spec.fixed1.coord = parse_coord_or_throw(section.name, "fixed1", r.require("fixed1"));
    spec.fixed1.value = r.get_double("fixed1_um", 0.0);
    spec.fixed2.coord = parse_coord_or_throw(section.name, "fixed2", r.require("fixed2"));
    spec.fixed2.value = r.get_double("fixed2_um", 0.0);

    std::string averaged = r.get_string("averaged", "lattice");
    if (averaged == "window") {
        spec.averaging = AveragingMode::DetectorWindow;
        if (!grid) {
            throw ConfigError("[map] averaged=window needs a [grid] section");
        }
        spec.window = grid->window;
        spec.window_pitch = grid->pitch;
    } else if (averaged == "lattice") {
        spec.averaging = AveragingMode::Lattice;
        spec.avg_count = std::size_t(r.get_uint("avg_count", 1));
        spec.avg_pitch = r.get_double("avg_pitch_um", 0.0);
    } else {
        throw ConfigError("[map] averaged: expected 'window' or 'lattice'");
    }

    // optional explicit list, must name the complement of scan and fixed
    if (const std::string* listed = r.get("averaged_coords")) {
        std::set<MapCoord> expect;
        for (int c = 0; c < 8; ++c) {
            expect.insert(MapCoord(c));
        }
        for (MapCoord c :
             {spec.scan1.coord, spec.scan2.coord, spec.fixed1.coord, spec.fixed2.coord}) {
            expect.erase(c);
        }
        std::set<MapCoord> got;
        for (const std::string& name : split(*listed, ',')) {
            got.insert(parse_coord_or_throw(section.name, "averaged_coords", name));
        }
        if (got != expect) {
            throw ConfigError(
                "[map] averaged_coords: scan, fixed and averaged coordinates must partition "
                "the eight geometry coordinates");
        }
    }

    std::string norm = r.get_string("normalization", "raw");
    if (norm == "max") {
        spec.normalize_max = true;
    } else if (norm != "raw") {
        throw ConfigError("[map] normalization: expected 'raw' or 'max'");
    }
    r.finish();
    spec.validate();
    return spec;
}

StochasticConfig parse_stochastic_section(const IniFile::Section& section) {
    SectionReader r(section);
    StochasticConfig cfg;
    cfg.shots = r.get_uint("shots", cfg.shots);
    cfg.batches = std::size_t(r.get_uint("batches", cfg.batches));
    cfg.gain_peak = r.get_double("gain_peak", cfg.gain_peak);
    cfg.min_shots = r.get_uint("min_shots", cfg.min_shots);
    std::string checkpoint = r.get_string("checkpoint", "auto");
    if (checkpoint == "auto") {
        cfg.checkpoint = true;
    } else if (checkpoint == "off") {
        cfg.checkpoint = false;
    } else {
        throw ConfigError("[stochastic] checkpoint: expected 'auto' or 'off'");
    }
    r.finish();
    if (cfg.shots == 0) {
        throw ConfigError("[stochastic] shots: must be positive");
    }
    if (cfg.batches < 2) {
        throw ConfigError("[stochastic] batches: need at least 2 for error bars");
    }
    if (!(cfg.gain_peak >= 0.0)) {
        throw ConfigError("[stochastic] gain_peak: must be nonnegative");
    }
    return cfg;
}

SwapConfig parse_swap_section(const IniFile::Section& section) {
    SectionReader r(section);
    SwapConfig cfg;
    cfg.a = r.require_double("a_um");
    cfg.l = r.require_double("l_um");
    cfg.delta = r.require_double("delta_um");
    cfg.y_extent = r.require_double("y_um");
    cfg.epsilon = r.get_double("epsilon_rad", cfg.epsilon);
    cfg.order_cut = int(r.get_uint("order_cut", std::uint64_t(cfg.order_cut)));
    std::string thetas = r.get_string("theta_list_rad", "0,2.0943951023931953,4.1887902047863905");
    for (const std::string& t : split(thetas, ',')) {
        cfg.thetas.push_back(parse_double(t));
    }
    r.finish();
    if (cfg.thetas.size() < 3) {
        throw ConfigError("[swap] theta_list_rad: need at least three settings");
    }
    return cfg;
}

std::uint64_t parse_run_seed(const IniFile::Section& section) {
    SectionReader r(section);
    std::uint64_t seed = r.get_uint("seed", 1);
    r.finish();
    return seed;
}

}  // namespace

SourceParams parse_source_section(const IniFile::Section& section) {
    SectionReader r(section);
    SourceParams p;
    p.w0 = r.require_double("w0_um");
    p.b = r.require_double("b_inv_um");
    p.k = r.require_double("k_inv_um");
    p.z = r.require_double("z_um");
    p.z_prime = r.require_double("zprime_um");
    r.finish();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("[source] " + std::string(e.what()));
    }
    return p;
}

IniFile::Section source_section(const SourceParams& p) {
    IniFile::Section s;
    s.name = "source";
    s.entries = {{"w0_um", format_double(p.w0)},
                 {"b_inv_um", format_double(p.b)},
                 {"k_inv_um", format_double(p.k)},
                 {"z_um", format_double(p.z)},
                 {"zprime_um", format_double(p.z_prime)}};
    return s;
}

RunConfig parse_run_config(const IniFile& ini, ConfigProfile profile) {
    std::set<std::string> allowed = {"source", "run"};
    switch (profile) {
        case ConfigProfile::AnalyticMap:
            allowed.insert("map");
            allowed.insert("grid");
            break;
        case ConfigProfile::StochasticRun:
            allowed.insert("map");
            allowed.insert("grid");
            allowed.insert("stochastic");
            break;
        case ConfigProfile::SwapDemo:
            allowed.insert("swap");
            break;
    }
    for (const auto& s : ini.sections) {
        if (allowed.find(s.name) == allowed.end()) {
            throw ConfigError("[" + s.name + "]: unknown section for this subcommand");
        }
    }

    RunConfig cfg;
    cfg.raw = ini;
    const IniFile::Section* source = ini.find("source");
    if (source == nullptr) {
        throw ConfigError("[source]: missing section");
    }
    cfg.source = parse_source_section(*source);
    if (const auto* s = ini.find("grid")) {
        cfg.grid = parse_grid_section(*s);
    }
    if (const auto* s = ini.find("map")) {
        cfg.map = parse_map_section(*s, cfg.grid);
    }
    if (const auto* s = ini.find("stochastic")) {
        cfg.stochastic = parse_stochastic_section(*s);
    }
    if (const auto* s = ini.find("swap")) {
        cfg.swap = parse_swap_section(*s);
    }
    if (const auto* s = ini.find("run")) {
        cfg.seed = parse_run_seed(*s);
    }

    switch (profile) {
        case ConfigProfile::AnalyticMap:
            cfg.map_or_throw();
            break;
        case ConfigProfile::StochasticRun:
            cfg.grid_or_throw();
            cfg.map_or_throw();
            cfg.stochastic_or_throw();
            break;
        case ConfigProfile::SwapDemo:
            cfg.swap_or_throw();
            break;
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, ConfigProfile profile) {
    return parse_run_config(IniFile::load(path), profile);
}

std::string RunConfig::canonical_text() const {
    std::vector<std::string> lines;
    for (const auto& s : raw.sections) {
        for (const auto& [k, v] : s.entries) {
            lines.push_back(s.name + "." + k + "=" + v);
        }
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

const GridSpec& RunConfig::grid_or_throw() const {
    if (!grid) {
        throw ConfigError("[grid]: missing section");
    }
    return *grid;
}

const MapSpec& RunConfig::map_or_throw() const {
    if (!map) {
        throw ConfigError("[map]: missing section");
    }
    return *map;
}

const StochasticConfig& RunConfig::stochastic_or_throw() const {
    if (!stochastic) {
        throw ConfigError("[stochastic]: missing section");
    }
    return *stochastic;
}

const SwapConfig& RunConfig::swap_or_throw() const {
    if (!swap) {
        throw ConfigError("[swap]: missing section");
    }
    return *swap;
}

}  // namespace qimcorr
