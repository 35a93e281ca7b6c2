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

#include "qimcorr/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qimcorr/errors.hpp"
#include "qimcorr/text.hpp"

namespace qimcorr {

namespace {

void write_axis_line(std::ostream& out, const char* tag, const GridAxis& axis) {
    out << "# " << tag << ": name=" << axis.name << " count=" << axis.count
        << " pitch=" << format_double(axis.pitch) << " center=" << format_double(axis.center)
        << "\n";
}

GridAxis parse_axis_line(const std::string& rest) {
    GridAxis axis;
    for (const std::string& field : split(rest, ' ')) {
        if (field.empty()) {
            continue;
        }
        auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("bad axis field: " + field);
        }
        std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "name") {
            axis.name = value;
        } else if (key == "count") {
            axis.count = std::size_t(parse_uint(value));
        } else if (key == "pitch") {
            axis.pitch = parse_double(value);
        } else if (key == "center") {
            axis.center = parse_double(value);
        } else {
            throw ConfigError("unknown axis field: " + key);
        }
    }
    return axis;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const CorrelationGrid& grid) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write grid: " + path.string());
    }
    out << "# qimcorr-grid v1\n";
    write_axis_line(out, "axis1", grid.axis1);
    write_axis_line(out, "axis2", grid.axis2);
    for (const auto& [key, value] : grid.metadata) {
        out << "# meta: " << key << "=" << value << "\n";
    }
    bool with_sigma = !grid.sigma.empty();
    out << "# columns: " << grid.axis1.name << "," << grid.axis2.name << ",value"
        << (with_sigma ? ",sigma" : "") << "\n";
    for (std::size_t i1 = 0; i1 < grid.axis1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.count; ++i2) {
            std::size_t idx = grid.index(i1, i2);
            out << format_double(grid.axis1.value(i1)) << ","
                << format_double(grid.axis2.value(i2)) << "," << format_double(grid.values[idx]);
            if (with_sigma) {
                out << "," << format_double(grid.sigma[idx]);
            }
            out << "\n";
        }
    }
    if (!out) {
        throw ConfigError("grid write failed: " + path.string());
    }
}

CorrelationGrid read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read grid: " + path.string());
    }
    CorrelationGrid grid;
    std::string line;
    std::vector<double> values, sigmas;
    bool saw_sigma = false;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            std::string_view rest = trim(view.substr(1));
            if (rest.rfind("axis1:", 0) == 0) {
                grid.axis1 = parse_axis_line(std::string(trim(rest.substr(6))));
            } else if (rest.rfind("axis2:", 0) == 0) {
                grid.axis2 = parse_axis_line(std::string(trim(rest.substr(6))));
            } else if (rest.rfind("meta:", 0) == 0) {
                std::string_view kv = trim(rest.substr(5));
                auto eq = kv.find('=');
                if (eq != std::string_view::npos) {
                    grid.metadata[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
                }
            }
            continue;
        }
        auto fields = split(view, ',');
        if (fields.size() != 3 && fields.size() != 4) {
            throw ConfigError("bad grid row: " + std::string(view));
        }
        values.push_back(parse_double(fields[2]));
        if (fields.size() == 4) {
            saw_sigma = true;
            sigmas.push_back(parse_double(fields[3]));
        }
    }
    if (grid.axis1.count * grid.axis2.count != values.size()) {
        throw ConfigError("grid row count does not match axes: " + path.string());
    }
    grid.values = std::move(values);
    if (saw_sigma) {
        if (sigmas.size() != grid.values.size()) {
            throw ConfigError("grid sigma column incomplete: " + path.string());
        }
        grid.sigma = std::move(sigmas);
    }
    return grid;
}

void write_grid_pgm(const std::filesystem::path& path, const CorrelationGrid& grid) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write graymap: " + path.string());
    }
    double peak = 0.0;
    for (double v : grid.values) {
        peak = std::max(peak, v);
    }
    out << "P5\n" << grid.axis2.count << " " << grid.axis1.count << "\n255\n";
    for (std::size_t i1 = 0; i1 < grid.axis1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.count; ++i2) {
            double v = grid.at(i1, i2);
            double scaled = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) : 0.0;
            out.put(char(std::lround(scaled * 255.0)));
        }
    }
    if (!out) {
        throw ConfigError("graymap write failed: " + path.string());
    }
}

}  // namespace qimcorr
