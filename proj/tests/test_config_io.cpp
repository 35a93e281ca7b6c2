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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "qimcorr/config.hpp"
#include "qimcorr/errors.hpp"
#include "qimcorr/grid_io.hpp"
#include "qimcorr/run.hpp"

using namespace qimcorr;

namespace {

const char* kMapConfig = R"(# sample configuration
[source]
w0_um = 200
b_inv_um = 0.55
k_inv_um = 15.125
z_um = 100
zprime_um = 100

[grid]
n_pixels = 64
pitch_um = 2.7
window_px = 7

[map]
scan1 = alice_dx
scan1_count = 7
scan1_pitch_um = 2.7
scan2 = bob_dx
scan2_count = 7
scan2_pitch_um = 2.7
fixed1 = alice_dy
fixed1_um = 2.7
fixed2 = bob_dy
fixed2_um = 2.7
averaged = window

[run]
seed = 42
)";

}  // namespace

TEST_CASE("ini parsing") {
    IniFile ini = IniFile::parse("[a]\nx = 1\n; comment\n# comment\ny=2\n[b]\nz = hello world\n");
    CHECK(ini.sections.size() == 2);
    CHECK(*ini.find("a")->find("x") == "1");
    CHECK(*ini.find("a")->find("y") == "2");
    CHECK(*ini.find("b")->find("z") == "hello world");

    CHECK_THROWS_AS(IniFile::parse("x = 1\n"), ConfigError);          // key outside section
    CHECK_THROWS_AS(IniFile::parse("[a]\nx\n"), ConfigError);         // no equals
    CHECK_THROWS_AS(IniFile::parse("[a]\nx=1\nx=2\n"), ConfigError);  // duplicate key
    CHECK_THROWS_AS(IniFile::parse("[a]\n[a]\n"), ConfigError);       // duplicate section
}

TEST_CASE("run config parsing") {
    IniFile ini = IniFile::parse(kMapConfig);
    RunConfig cfg = parse_run_config(ini, ConfigProfile::AnalyticMap);
    CHECK(cfg.source.b == 0.55);
    CHECK(cfg.seed == 42);
    CHECK(cfg.grid_or_throw().window == 7);
    CHECK(cfg.map_or_throw().averaging == AveragingMode::DetectorWindow);
    // stochastic runs additionally need their own section
    CHECK_THROWS_AS(parse_run_config(ini, ConfigProfile::StochasticRun), ConfigError);

    SUBCASE("unknown keys are rejected with their path") {
        std::string bad = std::string(kMapConfig) + "\n[grid2]\nn = 1\n";
        CHECK_THROWS_WITH_AS(parse_run_config(IniFile::parse(bad), ConfigProfile::AnalyticMap),
                             "[grid2]: unknown section for this subcommand", ConfigError);
        std::string bad_key(kMapConfig);
        bad_key.replace(bad_key.find("w0_um"), 5, "w0_mm");
        CHECK_THROWS_AS(parse_run_config(IniFile::parse(bad_key), ConfigProfile::AnalyticMap),
                        ConfigError);
    }
    SUBCASE("source section round trip") {
        IniFile::Section s = source_section(cfg.source);
        SourceParams back = parse_source_section(s);
        CHECK(back.w0 == cfg.source.w0);
        CHECK(back.b == cfg.source.b);
        CHECK(back.k == cfg.source.k);
        CHECK(back.z == cfg.source.z);
        CHECK(back.z_prime == cfg.source.z_prime);
    }
    SUBCASE("canonical text is stable under section reordering") {
        IniFile reordered;
        reordered.sections = {ini.sections[2], ini.sections[0], ini.sections[1],
                              ini.sections[3]};
        RunConfig other = parse_run_config(reordered, ConfigProfile::AnalyticMap);
        CHECK(other.canonical_text() == cfg.canonical_text());
    }
}

TEST_CASE("grid csv round trip preserves values and metadata") {
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> dist(-2.0, 5.0);
    CorrelationGrid grid;
    grid.axis1 = {"alice_dx_um", 5, 2.7, 0.0};
    grid.axis2 = {"bob_dx_um", 3, 1.35, -1.0};
    for (int i = 0; i < 15; ++i) {
        grid.values.push_back(dist(gen));
        grid.sigma.push_back(std::abs(dist(gen)));
    }
    grid.metadata["alpha_inv_um2"] = "0.0605";
    grid.metadata["kind"] = "analytic_p4";

    auto path = std::filesystem::temp_directory_path() / "qimcorr_grid_roundtrip.csv";
    write_grid_csv(path, grid);
    CorrelationGrid back = read_grid_csv(path);
    CHECK(back.axis1.name == grid.axis1.name);
    CHECK(back.axis1.count == grid.axis1.count);
    CHECK(back.axis2.pitch == grid.axis2.pitch);
    CHECK(back.values == grid.values);
    CHECK(back.sigma == grid.sigma);
    CHECK(back.metadata.at("alpha_inv_um2") == "0.0605");
    CHECK(back.metadata.at("kind") == "analytic_p4");
    std::filesystem::remove(path);
}

TEST_CASE("graymap output is 8-bit and max-normalized") {
    CorrelationGrid grid;
    grid.axis1 = {"a_um", 2, 1.0, 0.0};
    grid.axis2 = {"b_um", 2, 1.0, 0.0};
    grid.values = {0.0, 2.0, -1.0, 1.0};
    auto path = std::filesystem::temp_directory_path() / "qimcorr_test.pgm";
    write_grid_pgm(path, grid);
    std::ifstream in(path, std::ios::binary);
    std::string header;
    std::getline(in, header);
    CHECK(header == "P5");
    std::string dims;
    std::getline(in, dims);
    CHECK(dims == "2 2");
    std::string depth;
    std::getline(in, depth);
    CHECK(depth == "255");
    unsigned char pixels[4];
    in.read(reinterpret_cast<char*>(pixels), 4);
    CHECK(pixels[0] == 0);
    CHECK(pixels[1] == 255);  // the maximum
    CHECK(pixels[2] == 0);    // negative clamps to black
    CHECK(pixels[3] == 128);
    std::filesystem::remove(path);
}

TEST_CASE("normalized cross correlation") {
    CorrelationGrid a;
    a.axis1 = {"x_um", 2, 1.0, 0.0};
    a.axis2 = {"y_um", 2, 1.0, 0.0};
    a.values = {1.0, 2.0, 3.0, 4.0};
    CHECK(normalized_cross_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    CorrelationGrid scaled = a;
    for (double& v : scaled.values) {
        v = 10.0 * v + 3.0;
    }
    CHECK(normalized_cross_correlation(a, scaled) == doctest::Approx(1.0).epsilon(1e-12));

    CorrelationGrid mismatched = a;
    mismatched.axis1.count = 4;
    mismatched.axis2.count = 1;
    CHECK_THROWS_AS(normalized_cross_correlation(a, mismatched), ConfigError);
}

TEST_CASE("fringe fit recovers the generating beta") {
    // map with known alpha and beta; the fit must find beta within a couple
    // of percent even from a modest 9x9 grid
    DefocusParams d{0.0605, 0.121, 2.0, 25.0};
    MapSpec spec;
    spec.scan1 = {MapCoord::AliceDx, 9, 2.7, 0.0};
    spec.scan2 = {MapCoord::BobDx, 9, 2.7, 0.0};
    spec.fixed1 = {MapCoord::AliceDy, 2.7};
    spec.fixed2 = {MapCoord::BobDy, 2.7};
    spec.averaging = AveragingMode::DetectorWindow;
    spec.window = 9;
    spec.window_pitch = 2.7;
    CorrelationGrid grid = correlation_map(spec, d);
    FringeFit fit = fit_fringe_beta(grid);
    REQUIRE(fit.ok);
    CHECK(fit.beta == doctest::Approx(d.beta).epsilon(0.02));
}
