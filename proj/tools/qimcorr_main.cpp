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

#include <CLI11.hpp>
#include <iostream>

#include "qimcorr/errors.hpp"
#include "qimcorr/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;
constexpr int kExitStats = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiphoton correlations between entangled quantum images"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global options after the subcommand name

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
    app.add_option("--config", config_path, "INI configuration file")->envname("QIMCORR_CONFIG");
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--seed", seed, "64-bit master seed (overrides the config)")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    app.add_option("--workers", workers, "worker threads (default: all cores)");

    auto* analytic = app.add_subcommand("analytic-map", "averaged closed-form correlation map");
    auto* stochastic = app.add_subcommand("stochastic-run", "Monte-Carlo genuine-G4 map");
    std::uint64_t max_shots = 0;
    bool max_shots_set = false;
    stochastic->add_option("--max-shots", max_shots, "add at most this many new shots")
        ->each([&max_shots_set](const std::string&) { max_shots_set = true; });
    auto* compare = app.add_subcommand("compare", "compare two correlation grids");
    std::string grid_a, grid_b;
    compare->add_option("grid_a", grid_a, "first grid CSV")->required();
    compare->add_option("grid_b", grid_b, "second grid CSV")->required();
    auto* swap_demo = app.add_subcommand("swap-demo", "post-selected two-qubit tomography");
    auto* perm_bench = app.add_subcommand("perm-bench", "permanent runtime benchmark");
    std::size_t n_max = 7;
    perm_bench->add_option("--n-max", n_max, "largest matrix order (default: 7)");

    CLI11_PARSE(app, argc, argv);

    qimcorr::RunOptions options;
    options.out_dir = out_dir;
    options.workers = workers;
    if (seed_set) {
        options.seed_override = seed;
    }
    if (max_shots_set) {
        options.max_new_shots = max_shots;
    }

    auto load = [&](qimcorr::ConfigProfile profile) {
        if (config_path.empty()) {
            throw qimcorr::ConfigError("--config is required for this subcommand");
        }
        return qimcorr::load_run_config(config_path, profile);
    };

    try {
        if (analytic->parsed()) {
            qimcorr::run_analytic_map(load(qimcorr::ConfigProfile::AnalyticMap), options);
        } else if (stochastic->parsed()) {
            qimcorr::run_stochastic(load(qimcorr::ConfigProfile::StochasticRun), options);
        } else if (compare->parsed()) {
            auto report = qimcorr::run_compare(grid_a, grid_b, options);
            std::cout << "ncc=" << report.ncc << "\n";
        } else if (swap_demo->parsed()) {
            qimcorr::run_swap_demo(load(qimcorr::ConfigProfile::SwapDemo), options);
        } else if (perm_bench->parsed()) {
            qimcorr::run_perm_bench(n_max, seed_set ? seed : 1, options);
        }
    } catch (const qimcorr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qimcorr::NumericGuardError& e) {
        std::cerr << "guard error: " << e.what() << "\n";
        return kExitGuard;
    } catch (const qimcorr::InsufficientStatsError& e) {
        std::cerr << "statistics error: " << e.what() << "\n";
        return kExitStats;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
