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
#include <optional>

#include "qimcorr/config.hpp"
#include "qimcorr/manifest.hpp"

namespace qimcorr {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    unsigned workers = 0;  ///< 0 = hardware concurrency
    std::optional<std::uint64_t> max_new_shots;
};

/// Pearson correlation of the two value arrays; grids must share axes.
double normalized_cross_correlation(const CorrelationGrid& a, const CorrelationGrid& b);

/// Least-squares fit of the fringe wavenumber: divide the cell values by the
/// averaged envelope (reconstructed from the grid metadata), then fit
/// A (cosh(alpha S / 2) + cos(beta S / 2)) over beta.
struct FringeFit {
    bool ok = false;
    double beta = 0.0;
    double period_s = 0.0;  ///< 4 pi / beta (um^2)
};

FringeFit fit_fringe_beta(const CorrelationGrid& grid);

struct CompareReport {
    double ncc = 0.0;
    FringeFit fit_a, fit_b;
};

/// analytic-map: averaged p4 grid -> CSV + PGM + manifest.
void run_analytic_map(const RunConfig& config, const RunOptions& options);

/// stochastic-run: Monte-Carlo genuine-G4 grid, resumable via a checkpoint.
void run_stochastic(const RunConfig& config, const RunOptions& options);

/// compare: NCC and fringe fits of two grid files; writes a JSON report.
CompareReport run_compare(const std::filesystem::path& grid_a, const std::filesystem::path& grid_b,
                          const RunOptions& options);

/// perm-bench: permanent runtimes vs order as CSV (n, algorithm, seconds).
void run_perm_bench(std::size_t n_max, std::uint64_t seed, const RunOptions& options);

/// swap-demo: probability tables, reconstructed density matrix, summary.
void run_swap_demo(const RunConfig& config, const RunOptions& options);

}  // namespace qimcorr
