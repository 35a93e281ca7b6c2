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
#include <vector>

#include "qimcorr/biphoton.hpp"
#include "qimcorr/correlator.hpp"

namespace qimcorr {

/// Simulation lattice: n_pixels-by-n_pixels grid (power of two) holding the
/// fields, and the centered analysis window used for correlations.
struct GridSpec {
    std::size_t n_pixels = 64;
    double pitch = 2.7;       // um
    std::size_t window = 7;   // analysis window side, pixels

    void validate() const;    // throws std::invalid_argument
    std::size_t window_origin() const { return (n_pixels - window) / 2; }
};

/// One Monte-Carlo shot: complex signal and idler fields on the grid.
struct FieldFrame {
    std::size_t n = 0;
    double pitch = 0.0;
    std::vector<cplx> signal;
    std::vector<cplx> idler;
    std::uint64_t master_seed = 0;
    std::uint64_t shot_index = 0;
};

/// Vacuum-seeded frame: i.i.d. circular complex Gaussians with
/// <|c|^2> = 1/2 per pixel in both fields. Deterministic in
/// (seed, shot_index) regardless of scheduling.
FieldFrame sample_vacuum(const GridSpec& grid, std::uint64_t seed, std::uint64_t shot_index = 0);

/// Momentum-space two-mode squeezing profile. r(p) is shaped so the pair
/// amplitude <s(p) i(-p)> = sinh r cosh r equals A exp(-|p|^2 / b^2), the
/// far-field envelope of the source in the wide-pump limit, exactly at any
/// gain. A is calibrated so the mean photon number per pixel after gain hits
/// `gain_peak`.
class GainProfile {
  public:
    GainProfile() = default;  // uncalibrated; rejected by apply_gain

    static GainProfile calibrate(const SourceParams& source, const GridSpec& grid,
                                 double gain_peak);

    bool calibrated() const { return amp_ >= 0.0; }
    double amplitude_scale() const { return amp_; }
    double envelope_b() const { return b_; }
    const GridSpec& grid() const { return grid_; }

    /// sinh r cosh r at squared momentum |p|^2.
    double pair_amplitude(double p_norm2) const;
    /// Mean photons per pixel this profile produces on its grid.
    double mean_photons_per_pixel() const;

  private:
    double amp_ = -1.0;
    double b_ = 0.0;
    GridSpec grid_;
};

/// Apply the two-mode Bogoliubov transform pairing momenta (p, -p) across
/// the signal and idler fields. Throws std::invalid_argument when the
/// profile is uncalibrated or grids mismatch.
void apply_gain(FieldFrame& frame, const GainProfile& gain);

/// Paraxial free propagation of both fields over `distance`:
/// multiply each momentum amplitude by exp(-i distance |p|^2 / (2k)).
void propagate(FieldFrame& frame, double distance, double k);
void propagate(FieldFrame& frame, double distance_signal, double distance_idler, double k);

/// Accumulates everything needed for genuine two-pair correlations over a
/// detector-window map layout: the per-cell fourth-order intensity products
/// and the complex pair moments used for the accidental subtraction.
///
/// Shots are assigned to `batch_count` contiguous index ranges. A batch is
/// only ever filled in increasing shot order, so resuming from a checkpoint
/// reproduces an uninterrupted run bit for bit, and merging accumulators
/// whose populated batches are disjoint is exact.
class G4Accumulator {
  public:
    G4Accumulator() = default;
    G4Accumulator(const GridSpec& grid, const MapSpec& layout, std::size_t batch_count,
                  std::uint64_t planned_shots);

    void add_frame(const FieldFrame& frame);
    void merge(const G4Accumulator& other);

    std::uint64_t shot_count() const;
    std::uint64_t planned_shots() const { return planned_shots_; }
    std::size_t batch_count() const { return counts_.size(); }
    /// Shot index range [first, last) of one batch.
    std::pair<std::uint64_t, std::uint64_t> batch_range(std::size_t batch) const;
    /// Shots already accumulated into one batch.
    std::uint64_t batch_done(std::size_t batch) const { return counts_[batch]; }

    /// Genuine two-pair correlation grid: the fourth-order moment with all
    /// lower-order (accidental) combinations subtracted. The grid's `sigma`
    /// holds the per-cell batch-scatter standard error.
    ///
    /// Subtraction ledger, validated against a synthetic-covariance Wick
    /// oracle in the tests. With C = <s(x) i(x')>, G_A = <s*(x) s(y)>,
    /// G_B = <i*(x') i(y')> (normally ordered) and tuple (x1, x2; x1', x2'):
    ///   accidental = [g1 g2 + |G_A(x1,x2)|^2] [g1' g2' + |G_B(x1',x2')|^2]
    ///     + sum_{i,j,k,l in {1,2}} C(x_i, x'_j) C*(x_k, x'_l)
    ///         G_A(x_kc, x_ic) G_B(x'_lc, x'_jc)
    /// where ic denotes the complementary index of i, and the diagonal
    /// G entries are the singles g. What remains of the Gaussian fourth
    /// moment is |C(x1,x1') C(x2,x2') + C(x1,x2') C(x2,x1')|^2.
    CorrelationGrid genuine_g4(std::uint64_t min_shots = 2) const;

    void save(const std::filesystem::path& path, std::uint64_t config_hash) const;
    static G4Accumulator load(const std::filesystem::path& path, std::uint64_t config_hash);

  private:
    friend struct G4AccumulatorIo;

    std::size_t batch_of(std::uint64_t shot) const;
    std::size_t cell_count() const;

    GridSpec grid_;
    MapSpec layout_;
    std::uint64_t planned_shots_ = 0;
    std::size_t w_ = 0;  // window side

    // per-cell pixel lags, resolved once
    struct Lag {
        int ax, ay, bx, by;
    };
    std::vector<Lag> lags_;

    // per-batch accumulators
    std::vector<std::uint64_t> counts_;
    std::vector<std::vector<double>> quartic_;  // [batch][cell]
    std::vector<std::vector<cplx>> pair_si_;    // [batch][x * w^2 + x'], s(x) i(x')
    std::vector<std::vector<cplx>> coh_s_;      // [batch][x * w^2 + y], s*(x) s(y)
    std::vector<std::vector<cplx>> coh_i_;      // [batch][...], idler
};

/// Full shot pipeline: vacuum seed, parametric gain, defocusing propagation.
struct ShotPipeline {
    GridSpec grid;
    SourceParams source;
    GainProfile gain;
};

/// Run up to `max_new_shots` of the shots still missing from `acc`, in
/// global shot order, using `workers` threads. Whole batches are assigned to
/// single workers and filled in increasing shot order, so the accumulator
/// contents are identical for any worker count and any interruption point.
void run_shots(const ShotPipeline& pipeline, std::uint64_t seed, G4Accumulator& acc,
               std::uint64_t max_new_shots, unsigned workers);

}  // namespace qimcorr
