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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qimcorr/biphoton.hpp"
#include "qimcorr/permanent.hpp"

namespace qimcorr {

/// Two Alice detections and two Bob detections (um).
struct FourPointGeometry {
    TransversePoint x1, x2, x1p, x2p;
};

/// D of the two-pair correlator: the sum of all four squared Alice-Bob
/// distances.
double distance_sum(const FourPointGeometry& g);

/// S = (x1 - x2) . (x1' - x2'), the coordinate combination carrying the
/// two-pair interference fringes.
double difference_overlap(const FourPointGeometry& g);

/// Per-permutation decomposition of the 2n-photon amplitude exponents:
///   sum_i |x_i - x'_{sigma(i)}|^2 = d_mean + s_sigma[sigma].
/// d_mean is the permutation-independent part (1/n) sum_{ij} |x_i - x'_j|^2;
/// for n = 2 it equals half of `distance_sum`. The s_sigma sum to zero.
struct PermutationSum {
    std::size_t n = 0;
    double d_mean = 0.0;
    std::vector<double> s_sigma;
};

PermutationSum permutation_sum(const DetectionPattern& pattern);

/// Number of summands in the expanded 2n-photon correlator, n!(n!+1)/2.
std::size_t p2n_term_count(std::size_t n);

/// Pair detection probability |phi(x, x')|^2; independent of beta.
double p2(TransversePoint x, TransversePoint xp, const DefocusParams& d);

/// Two-pair detection probability in the defocused wide-pump limit:
///   exp(-alpha D / 4) (cosh(alpha S / 2) + cos(beta S / 2)).
/// Equals |Perm|^2 / 2 for the same geometry.
double p4(const FourPointGeometry& g, const DefocusParams& d);

/// Largest n accepted by p2n; the expanded form has n!(n!+1)/2 terms.
inline constexpr std::size_t kCorrelatorOrderGuard = 6;

/// General n-pair correlator from the permutation decomposition. Equals the
/// permanent-based joint probability for the defocused wide-pump amplitude.
double p2n(const DetectionPattern& pattern, const DefocusParams& d);

struct SaddleP4 {
    double value = 0.0;
    bool valid = false;
    double phase_span = 0.0;
};

/// Two-pair correlator built from the stationary-phase amplitude:
/// |f11 f22|^2 + |f12 f21|^2 plus the interference cross term whose phase is
/// k S / z_sum shifted by arg(f11 f22 f12* f21*).
SaddleP4 p4_saddle(const FourPointGeometry& g, const RadialProfile& f, double z_sum, double k);

// ---------------------------------------------------------------------------
// Averaged correlation maps
// ---------------------------------------------------------------------------

struct GridAxis {
    std::string name;
    std::size_t count = 0;
    double pitch = 0.0;
    double center = 0.0;

    double value(std::size_t i) const {
        return center + (double(i) - 0.5 * double(count - 1)) * pitch;
    }
};

/// 2D map of a scalar over two scan coordinates. `sigma` is optional and,
/// when present, has the same shape as `values`. Metadata keys are free-form
/// strings preserved by the CSV round trip.
struct CorrelationGrid {
    GridAxis axis1, axis2;
    std::vector<double> values;
    std::vector<double> sigma;
    std::map<std::string, std::string> metadata;

    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axis2.count + i2; }
    double& at(std::size_t i1, std::size_t i2) { return values[index(i1, i2)]; }
    double at(std::size_t i1, std::size_t i2) const { return values[index(i1, i2)]; }
};

/// The eight scalar coordinates of a two-pair geometry: per camera, the
/// in-pair difference (dx, dy) and the anchor position of the second photon
/// (x0, y0). x1 = anchor + difference.
enum class MapCoord {
    AliceDx,
    AliceDy,
    BobDx,
    BobDy,
    AliceX0,
    AliceY0,
    BobX0,
    BobY0,
};

std::string_view to_string(MapCoord c);
std::optional<MapCoord> parse_map_coord(std::string_view name);
bool is_difference_coord(MapCoord c);

struct ScanAxisSpec {
    MapCoord coord{};
    std::size_t count = 0;
    double pitch = 0.0;
    double center = 0.0;
};

struct FixedCoordSpec {
    MapCoord coord{};
    double value = 0.0;
};

enum class AveragingMode {
    /// Averaged coordinates run over a centered uniform lattice.
    Lattice,
    /// Anchors run over all placements that keep both photons inside an
    /// n-by-n pixel detector window (requires pixel-aligned differences).
    DetectorWindow,
};

struct MapSpec {
    ScanAxisSpec scan1, scan2;
    FixedCoordSpec fixed1, fixed2;
    AveragingMode averaging = AveragingMode::Lattice;
    std::size_t avg_count = 1;   // lattice points per averaged coordinate
    double avg_pitch = 0.0;      // lattice pitch (um)
    std::size_t window = 7;      // detector window side (pixels)
    double window_pitch = 2.7;   // detector pixel pitch (um)
    bool normalize_max = false;

    /// Scan, fixed and averaged roles must partition the eight coordinates.
    void validate() const;  // throws ConfigError
};

/// p4 averaged uniformly over the four non-scan, non-fixed coordinates.
CorrelationGrid correlation_map(const MapSpec& spec, const DefocusParams& d);

/// Mean of exp(-alpha D / 4) over the averaged coordinates for one cell.
/// Valid when scan and fixed roles cover the four difference coordinates, so
/// the (cosh + cos) factor is constant within a cell.
double map_envelope(const MapSpec& spec, const DefocusParams& d, double scan1_value,
                    double scan2_value);

/// S of the cell geometry under the same layout restriction as map_envelope.
double map_cell_overlap(const MapSpec& spec, double scan1_value, double scan2_value);

}  // namespace qimcorr
