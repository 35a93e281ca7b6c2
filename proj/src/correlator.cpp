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

#include "qimcorr/correlator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qimcorr/errors.hpp"
#include "qimcorr/text.hpp"

namespace qimcorr {

double distance_sum(const FourPointGeometry& g) {
    return norm2(g.x1 - g.x1p) + norm2(g.x1 - g.x2p) + norm2(g.x2 - g.x1p) +
           norm2(g.x2 - g.x2p);
}

double difference_overlap(const FourPointGeometry& g) {
    return dot(g.x1 - g.x2, g.x1p - g.x2p);
}

PermutationSum permutation_sum(const DetectionPattern& pattern) {
    pattern.validate();
    std::size_t n = pattern.order();
    if (n > kCorrelatorOrderGuard) {
        throw NumericGuardError("permutation_sum: order guard is n <= 6");
    }
    // pairwise squared distances, row = Alice index
    std::vector<double> dist2(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist2[i * n + j] = norm2(pattern.alice[i] - pattern.bob[j]);
        }
    }
    PermutationSum out;
    out.n = n;
    out.d_mean = std::accumulate(dist2.begin(), dist2.end(), 0.0) / double(n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        double paired = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            paired += dist2[i * n + perm[i]];
        }
        out.s_sigma.push_back(paired - out.d_mean);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::size_t p2n_term_count(std::size_t n) {
    std::size_t fact = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        fact *= i;
    }
    return fact * (fact + 1) / 2;
}

double p2(TransversePoint x, TransversePoint xp, const DefocusParams& d) {
    d.validate();
    return std::exp(-d.alpha * norm2(x - xp) / 2.0);
}

double p4(const FourPointGeometry& g, const DefocusParams& d) {
    d.validate();
    double dist = distance_sum(g);
    double s = difference_overlap(g);
    return std::exp(-d.alpha * dist / 4.0) *
           (std::cosh(d.alpha * s / 2.0) + std::cos(d.beta * s / 2.0));
}

double p2n(const DetectionPattern& pattern, const DefocusParams& d) {
    d.validate();
    PermutationSum sums = permutation_sum(pattern);
    cplx exponent_scale(-d.alpha / 4.0, d.beta / 4.0);
    cplx amp(0.0, 0.0);
    for (double s : sums.s_sigma) {
        amp += std::exp(exponent_scale * s);
    }
    return std::exp(-d.alpha * sums.d_mean / 2.0) * std::norm(amp);
}

SaddleP4 p4_saddle(const FourPointGeometry& g, const RadialProfile& f, double z_sum, double k) {
    if (!(z_sum > 0.0) || !(k > 0.0)) {
        throw std::invalid_argument("p4_saddle: z_sum and k must be positive");
    }
    double scale = k / z_sum;
    cplx f11 = f.envelope(scale * (g.x1 - g.x1p));
    cplx f22 = f.envelope(scale * (g.x2 - g.x2p));
    cplx f12 = f.envelope(scale * (g.x1 - g.x2p));
    cplx f21 = f.envelope(scale * (g.x2 - g.x1p));
    double s = difference_overlap(g);
    cplx direct = f11 * f22;
    cplx exchanged = f12 * f21;
    double phi = std::arg(direct * std::conj(exchanged));
    SaddleP4 out;
    out.value = std::norm(direct) + std::norm(exchanged) +
                2.0 * std::abs(direct) * std::abs(exchanged) * std::cos(scale * s - phi);
    out.phase_span = f.support_radius * f.support_radius * z_sum / (2.0 * k);
    out.valid = out.phase_span >= 4.0 * std::numbers::pi;
    return out;
}

// ---------------------------------------------------------------------------
// Averaged correlation maps
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<MapCoord, 8> kAllCoords = {
    MapCoord::AliceDx, MapCoord::AliceDy, MapCoord::BobDx, MapCoord::BobDy,
    MapCoord::AliceX0, MapCoord::AliceY0, MapCoord::BobX0, MapCoord::BobY0,
};

FourPointGeometry geometry_from(const std::array<double, 8>& c) {
    auto v = [&c](MapCoord m) { return c[std::size_t(m)]; };
    FourPointGeometry g;
    g.x2 = {v(MapCoord::AliceX0), v(MapCoord::AliceY0)};
    g.x1 = g.x2 + TransversePoint{v(MapCoord::AliceDx), v(MapCoord::AliceDy)};
    g.x2p = {v(MapCoord::BobX0), v(MapCoord::BobY0)};
    g.x1p = g.x2p + TransversePoint{v(MapCoord::BobDx), v(MapCoord::BobDy)};
    return g;
}

bool pixel_aligned(double value, double pitch) {
    double px = value / pitch;
    return std::abs(px - std::round(px)) < 1e-9 * std::max(1.0, std::abs(px));
}

/// Anchor pixel offsets (um) that keep both photons of a pair with pixel lag
/// (dx_px, dy_px) inside a w-by-w window. Offsets are centered on the window.
std::vector<TransversePoint> window_anchors(int dx_px, int dy_px, std::size_t w, double pitch) {
    std::vector<TransversePoint> anchors;
    int iw = int(w);
    double mid = 0.5 * double(iw - 1);
    for (int ix = std::max(0, -dx_px); ix <= std::min(iw - 1, iw - 1 - dx_px); ++ix) {
        for (int iy = std::max(0, -dy_px); iy <= std::min(iw - 1, iw - 1 - dy_px); ++iy) {
            anchors.push_back({(double(ix) - mid) * pitch, (double(iy) - mid) * pitch});
        }
    }
    return anchors;
}

struct CellAverager {
    const MapSpec& spec;

    /// Calls fn(geometry) for every averaged-coordinate combination of the
    /// cell fixed by `base` (scan and fixed coordinates already resolved),
    /// and returns the number of combinations.
    template <typename Fn>
    std::size_t for_each(std::array<double, 8> base, Fn&& fn) const {
        std::array<bool, 8> assigned{};
        assigned[std::size_t(spec.scan1.coord)] = true;
        assigned[std::size_t(spec.scan2.coord)] = true;
        assigned[std::size_t(spec.fixed1.coord)] = true;
        assigned[std::size_t(spec.fixed2.coord)] = true;

        if (spec.averaging == AveragingMode::DetectorWindow) {
            auto lag = [&base, this](MapCoord c) {
                double v = base[std::size_t(c)];
                if (!pixel_aligned(v, spec.window_pitch)) {
                    throw ConfigError("window averaging requires pixel-aligned differences");
                }
                return int(std::lround(v / spec.window_pitch));
            };
            auto alice = window_anchors(lag(MapCoord::AliceDx), lag(MapCoord::AliceDy),
                                        spec.window, spec.window_pitch);
            auto bob = window_anchors(lag(MapCoord::BobDx), lag(MapCoord::BobDy), spec.window,
                                      spec.window_pitch);
            for (const auto& a : alice) {
                base[std::size_t(MapCoord::AliceX0)] = a.x;
                base[std::size_t(MapCoord::AliceY0)] = a.y;
                for (const auto& b : bob) {
                    base[std::size_t(MapCoord::BobX0)] = b.x;
                    base[std::size_t(MapCoord::BobY0)] = b.y;
                    fn(geometry_from(base));
                }
            }
            return alice.size() * bob.size();
        }

        std::vector<std::size_t> averaged;
        for (MapCoord c : kAllCoords) {
            if (!assigned[std::size_t(c)]) {
                averaged.push_back(std::size_t(c));
            }
        }
        std::size_t total = 1;
        for (std::size_t i = 0; i < averaged.size(); ++i) {
            total *= spec.avg_count;
        }
        double mid = 0.5 * double(spec.avg_count - 1);
        for (std::size_t combo = 0; combo < total; ++combo) {
            std::size_t rest = combo;
            for (std::size_t slot : averaged) {
                std::size_t j = rest % spec.avg_count;
                rest /= spec.avg_count;
                base[slot] = (double(j) - mid) * spec.avg_pitch;
            }
            fn(geometry_from(base));
        }
        return total;
    }
};

}  // namespace

std::string_view to_string(MapCoord c) {
    switch (c) {
        case MapCoord::AliceDx: return "alice_dx";
        case MapCoord::AliceDy: return "alice_dy";
        case MapCoord::BobDx: return "bob_dx";
        case MapCoord::BobDy: return "bob_dy";
        case MapCoord::AliceX0: return "alice_x0";
        case MapCoord::AliceY0: return "alice_y0";
        case MapCoord::BobX0: return "bob_x0";
        case MapCoord::BobY0: return "bob_y0";
    }
    return "?";
}

std::optional<MapCoord> parse_map_coord(std::string_view name) {
    for (MapCoord c : kAllCoords) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

bool is_difference_coord(MapCoord c) {
    return c == MapCoord::AliceDx || c == MapCoord::AliceDy || c == MapCoord::BobDx ||
           c == MapCoord::BobDy;
}

void MapSpec::validate() const {
    std::array<int, 8> uses{};
    uses[std::size_t(scan1.coord)]++;
    uses[std::size_t(scan2.coord)]++;
    uses[std::size_t(fixed1.coord)]++;
    uses[std::size_t(fixed2.coord)]++;
    for (MapCoord c : kAllCoords) {
        if (uses[std::size_t(c)] > 1) {
            throw ConfigError(std::string("map coordinate assigned twice: ") +
                              std::string(to_string(c)));
        }
    }
    if (scan1.count < 1 || scan2.count < 1) {
        throw ConfigError("map scan axes need at least one sample");
    }
    if ((scan1.count > 1 && !(scan1.pitch > 0.0)) || (scan2.count > 1 && !(scan2.pitch > 0.0))) {
        throw ConfigError("map scan pitch must be positive");
    }
    if (averaging == AveragingMode::Lattice) {
        if (avg_count < 1) {
            throw ConfigError("map avg_count must be at least 1");
        }
        if (avg_count > 1 && !(avg_pitch > 0.0)) {
            throw ConfigError("map avg_pitch must be positive when avg_count > 1");
        }
    } else {
        if (window < 1 || !(window_pitch > 0.0)) {
            throw ConfigError("map window averaging needs window >= 1 and positive pitch");
        }
        // anchors are averaged, so scan and fixed must cover the differences
        auto diff_ok = [](MapCoord c) { return is_difference_coord(c); };
        if (!diff_ok(scan1.coord) || !diff_ok(scan2.coord) || !diff_ok(fixed1.coord) ||
            !diff_ok(fixed2.coord)) {
            throw ConfigError(
                "window averaging requires scan and fixed roles on the difference coordinates");
        }
        for (const ScanAxisSpec* axis : {&scan1, &scan2}) {
            if (!pixel_aligned(axis->center, window_pitch) ||
                (axis->count > 1 && !pixel_aligned(axis->pitch, window_pitch))) {
                throw ConfigError("window averaging requires pixel-aligned scan axes");
            }
            if (axis->count % 2 == 0) {
                throw ConfigError("window averaging requires odd scan counts");
            }
        }
        if (!pixel_aligned(fixed1.value, window_pitch) ||
            !pixel_aligned(fixed2.value, window_pitch)) {
            throw ConfigError("window averaging requires pixel-aligned fixed differences");
        }
    }
}

CorrelationGrid correlation_map(const MapSpec& spec, const DefocusParams& d) {
    spec.validate();
    d.validate();
    CorrelationGrid grid;
    grid.axis1 = {std::string(to_string(spec.scan1.coord)) + "_um", spec.scan1.count,
                  spec.scan1.pitch, spec.scan1.center};
    grid.axis2 = {std::string(to_string(spec.scan2.coord)) + "_um", spec.scan2.count,
                  spec.scan2.pitch, spec.scan2.center};
    grid.values.assign(spec.scan1.count * spec.scan2.count, 0.0);

    CellAverager averager{spec};
    for (std::size_t i1 = 0; i1 < spec.scan1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < spec.scan2.count; ++i2) {
            std::array<double, 8> base{};
            base[std::size_t(spec.scan1.coord)] = grid.axis1.value(i1);
            base[std::size_t(spec.scan2.coord)] = grid.axis2.value(i2);
            base[std::size_t(spec.fixed1.coord)] = spec.fixed1.value;
            base[std::size_t(spec.fixed2.coord)] = spec.fixed2.value;
            double sum = 0.0;
            std::size_t combos =
                averager.for_each(base, [&](const FourPointGeometry& g) { sum += p4(g, d); });
            grid.at(i1, i2) = sum / double(combos);
        }
    }

    if (spec.normalize_max) {
        double peak = *std::max_element(grid.values.begin(), grid.values.end());
        if (peak > 0.0) {
            for (double& v : grid.values) {
                v /= peak;
            }
        }
    }

    grid.metadata["kind"] = "analytic_p4";
    grid.metadata["alpha_inv_um2"] = format_double(d.alpha);
    grid.metadata["beta_inv_um2"] = format_double(d.beta);
    grid.metadata["fixed." + std::string(to_string(spec.fixed1.coord)) + "_um"] =
        format_double(spec.fixed1.value);
    grid.metadata["fixed." + std::string(to_string(spec.fixed2.coord)) + "_um"] =
        format_double(spec.fixed2.value);
    if (spec.averaging == AveragingMode::DetectorWindow) {
        grid.metadata["averaging"] = "window";
        grid.metadata["window_px"] = std::to_string(spec.window);
        grid.metadata["window_pitch_um"] = format_double(spec.window_pitch);
    } else {
        grid.metadata["averaging"] = "lattice";
        grid.metadata["avg_count"] = std::to_string(spec.avg_count);
        grid.metadata["avg_pitch_um"] = format_double(spec.avg_pitch);
    }
    grid.metadata["normalization"] = spec.normalize_max ? "max" : "raw";
    return grid;
}

static void require_difference_layout(const MapSpec& spec) {
    if (!is_difference_coord(spec.scan1.coord) || !is_difference_coord(spec.scan2.coord) ||
        !is_difference_coord(spec.fixed1.coord) || !is_difference_coord(spec.fixed2.coord)) {
        throw ConfigError("cell envelope needs scan and fixed roles on difference coordinates");
    }
}

double map_envelope(const MapSpec& spec, const DefocusParams& d, double scan1_value,
                    double scan2_value) {
    spec.validate();
    require_difference_layout(spec);
    std::array<double, 8> base{};
    base[std::size_t(spec.scan1.coord)] = scan1_value;
    base[std::size_t(spec.scan2.coord)] = scan2_value;
    base[std::size_t(spec.fixed1.coord)] = spec.fixed1.value;
    base[std::size_t(spec.fixed2.coord)] = spec.fixed2.value;
    CellAverager averager{spec};
    double sum = 0.0;
    std::size_t combos = averager.for_each(base, [&](const FourPointGeometry& g) {
        sum += std::exp(-d.alpha * distance_sum(g) / 4.0);
    });
    return sum / double(combos);
}

double map_cell_overlap(const MapSpec& spec, double scan1_value, double scan2_value) {
    require_difference_layout(spec);
    std::array<double, 8> base{};
    base[std::size_t(spec.scan1.coord)] = scan1_value;
    base[std::size_t(spec.scan2.coord)] = scan2_value;
    base[std::size_t(spec.fixed1.coord)] = spec.fixed1.value;
    base[std::size_t(spec.fixed2.coord)] = spec.fixed2.value;
    auto v = [&base](MapCoord m) { return base[std::size_t(m)]; };
    TransversePoint u{v(MapCoord::AliceDx), v(MapCoord::AliceDy)};
    TransversePoint w{v(MapCoord::BobDx), v(MapCoord::BobDy)};
    return dot(u, w);
}

}  // namespace qimcorr
