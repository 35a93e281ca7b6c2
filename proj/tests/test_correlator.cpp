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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qimcorr/errors.hpp"

using namespace qimcorr;

namespace {

const DefocusParams kDefocus{0.06, 0.13, 13.0 / 6.0, 25.0};

FourPointGeometry random_geometry(std::mt19937& gen, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    return {{dist(gen), dist(gen)},
            {dist(gen), dist(gen)},
            {dist(gen), dist(gen)},
            {dist(gen), dist(gen)}};
}

}  // namespace

TEST_CASE("pair probability") {
    CHECK(p2({1.0, -2.0}, {1.0, -2.0}, kDefocus) == 1.0);
    SUBCASE("beta never enters") {
        DefocusParams doubled = kDefocus;
        doubled.beta *= 2.0;
        doubled.big_z *= 2.0;
        TransversePoint x{0.7, 0.1}, xp{-0.4, 2.0};
        CHECK(p2(x, xp, kDefocus) == p2(x, xp, doubled));
    }
    SUBCASE("matches the one-pair permanent probability") {
        TransversePoint x{0.7, 0.1}, xp{-0.4, 2.0};
        DetectionPattern p{{x}, {xp}};
        CHECK(p2(x, xp, kDefocus) ==
              doctest::Approx(joint_probability(p, defocused_position_fn(kDefocus)))
                  .epsilon(1e-13));
    }
}

TEST_CASE("two-pair closed form") {
    SUBCASE("coincident alice pair has no fringe term") {
        FourPointGeometry g{{1.0, 0.5}, {1.0, 0.5}, {0.0, 0.0}, {2.0, -1.0}};
        CHECK(difference_overlap(g) == 0.0);
        double expect = std::exp(-kDefocus.alpha * distance_sum(g) / 4.0) * 2.0;
        CHECK(p4(g, kDefocus) == doctest::Approx(expect).epsilon(1e-13));
    }
    SUBCASE("fringe minimum at beta S / 2 = pi") {
        // pick S via collinear points: S = u v with u = x1-x2, v = x1'-x2'
        double s_target = 2.0 * std::numbers::pi / kDefocus.beta;
        double u = 2.0, v = s_target / u;
        FourPointGeometry g{{u, 0.0}, {0.0, 0.0}, {v, 0.0}, {0.0, 0.0}};
        CHECK(difference_overlap(g) == doctest::Approx(s_target).epsilon(1e-13));
        double expect = std::exp(-kDefocus.alpha * distance_sum(g) / 4.0) *
                        (std::cosh(kDefocus.alpha * s_target / 2.0) - 1.0);
        CHECK(p4(g, kDefocus) == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("swapping a pair flips S but not p4") {
        std::mt19937 gen(7);
        for (int i = 0; i < 50; ++i) {
            FourPointGeometry g = random_geometry(gen, 4.0);
            FourPointGeometry swapped{g.x2, g.x1, g.x1p, g.x2p};
            CHECK(difference_overlap(swapped) == -difference_overlap(g));
            CHECK(p4(swapped, kDefocus) == doctest::Approx(p4(g, kDefocus)).epsilon(1e-12));
        }
    }
    SUBCASE("nonnegative everywhere") {
        std::mt19937 gen(13);
        for (int i = 0; i < 200; ++i) {
            CHECK(p4(random_geometry(gen, 6.0), kDefocus) >= 0.0);
        }
    }
    SUBCASE("p4 is |Perm|^2 / 2 for many geometries and defocus values") {
        std::mt19937 gen(23);
        std::uniform_real_distribution<double> alpha_dist(0.01, 0.3);
        std::uniform_real_distribution<double> z_dist(0.0, 4.0);
        for (int pair = 0; pair < 10; ++pair) {
            double alpha = alpha_dist(gen);
            double big_z = z_dist(gen);
            DefocusParams d{alpha, alpha * big_z, big_z, 10.0};
            BiphotonFn phi = defocused_position_fn(d);
            for (int i = 0; i < 20; ++i) {
                FourPointGeometry g = random_geometry(gen, 2.5 / std::sqrt(alpha));
                DetectionPattern p{{g.x1, g.x2}, {g.x1p, g.x2p}};
                double ratio = p4(g, d) / joint_probability(p, phi);
                CHECK(std::abs(ratio - 0.5) < 1e-10);
            }
        }
    }
}

TEST_CASE("permutation decomposition") {
    std::mt19937 gen(41);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    for (std::size_t n : {2u, 3u, 4u}) {
        DetectionPattern p;
        for (std::size_t i = 0; i < n; ++i) {
            p.alice.push_back({dist(gen), dist(gen)});
            p.bob.push_back({dist(gen), dist(gen)});
        }
        PermutationSum sums = permutation_sum(p);
        std::size_t fact = 1;
        for (std::size_t i = 2; i <= n; ++i) {
            fact *= i;
        }
        CHECK(sums.s_sigma.size() == fact);
        double total = std::accumulate(sums.s_sigma.begin(), sums.s_sigma.end(), 0.0);
        CHECK(std::abs(total) < 1e-10 * fact);
    }
}

TEST_CASE("expanded correlator term count") {
    CHECK(p2n_term_count(2) == 3);
    CHECK(p2n_term_count(3) == 21);  // 6 permutations
    CHECK(p2n_term_count(4) == 300);
}

TEST_CASE("general correlator") {
    std::mt19937 gen(59);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);

    SUBCASE("n = 2 carries twice the main-text p4") {
        for (int i = 0; i < 30; ++i) {
            FourPointGeometry g = random_geometry(gen, 4.0);
            DetectionPattern p{{g.x1, g.x2}, {g.x1p, g.x2p}};
            // the permutation-mean distance is half the four-term sum
            PermutationSum sums = permutation_sum(p);
            CHECK(sums.d_mean == doctest::Approx(distance_sum(g) / 2.0).epsilon(1e-12));
            CHECK(p2n(p, kDefocus) == doctest::Approx(2.0 * p4(g, kDefocus)).epsilon(1e-11));
        }
    }
    SUBCASE("n = 3 equals the permanent probability") {
        BiphotonFn phi = defocused_position_fn(kDefocus);
        for (int i = 0; i < 40; ++i) {
            DetectionPattern p;
            for (int j = 0; j < 3; ++j) {
                p.alice.push_back({dist(gen), dist(gen)});
                p.bob.push_back({dist(gen), dist(gen)});
            }
            double expect = joint_probability(p, phi);
            CHECK(p2n(p, kDefocus) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
    SUBCASE("order guard") {
        DetectionPattern p;
        for (int j = 0; j < 7; ++j) {
            p.alice.push_back({double(j), 0.0});
            p.bob.push_back({double(j), 1.0});
        }
        CHECK_THROWS_AS(p2n(p, kDefocus), NumericGuardError);
    }
}

TEST_CASE("saddle-point two-pair correlator") {
    double b = 1.0, k = 10.0;
    RadialProfile f = gaussian_profile(b);
    double z_sum = 2.0 * k * 20.0 / (b * b);  // Z = 20

    SUBCASE("all points coincident gives 4 |f(0)|^4") {
        FourPointGeometry g{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
        auto v = p4_saddle(g, f, z_sum, k);
        CHECK(v.value == doctest::Approx(4.0).epsilon(1e-13));
    }
    SUBCASE("equals the squared pairing sum of the saddle amplitudes") {
        std::mt19937 gen(67);
        for (int i = 0; i < 60; ++i) {
            FourPointGeometry g = random_geometry(gen, 15.0);
            auto direct = phi_saddle(g.x1, g.x1p, f, z_sum, k).value *
                          phi_saddle(g.x2, g.x2p, f, z_sum, k).value;
            auto exchanged = phi_saddle(g.x1, g.x2p, f, z_sum, k).value *
                             phi_saddle(g.x2, g.x1p, f, z_sum, k).value;
            double expect = std::norm(direct + exchanged);
            auto got = p4_saddle(g, f, z_sum, k);
            CHECK(got.value == doctest::Approx(expect).epsilon(1e-11));
        }
    }
    SUBCASE("near-coincident prefactors reduce to the pure fringe") {
        SourceParams p{1e9, b, k, z_sum / 2.0, z_sum / 2.0};
        DefocusParams d = derive_defocus(p);
        double spacing = 0.4 / std::sqrt(d.beta);
        FourPointGeometry g{{spacing, 0}, {0, 0}, {2.0 * spacing, 0}, {0, 0}};
        auto got = p4_saddle(g, f, z_sum, k);
        double s = difference_overlap(g);
        double pure = 2.0 * (1.0 + std::cos(k * s / z_sum));
        CHECK(got.value == doctest::Approx(pure).epsilon(0.02));
    }
}

TEST_CASE("map spec validation") {
    MapSpec spec;
    spec.scan1 = {MapCoord::AliceDx, 7, 2.7, 0.0};
    spec.scan2 = {MapCoord::BobDx, 7, 2.7, 0.0};
    spec.fixed1 = {MapCoord::AliceDy, 2.7};
    spec.fixed2 = {MapCoord::BobDy, 2.7};
    spec.averaging = AveragingMode::DetectorWindow;
    spec.window = 7;
    spec.window_pitch = 2.7;
    CHECK_NOTHROW(spec.validate());

    SUBCASE("coordinate used twice is not a partition") {
        MapSpec bad = spec;
        bad.fixed1.coord = MapCoord::AliceDx;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    SUBCASE("window averaging needs difference roles") {
        MapSpec bad = spec;
        bad.scan1.coord = MapCoord::AliceX0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    SUBCASE("window averaging needs pixel-aligned axes") {
        MapSpec bad = spec;
        bad.scan1.pitch = 1.3;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("correlation maps") {
    DefocusParams d = kDefocus;

    SUBCASE("flat when beta vanishes") {
        DefocusParams flat{0.06, 0.0, 0.0, 25.0};
        MapSpec spec;
        spec.scan1 = {MapCoord::AliceDx, 9, 1.0, 0.0};
        spec.scan2 = {MapCoord::BobDx, 9, 1.0, 0.0};
        spec.fixed1 = {MapCoord::AliceDy, 0.0};
        spec.fixed2 = {MapCoord::BobDy, 0.0};
        CorrelationGrid grid = correlation_map(spec, flat);
        // cos term frozen: value = exp(-alpha D/4)(cosh(alpha S/2)+1), which
        // never dips below the envelope alone and carries no oscillation;
        // check positivity and the symmetric saddle structure
        for (double v : grid.values) {
            CHECK(v > 0.0);
        }
        // no interior strict minima along the diagonal
        for (std::size_t i = 1; i + 1 < 9; ++i) {
            double prev = grid.at(i - 1, i - 1), cur = grid.at(i, i), next = grid.at(i + 1, i + 1);
            CHECK_FALSE((cur < prev && cur < next));
        }
    }

    SUBCASE("window shape follows the spec") {
        MapSpec spec;
        spec.scan1 = {MapCoord::AliceDx, 7, 2.7, 0.0};
        spec.scan2 = {MapCoord::BobDx, 7, 2.7, 0.0};
        spec.fixed1 = {MapCoord::AliceDy, 2.7};
        spec.fixed2 = {MapCoord::BobDy, 2.7};
        spec.averaging = AveragingMode::DetectorWindow;
        spec.window = 7;
        spec.window_pitch = 2.7;
        CorrelationGrid grid = correlation_map(spec, d);
        CHECK(grid.axis1.count == 7);
        CHECK(grid.axis2.count == 7);
        CHECK(grid.values.size() == 49);
        CHECK(grid.metadata.at("averaging") == "window");
    }

    SUBCASE("fringe maxima sit on hyperbolas with spacing 4 pi / beta") {
        // scan u_x finely at a few fixed v_x rows; maxima spacing in S must
        // match the period
        // keep alpha S well below 1 across the scan so the cosh background
        // stays flat and the cos fringes dominate the local maxima
        MapSpec spec;
        spec.scan1 = {MapCoord::AliceDx, 1601, 0.25, 200.0};
        spec.scan2 = {MapCoord::BobDx, 3, 10.0, 40.0};
        spec.fixed1 = {MapCoord::AliceDy, 0.0};
        spec.fixed2 = {MapCoord::BobDy, 0.0};
        DefocusParams fine{6.25e-5, 0.05, 800.0, 25.0};
        CorrelationGrid grid = correlation_map(spec, fine);
        double period = 4.0 * std::numbers::pi / fine.beta;
        for (std::size_t row2 = 0; row2 < 3; ++row2) {
            double v = grid.axis2.value(row2);
            std::vector<double> maxima;
            for (std::size_t i = 1; i + 1 < spec.scan1.count; ++i) {
                double prev = grid.at(i - 1, row2), cur = grid.at(i, row2),
                       next = grid.at(i + 1, row2);
                if (cur > prev && cur > next) {
                    // parabolic refinement
                    double denom = prev - 2.0 * cur + next;
                    double shift = denom != 0.0 ? 0.5 * (prev - next) / denom : 0.0;
                    maxima.push_back((grid.axis1.value(i) + shift * spec.scan1.pitch) * v);
                }
            }
            REQUIRE(maxima.size() >= 4);
            for (std::size_t i = 1; i < maxima.size(); ++i) {
                CHECK(std::abs(maxima[i] - maxima[i - 1] - period) < 0.01 * period);
            }
        }
    }

    SUBCASE("deterministic values") {
        MapSpec spec;
        spec.scan1 = {MapCoord::AliceDx, 5, 2.7, 0.0};
        spec.scan2 = {MapCoord::BobDx, 5, 2.7, 0.0};
        spec.fixed1 = {MapCoord::AliceDy, 2.7};
        spec.fixed2 = {MapCoord::BobDy, 2.7};
        spec.averaging = AveragingMode::DetectorWindow;
        spec.window = 5;
        spec.window_pitch = 2.7;
        CorrelationGrid a = correlation_map(spec, d);
        CorrelationGrid b = correlation_map(spec, d);
        CHECK(a.values == b.values);
    }
}
