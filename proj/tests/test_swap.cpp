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

#include "qimcorr/swap.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qimcorr/correlator.hpp"
#include "qimcorr/errors.hpp"

using namespace qimcorr;

namespace {

// strongly defocused regime with every validity margin above 10
const DefocusParams kSwapDefocus{6.25e-10, 2.5e-5, 4.0e4, 25.0};
const double kSwapA = 6000.0;
const double kSwapL = 10800.0;
// beta a delta = 2 pi makes the two basis plane waves exactly orthogonal on
// the window
const double kSwapDelta = 2.0 * std::numbers::pi / (kSwapDefocus.beta * kSwapA);
const double kSwapY = kSwapDelta;

}  // namespace

TEST_CASE("conditional state") {
    DefocusParams d{0.05, 0.11, 2.2, 30.0};

    SUBCASE("coincident alice detections double the product") {
        ConditionalState st = conditional_state(0.0, d);
        TransversePoint x1{1.2, -0.4}, x2{-0.7, 0.9};
        cplx expect = 2.0 * phi_defocused_position({0, 0}, x1, d) *
                      phi_defocused_position({0, 0}, x2, d);
        CHECK(std::abs(st.amplitude(x1, x2) - expect) < 1e-14);
    }
    SUBCASE("bosonic exchange symmetry") {
        ConditionalState st = conditional_state(1.7, d);
        std::mt19937 gen(3);
        std::uniform_real_distribution<double> dist(-4.0, 4.0);
        for (int i = 0; i < 100; ++i) {
            TransversePoint x1{dist(gen), dist(gen)}, x2{dist(gen), dist(gen)};
            CHECK(st.amplitude(x1, x2) == st.amplitude(x2, x1));
        }
    }
    SUBCASE("squared amplitude tracks the two-pair correlator") {
        double a = 2.3;
        ConditionalState st = conditional_state(a, d);
        std::mt19937 gen(5);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        for (int i = 0; i < 50; ++i) {
            TransversePoint x1{dist(gen), dist(gen)}, x2{dist(gen), dist(gen)};
            FourPointGeometry g{{a, 0.0}, {-a, 0.0}, x1, x2};
            double ratio = std::norm(st.amplitude(x1, x2)) / p4(g, d);
            CHECK(ratio == doctest::Approx(2.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("qubit approximation") {
    auto approx = qubit_approximation(kSwapA, kSwapL, kSwapDelta, kSwapY, kSwapDefocus);
    const TwoQubitState& st = approx.state;

    SUBCASE("amplitudes and relative phase") {
        CHECK(std::abs(st.amp0) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-14));
        CHECK(std::abs(st.amp1) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-14));
        CHECK(st.relative_phase == 2.0 * kSwapDefocus.beta * kSwapA * kSwapL);
        double arg_diff = std::remainder(std::arg(st.amp1) - std::arg(st.amp0) -
                                             st.relative_phase,
                                         2.0 * std::numbers::pi);
        CHECK(std::abs(arg_diff) < 1e-9);
    }
    SUBCASE("momentum labels obey the spacing identity") {
        CHECK(st.p_pp - st.p_pm == doctest::Approx(kSwapDefocus.beta * kSwapA).epsilon(1e-14));
        CHECK(st.basis_spacing == doctest::Approx(kSwapDefocus.beta * kSwapA).epsilon(1e-14));
        CHECK(st.p_pp == doctest::Approx(kSwapDefocus.beta * (kSwapL + kSwapA) / 2.0));
        CHECK(st.p_mm == doctest::Approx(-kSwapDefocus.beta * (kSwapL + kSwapA) / 2.0));
    }
    SUBCASE("margins are all comfortable") {
        for (const auto& [name, margin] : approx.report.items()) {
            INFO(name);
            CHECK(margin >= 10.0);
        }
        CHECK(approx.report.all_valid());
        CHECK_FALSE(approx.degenerate);
    }
    SUBCASE("vanishing separation degenerates the qubit") {
        auto flat = qubit_approximation(0.0, kSwapL, kSwapDelta, kSwapY, kSwapDefocus);
        CHECK(flat.degenerate);
        CHECK(flat.state.relative_phase == 0.0);
        CHECK(flat.state.p_pp == flat.state.p_pm);
    }
}

TEST_CASE("qubit overlap with the exact conditional state exceeds 0.95") {
    auto approx = qubit_approximation(kSwapA, kSwapL, kSwapDelta, kSwapY, kSwapDefocus);
    REQUIRE(approx.report.all_valid());
    ConditionalState exact = conditional_state(kSwapA, kSwapDefocus);
    double overlap = qubit_overlap(approx, exact);
    CHECK(overlap >= 0.95);
    CHECK(overlap <= 1.0 + 1e-9);
}

TEST_CASE("slm diffraction coefficients") {
    SUBCASE("zero depth is the identity") {
        CHECK(slm_order_coefficient(0, 0.0) == cplx(1.0, 0.0));
        for (int n = 1; n <= 5; ++n) {
            CHECK(std::abs(slm_order_coefficient(n, 0.0)) == 0.0);
            CHECK(std::abs(slm_order_coefficient(-n, 0.0)) == 0.0);
        }
    }
    SUBCASE("matches the power-series oracle to 1e-10") {
        for (double eps : {0.3, 0.5, 1.3}) {
            for (int n = -6; n <= 6; ++n) {
                cplx got = slm_order_coefficient(n, eps);
                double jn = testing::bessel_series(n, eps);
                static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                cplx expect = i_pow[((n % 4) + 4) % 4] * jn;
                CHECK(std::abs(got - expect) < 1e-10);
            }
        }
    }
    SUBCASE("even in the order") {
        for (int n = 1; n <= 6; ++n) {
            CHECK(std::abs(slm_order_coefficient(n, 0.7) - slm_order_coefficient(-n, 0.7)) <
                  1e-15);
        }
    }
    SUBCASE("orders carry unit total probability") {
        double total = 0.0;
        for (int n = -40; n <= 40; ++n) {
            total += std::norm(slm_order_coefficient(n, 1.1));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("truncation mass decreases monotonically with the cut") {
        double eps = 0.9;
        double previous = 1.0;
        for (int cut = 1; cut <= 8; ++cut) {
            double mass = 1.0;
            for (int n = -cut; n <= cut; ++n) {
                mass -= std::norm(slm_order_coefficient(n, eps));
            }
            CHECK(mass < previous);
            CHECK(mass > -1e-12);
            previous = mass;
        }
    }
}

TEST_CASE("slm transform of a two-momentum superposition") {
    TomographySetting setting{0.4, 0.9, 0.15};
    cplx amp_p(0.6, 0.1), amp_pk(0.2, -0.7);

    SUBCASE("zero depth keeps the pair") {
        TomographySetting off{0.0, 0.3, 0.15};
        auto out = slm_transform(1.0, amp_p, amp_pk, off, 3);
        for (const auto& item : out) {
            if (std::abs(item.momentum - 1.0) < 1e-12) {
                CHECK(std::abs(item.amplitude - amp_p) < 1e-14);
            } else if (std::abs(item.momentum - 1.15) < 1e-12) {
                CHECK(std::abs(item.amplitude - amp_pk) < 1e-14);
            } else {
                CHECK(std::abs(item.amplitude) == 0.0);
            }
        }
    }
    SUBCASE("small depth reproduces the first-order coefficients") {
        double eps = 1e-4;
        TomographySetting weak{eps, 0.9, 0.15};
        auto out = slm_transform(1.0, 1.0, 0.0, weak, 2);
        for (const auto& item : out) {
            int m = int(std::lround((item.momentum - 1.0) / 0.15));
            cplx expect{};
            if (m == 0) {
                expect = 1.0;
            } else if (m == -1) {
                expect = cplx(0.0, eps / 2.0) * std::polar(1.0, weak.theta);
            } else if (m == 1) {
                expect = cplx(0.0, eps / 2.0) * std::polar(1.0, -weak.theta);
            }
            CHECK(std::abs(item.amplitude - expect) < 1e-8);
        }
    }
    SUBCASE("rejects an order cut below 1") {
        CHECK_THROWS_AS(slm_transform(1.0, amp_p, amp_pk, setting, 0), std::invalid_argument);
    }
}

TEST_CASE("far-field probabilities") {
    auto approx = qubit_approximation(kSwapA, kSwapL, kSwapDelta, kSwapY, kSwapDefocus);
    const TwoQubitState& st = approx.state;
    double k_slm = st.basis_spacing;

    SUBCASE("computational basis at zero depth") {
        FarFieldTable table = far_field_probs(st, {0.0, 0.0, k_slm}, {0.0, 0.0, k_slm}, 4);
        for (const auto& spot : table.spots) {
            double expect = 0.0;
            if (spot.order_b == 0 && spot.order_bp == 0) {
                expect = std::norm(st.amp0);
            } else if (spot.order_b == 1 && spot.order_bp == -1) {
                expect = std::norm(st.amp1);
            }
            CHECK(spot.probability == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK(std::abs(table.truncation_mass) < 1e-12);
    }
    SUBCASE("theta sweep interferes as a cosine") {
        double eps = 0.5;
        double j0 = testing::bessel_series(0, eps), j1 = testing::bessel_series(1, eps);
        for (double theta = 0.0; theta < 6.3; theta += 0.35) {
            FarFieldTable table =
                far_field_probs(st, {eps, theta, k_slm}, {eps, 0.0, k_slm}, 8);
            // the spot pair (|1> position, |0> position) interferes between
            // the two state branches with visibility given by the first two
            // grating orders
            double expect = j0 * j0 * j1 * j1 * (1.0 + std::cos(st.relative_phase + theta));
            for (const auto& spot : table.spots) {
                if (spot.order_b == 1 && spot.order_bp == 0) {
                    CHECK(spot.probability == doctest::Approx(expect).epsilon(1e-10));
                }
            }
        }
    }
    SUBCASE("ladder probabilities sum to one minus the truncation mass") {
        FarFieldTable table = far_field_probs(st, {0.5, 1.1, k_slm}, {0.5, 0.4, k_slm}, 12);
        double total = 0.0;
        for (const auto& spot : table.spots) {
            CHECK(spot.probability >= 0.0);
            total += spot.probability;
        }
        CHECK(std::abs(total + table.truncation_mass - 1.0) < 1e-12);
        CHECK(std::abs(table.truncation_mass) < 1e-9);
    }
    SUBCASE("grating wavenumber must match the basis spacing") {
        CHECK_THROWS_AS(far_field_probs(st, {0.5, 0.0, 2.0 * k_slm}, {0.5, 0.0, k_slm}, 4),
                        std::invalid_argument);
    }
}

TEST_CASE("tomography loop") {
    auto approx = qubit_approximation(kSwapA, kSwapL, kSwapDelta, kSwapY, kSwapDefocus);
    const TwoQubitState& st = approx.state;
    double k_slm = st.basis_spacing;
    double eps = 0.5;
    std::vector<double> thetas = {0.0, 2.0 * std::numbers::pi / 3.0,
                                  4.0 * std::numbers::pi / 3.0};

    auto make_tables = [&](const TwoQubitState& state) {
        std::vector<FarFieldTable> tables;
        tables.push_back(far_field_probs(state, {0.0, 0.0, k_slm}, {0.0, 0.0, k_slm}, 6));
        for (double tb : thetas) {
            for (double tbp : thetas) {
                tables.push_back(
                    far_field_probs(state, {eps, tb, k_slm}, {eps, tbp, k_slm}, 6));
            }
        }
        return tables;
    };

    SUBCASE("noiseless reconstruction is faithful and entangled") {
        TomographyResult result = reconstruct(st, make_tables(st));
        CHECK(result.fidelity >= 0.999);
        CHECK(result.concurrence >= 0.99);
    }
    SUBCASE("reconstruction reproduces the measurement tables") {
        auto tables = make_tables(st);
        TomographyResult result = reconstruct(st, tables);
        for (const auto& table : tables) {
            FarFieldTable redo = far_field_probs_from_density(result.rho, st, table.setting_b,
                                                              table.setting_bp, 6);
            REQUIRE(redo.spots.size() == table.spots.size());
            for (std::size_t i = 0; i < redo.spots.size(); ++i) {
                CHECK(std::abs(redo.spots[i].probability - table.spots[i].probability) < 1e-8);
            }
        }
    }
    SUBCASE("product state reconstructs with zero concurrence") {
        TwoQubitState product = st;
        product.amp0 = 1.0;
        product.amp1 = 0.0;
        TomographyResult result = reconstruct(product, make_tables(product));
        CHECK(result.fidelity >= 0.999);
        CHECK(result.concurrence <= 1e-6);
    }
    SUBCASE("computational-only settings are rank deficient") {
        std::vector<FarFieldTable> tables;
        tables.push_back(far_field_probs(st, {0.0, 0.0, k_slm}, {0.0, 0.0, k_slm}, 6));
        CHECK_THROWS_AS(reconstruct(st, tables), ConfigError);
    }
}
