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

#include "qimcorr/permanent.hpp"

#include <doctest.h>

#include <random>

#include "qimcorr/errors.hpp"

using namespace qimcorr;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::mt19937& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexMatrix m = ComplexMatrix::zero(n);
    for (auto& v : m.entries) {
        v = cplx(dist(gen), dist(gen));
    }
    return m;
}

}  // namespace

TEST_CASE("permanent closed cases") {
    ComplexMatrix one = ComplexMatrix::zero(1);
    one.at(0, 0) = cplx(2.5, -1.0);
    CHECK(permanent(one) == cplx(2.5, -1.0));

    ComplexMatrix two = ComplexMatrix::zero(2);
    two.at(0, 0) = 1.0;
    two.at(0, 1) = 2.0;
    two.at(1, 0) = 3.0;
    two.at(1, 1) = 4.0;
    CHECK(std::abs(permanent(two) - cplx(10.0, 0.0)) < 1e-14);

    ComplexMatrix ones = ComplexMatrix::zero(3);
    for (auto& v : ones.entries) {
        v = 1.0;
    }
    CHECK(std::abs(permanent(ones) - cplx(6.0, 0.0)) < 1e-13);
}

TEST_CASE("gray-code permanent agrees with the permutation enumeration") {
    std::mt19937 gen(99);
    for (std::size_t n : {2u, 3u, 5u, 7u}) {
        for (int rep = 0; rep < 8; ++rep) {
            ComplexMatrix m = random_matrix(n, gen);
            cplx fast = permanent(m);
            cplx slow = permanent_by_permutations(m);
            CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("permanent algebraic properties") {
    std::mt19937 gen(5);
    ComplexMatrix m = random_matrix(5, gen);
    cplx base = permanent(m);

    SUBCASE("multilinearity in a row") {
        ComplexMatrix scaled = m;
        cplx factor(0.7, -1.3);
        for (std::size_t j = 0; j < scaled.n; ++j) {
            scaled.at(2, j) *= factor;
        }
        CHECK(std::abs(permanent(scaled) - factor * base) < 1e-12 * std::abs(base));
    }
    SUBCASE("transpose invariance") {
        ComplexMatrix t = ComplexMatrix::zero(m.n);
        for (std::size_t i = 0; i < m.n; ++i) {
            for (std::size_t j = 0; j < m.n; ++j) {
                t.at(j, i) = m.at(i, j);
            }
        }
        CHECK(std::abs(permanent(t) - base) < 1e-12 * std::abs(base));
    }
    SUBCASE("row permutation invariance") {
        ComplexMatrix swapped = m;
        for (std::size_t j = 0; j < m.n; ++j) {
            std::swap(swapped.at(0, j), swapped.at(3, j));
        }
        CHECK(std::abs(permanent(swapped) - base) < 1e-12 * std::abs(base));
    }
}

TEST_CASE("permanent guards") {
    CHECK_THROWS_AS(permanent(ComplexMatrix::zero(25)), NumericGuardError);
    CHECK_THROWS_AS(permanent_by_permutations(ComplexMatrix::zero(8)), NumericGuardError);
    CHECK_THROWS_AS(permanent(ComplexMatrix::zero(0)), std::invalid_argument);
    ComplexMatrix bad = ComplexMatrix::zero(2);
    bad.at(0, 0) = cplx(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(permanent(bad), std::invalid_argument);
}

TEST_CASE("detection pattern validation") {
    DetectionPattern p;
    p.alice = {{0, 0}, {1, 0}};
    p.bob = {{0, 1}};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.bob = {{0, 1}, {0, 1}};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.bob = {{0, 1}, {2, 1}};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("joint probability basics") {
    DefocusParams d{0.08, 0.2, 2.5, 40.0};
    BiphotonFn phi = defocused_position_fn(d);

    SUBCASE("single pair reduces to the squared amplitude") {
        DetectionPattern p{{{1.0, 2.0}}, {{-0.5, 0.7}}};
        double expect = std::norm(phi_defocused_position({1.0, 2.0}, {-0.5, 0.7}, d));
        CHECK(joint_probability(p, phi) == doctest::Approx(expect).epsilon(1e-13));
    }
    SUBCASE("two pairs expand into the two pairings") {
        DetectionPattern p{{{1.0, 0.0}, {-1.0, 0.5}}, {{0.3, 0.1}, {0.8, -0.2}}};
        cplx direct = phi(p.alice[0], p.bob[0]) * phi(p.alice[1], p.bob[1]);
        cplx exchanged = phi(p.alice[0], p.bob[1]) * phi(p.alice[1], p.bob[0]);
        CHECK(joint_probability(p, phi) ==
              doctest::Approx(std::norm(direct + exchanged)).epsilon(1e-13));
    }
    SUBCASE("bosonic relabeling invariance") {
        std::mt19937 gen(31);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        DetectionPattern p;
        for (int i = 0; i < 3; ++i) {
            p.alice.push_back({dist(gen), dist(gen)});
            p.bob.push_back({dist(gen), dist(gen)});
        }
        double base = joint_probability(p, phi);
        DetectionPattern swapped_alice = p;
        std::swap(swapped_alice.alice[0], swapped_alice.alice[2]);
        CHECK(joint_probability(swapped_alice, phi) == doctest::Approx(base).epsilon(1e-12));
        DetectionPattern swapped_bob = p;
        std::swap(swapped_bob.bob[1], swapped_bob.bob[2]);
        CHECK(joint_probability(swapped_bob, phi) == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("coincident alice points bunch") {
        // |Perm|^2 with x1 = x2 equals 4 |phi(x, x1') phi(x, x2')|^2; the
        // pattern type forbids the duplicate, so expand by hand
        TransversePoint x{0.4, -0.3}, b1{1.0, 0.2}, b2{-0.6, 0.9};
        cplx direct = phi(x, b1) * phi(x, b2);
        double expect = 4.0 * std::norm(direct);
        ComplexMatrix m = ComplexMatrix::zero(2);
        m.at(0, 0) = phi(x, b1);
        m.at(0, 1) = phi(x, b2);
        m.at(1, 0) = phi(x, b1);
        m.at(1, 1) = phi(x, b2);
        CHECK(std::norm(permanent(m)) == doctest::Approx(expect).epsilon(1e-13));
    }
}
