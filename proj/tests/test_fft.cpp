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

#include "qimcorr/fft.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace qimcorr;

TEST_CASE("radix-2 fft matches the naive dft") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t n : {2u, 8u, 64u}) {
        std::vector<cplx> data(n);
        for (auto& v : data) {
            v = cplx(dist(gen), dist(gen));
        }
        std::vector<cplx> expect = testing::naive_dft(data, false);
        FftPlan plan(n);
        std::vector<cplx> got = data;
        plan.forward(got.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(got[i] - expect[i]) < 1e-11);
        }
        std::vector<cplx> back = got;
        plan.inverse(back.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(back[i] / double(n) - data[i]) < 1e-12);
        }
    }
}

TEST_CASE("fft rejects non power of two sizes") {
    CHECK_THROWS_AS(FftPlan(12), std::invalid_argument);
    CHECK(is_power_of_two(16));
    CHECK_FALSE(is_power_of_two(0));
    CHECK_FALSE(is_power_of_two(24));
}

TEST_CASE("unitary 2d fft conserves energy and round-trips") {
    std::mt19937 gen(21);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::size_t n = 16;
    std::vector<cplx> grid(n * n);
    for (auto& v : grid) {
        v = cplx(dist(gen), dist(gen));
    }
    std::vector<cplx> original = grid;
    double energy_before = 0.0;
    for (const auto& v : grid) {
        energy_before += std::norm(v);
    }
    Fft2D fft(n);
    fft.forward(grid);
    double energy_after = 0.0;
    for (const auto& v : grid) {
        energy_after += std::norm(v);
    }
    CHECK(energy_after == doctest::Approx(energy_before).epsilon(1e-12));
    fft.inverse(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(grid[i] - original[i]) < 1e-12);
    }
}

TEST_CASE("continuous transform oracle reproduces the gaussian pair") {
    // exp(-x^2/(2 s^2)) <-> s sqrt(2 pi) exp(-s^2 p^2 / 2), checked in 2D
    double s = 0.8;
    auto f = [s](double x, double y) -> cplx {
        return std::exp(-(x * x + y * y) / (2.0 * s * s));
    };
    auto ft = testing::continuous_ft_2d(f, 10.0, 128, false);
    double scale = 2.0 * std::numbers::pi * s * s;
    for (std::size_t m1 = 40; m1 < 90; m1 += 7) {
        for (std::size_t m2 = 40; m2 < 90; m2 += 7) {
            double p = ft.coord(m1), q = ft.coord(m2);
            double expect = scale * std::exp(-s * s * (p * p + q * q) / 2.0);
            CHECK(std::abs(ft.at(m1, m2) - cplx(expect, 0.0)) < 1e-10 * scale);
        }
    }
}
