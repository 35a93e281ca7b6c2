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

#include "qimcorr/rng.hpp"

#include <cmath>
#include <numbers>

namespace qimcorr {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    std::uint64_t prod0 = std::uint64_t(kMul0) * x[0];
    std::uint64_t prod1 = std::uint64_t(kMul1) * x[2];
    std::uint32_t hi0 = std::uint32_t(prod0 >> 32);
    std::uint32_t lo0 = std::uint32_t(prod0);
    std::uint32_t hi1 = std::uint32_t(prod1 >> 32);
    std::uint32_t lo1 = std::uint32_t(prod1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        round_once(counter, key);
    }
    return counter;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      stream_{std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

void CounterRng::refill() {
    buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), stream_[0], stream_[1]},
                      key_);
    ++block_;
    buf_pos_ = 0;
}

double CounterRng::uniform() {
    if (buf_pos_ >= 4) {
        refill();
    }
    std::uint32_t raw = buf_[buf_pos_++];
    return (double(raw) + 0.5) * 0x1.0p-32;
}

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

std::complex<double> CounterRng::vacuum_sample() {
    // variance 1/4 per quadrature, so <|c|^2> = 1/2
    return {0.5 * normal(), 0.5 * normal()};
}

}  // namespace qimcorr
