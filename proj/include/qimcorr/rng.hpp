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

#include <array>
#include <complex>
#include <cstdint>

namespace qimcorr {

/// Philox4x32-10 keyed counter permutation. Every output block is a pure
/// function of (key, counter), which is what makes per-shot streams
/// reproducible regardless of how shots are scheduled across workers.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Deterministic random stream addressed by (seed, stream). Draws advance a
/// 64-bit block counter inside the stream; distinct streams never collide.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    /// Uniform in the open interval (0, 1).
    double uniform();

    /// Standard normal via Box-Muller.
    double normal();

    /// Circular complex Gaussian with <|c|^2> = 1/2 (vacuum half photon).
    std::complex<double> vacuum_sample();

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qimcorr
