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

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qimcorr {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("FftPlan: size must be a power of two");
    }
    bitrev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t(1) << log2n) < n) {
        ++log2n;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t bit = 0; bit < log2n; ++bit) {
            r |= ((i >> bit) & 1u) << (log2n - 1 - bit);
        }
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double phase = -2.0 * std::numbers::pi * double(k) / double(n);
        twiddle_[k] = cplx(std::cos(phase), std::sin(phase));
    }
}

void FftPlan::transform(cplx* data, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t j = bitrev_[i];
        if (j > i) {
            std::swap(data[i], data[j]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        std::size_t half = len >> 1;
        std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = twiddle_[k * stride];
                if (inverse) {
                    w = std::conj(w);
                }
                cplx even = data[start + k];
                cplx odd = data[start + k + half] * w;
                data[start + k] = even + odd;
                data[start + k + half] = even - odd;
            }
        }
    }
}

Fft2D::Fft2D(std::size_t n) : n_(n), plan_(n) {}

void Fft2D::run(std::vector<cplx>& grid, bool inverse) const {
    if (grid.size() != n_ * n_) {
        throw std::invalid_argument("Fft2D: grid size mismatch");
    }
    for (std::size_t row = 0; row < n_; ++row) {
        cplx* p = grid.data() + row * n_;
        inverse ? plan_.inverse(p) : plan_.forward(p);
    }
    std::vector<cplx> col(n_);
    for (std::size_t c = 0; c < n_; ++c) {
        for (std::size_t r = 0; r < n_; ++r) {
            col[r] = grid[r * n_ + c];
        }
        inverse ? plan_.inverse(col.data()) : plan_.forward(col.data());
        for (std::size_t r = 0; r < n_; ++r) {
            grid[r * n_ + c] = col[r];
        }
    }
    double scale = 1.0 / double(n_);
    for (auto& v : grid) {
        v *= scale;
    }
}

void Fft2D::forward(std::vector<cplx>& grid) const {
    run(grid, false);
}

void Fft2D::inverse(std::vector<cplx>& grid) const {
    run(grid, true);
}

}  // namespace qimcorr
