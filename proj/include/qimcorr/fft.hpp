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

#include <complex>
#include <cstddef>
#include <vector>

namespace qimcorr {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// Radix-2 FFT plan for one power-of-two size. Twiddles and the bit-reversal
/// table are precomputed at construction; a plan is immutable afterwards and
/// safe to share between threads.
///
/// Forward uses the e^{-2*pi*i*jk/n} kernel; neither direction is scaled.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const { return n_; }

    void forward(cplx* data) const { transform(data, false); }
    void inverse(cplx* data) const { transform(data, true); }

  private:
    void transform(cplx* data, bool inverse) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddle_;  // e^{-2*pi*i*k/n}, k < n/2
};

/// Unitary 2D FFT on an n-by-n row-major grid (scale 1/n per direction).
/// With the unitary scaling a white field keeps its per-mode variance in
/// both representations.
class Fft2D {
  public:
    explicit Fft2D(std::size_t n);

    std::size_t size() const { return n_; }

    void forward(std::vector<cplx>& grid) const;
    void inverse(std::vector<cplx>& grid) const;

  private:
    void run(std::vector<cplx>& grid, bool inverse) const;

    std::size_t n_;
    FftPlan plan_;
};

}  // namespace qimcorr
