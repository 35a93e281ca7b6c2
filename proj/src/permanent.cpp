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

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qimcorr/errors.hpp"

namespace qimcorr {

void DetectionPattern::validate() const {
    if (alice.empty() || alice.size() != bob.size()) {
        throw std::invalid_argument("DetectionPattern: need equal, nonzero photon counts");
    }
    auto has_duplicate = [](const std::vector<TransversePoint>& pts) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if (pts[i] == pts[j]) {
                    return true;
                }
            }
        }
        return false;
    };
    if (has_duplicate(alice) || has_duplicate(bob)) {
        throw std::invalid_argument("DetectionPattern: duplicated pixel within one camera");
    }
}

ComplexMatrix ComplexMatrix::zero(std::size_t n) {
    ComplexMatrix m;
    m.n = n;
    m.entries.assign(n * n, cplx(0.0, 0.0));
    return m;
}

ComplexMatrix ComplexMatrix::from_pattern(const DetectionPattern& pattern, const BiphotonFn& phi) {
    pattern.validate();
    std::size_t n = pattern.order();
    ComplexMatrix m = ComplexMatrix::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m.at(i, j) = phi(pattern.alice[i], pattern.bob[j]);
        }
    }
    return m;
}

void ComplexMatrix::validate() const {
    if (n == 0 || entries.size() != n * n) {
        throw std::invalid_argument("ComplexMatrix: order must be >= 1 and storage consistent");
    }
    for (const cplx& v : entries) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::invalid_argument("ComplexMatrix: entries must be finite");
        }
    }
}

cplx permanent(const ComplexMatrix& m) {
    m.validate();
    std::size_t n = m.n;
    if (n > kPermanentOrderGuard) {
        throw NumericGuardError("permanent: order exceeds the 2^n cost guard (n <= 24)");
    }
    if (n == 1) {
        return m.at(0, 0);
    }
    // Ryser: perm(A) = (-1)^n sum_{S != empty} (-1)^{|S|} prod_j sum_{i in S} A_{ij}.
    // Subsets are visited in Gray-code order so each step updates the column
    // sums with a single row.
    std::vector<cplx> colsum(n, cplx(0.0, 0.0));
    cplx total(0.0, 0.0);
    std::uint64_t prev_gray = 0;
    const std::uint64_t subsets = std::uint64_t(1) << n;
    for (std::uint64_t index = 1; index < subsets; ++index) {
        std::uint64_t gray = index ^ (index >> 1);
        std::uint64_t changed = gray ^ prev_gray;
        int row = std::countr_zero(changed);
        double sign_flip = (gray & changed) ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            colsum[j] += sign_flip * m.at(std::size_t(row), j);
        }
        cplx prod(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            prod *= colsum[j];
        }
        int popcount = std::popcount(gray);
        double subset_sign = (popcount % 2 == 0) ? 1.0 : -1.0;
        total += subset_sign * prod;
        prev_gray = gray;
    }
    double outer_sign = (n % 2 == 0) ? 1.0 : -1.0;
    return outer_sign * total;
}

cplx permanent_by_permutations(const ComplexMatrix& m) {
    m.validate();
    std::size_t n = m.n;
    if (n > kPermanentReferenceGuard) {
        throw NumericGuardError("permanent_by_permutations: n! enumeration limited to n <= 7");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    cplx total(0.0, 0.0);
    do {
        cplx prod(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            prod *= m.at(i, perm[i]);
        }
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

double joint_probability(const DetectionPattern& pattern, const BiphotonFn& phi) {
    cplx amp = permanent(ComplexMatrix::from_pattern(pattern, phi));
    return std::norm(amp);
}

}  // namespace qimcorr
