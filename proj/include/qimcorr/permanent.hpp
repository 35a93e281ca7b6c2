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

#include <cstddef>
#include <vector>

#include "qimcorr/biphoton.hpp"

namespace qimcorr {

/// Ordered multiphoton detection event: n pixels on Alice's camera and n on
/// Bob's. Two photons on the same pixel of one camera are excluded.
struct DetectionPattern {
    std::vector<TransversePoint> alice;
    std::vector<TransversePoint> bob;

    std::size_t order() const { return alice.size(); }
    void validate() const;  // throws std::invalid_argument
};

/// Dense n-by-n complex matrix, row-major. Entry (i, j) holds the joint
/// amplitude for Alice pixel i paired with Bob pixel j.
struct ComplexMatrix {
    std::size_t n = 0;
    std::vector<cplx> entries;

    static ComplexMatrix zero(std::size_t n);
    static ComplexMatrix from_pattern(const DetectionPattern& pattern, const BiphotonFn& phi);

    cplx& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }

    void validate() const;  // n >= 1 and finite entries
};

/// Largest matrix order accepted by `permanent`. 2^24 subset updates stay in
/// the seconds range on one core.
inline constexpr std::size_t kPermanentOrderGuard = 24;

/// Largest order accepted by the reference enumeration (n! terms).
inline constexpr std::size_t kPermanentReferenceGuard = 7;

/// Permanent via Ryser's formula walked in Gray-code subset order,
/// O(2^n n). Throws NumericGuardError above kPermanentOrderGuard.
cplx permanent(const ComplexMatrix& m);

/// Reference permanent by explicit sum over all n! permutations. Kept as the
/// independent cross-check route; throws NumericGuardError above
/// kPermanentReferenceGuard.
cplx permanent_by_permutations(const ComplexMatrix& m);

/// Unnormalized joint detection probability |Perm(Phi matrix)|^2 for the
/// given detection pattern and joint amplitude.
double joint_probability(const DetectionPattern& pattern, const BiphotonFn& phi);

}  // namespace qimcorr
