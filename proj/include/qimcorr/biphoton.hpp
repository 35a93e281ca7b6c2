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
#include <functional>

#include "qimcorr/fft.hpp"

namespace qimcorr {

/// A point on a transverse detection plane (um). Also reused for transverse
/// momenta (1/um); the role is fixed by context.
struct TransversePoint {
    double x = 0.0;
    double y = 0.0;
};

inline TransversePoint operator+(TransversePoint a, TransversePoint b) {
    return {a.x + b.x, a.y + b.y};
}
inline TransversePoint operator-(TransversePoint a, TransversePoint b) {
    return {a.x - b.x, a.y - b.y};
}
inline TransversePoint operator*(double s, TransversePoint a) {
    return {s * a.x, s * a.y};
}
inline double dot(TransversePoint a, TransversePoint b) {
    return a.x * b.x + a.y * b.y;
}
inline double norm2(TransversePoint a) {
    return a.x * a.x + a.y * a.y;
}
inline bool operator==(TransversePoint a, TransversePoint b) {
    return a.x == b.x && a.y == b.y;
}

/// Physical parameters of the SPDC source and detection geometry.
/// All lengths in um, all wavenumbers in 1/um.
struct SourceParams {
    double w0 = 200.0;     ///< pump beam waist
    double b = 0.55;       ///< inverse transverse width of pair creation
    double k = 15.125;     ///< longitudinal wavenumber of signal and idler
    double z = 0.0;        ///< Alice propagation distance
    double z_prime = 0.0;  ///< Bob propagation distance

    void validate() const;  // throws std::invalid_argument on bad values
};

/// Defocus parameters derived from a SourceParams in the translation
/// invariant (wide pump) limit:
///   Z = b^2 (z + z') / (2k),  alpha = b^2/(1+Z^2),  beta = b^2 Z/(1+Z^2).
struct DefocusParams {
    double alpha = 0.0;      ///< 1/um^2, modulus width of the joint amplitude
    double beta = 0.0;       ///< 1/um^2, quadratic phase curvature
    double big_z = 0.0;      ///< dimensionless defocus strength
    double schmidt_k = 1.0;  ///< Schmidt number (b w0 + 1/(b w0))^2 / 4

    void validate() const;
};

DefocusParams derive_defocus(const SourceParams& p);

/// Joint amplitude at the crystal surface,
/// exp(-|x+x'|^2/(4 w0^2) - b^2 |x-x'|^2 / 4), unit prefactor.
cplx phi_near(TransversePoint x, TransversePoint xp, const SourceParams& p);

/// Far-field joint amplitude, exp(-w0^2 |p+p'|^2/4 - |p-p'|^2/(4 b^2)).
cplx phi_far(TransversePoint mom, TransversePoint momp, const SourceParams& p);

/// Far-field amplitude after free propagation over z (Alice) and z' (Bob):
/// phi_far times exp(-i z |p|^2/(2k) - i z' |p'|^2/(2k)).
cplx phi_defocused_momentum(TransversePoint mom, TransversePoint momp, const SourceParams& p);

/// Defocused position-space amplitude in the wide-pump limit,
/// exp(-(alpha - i beta) |x-x'|^2 / 4).
cplx phi_defocused_position(TransversePoint x, TransversePoint xp, const DefocusParams& d);

/// Slowly varying complex envelope of the translation invariant biphoton in
/// momentum space, with its declared support radius (1/um).
struct RadialProfile {
    std::function<cplx(TransversePoint)> envelope;
    double support_radius = 0.0;
};

/// The Gaussian envelope exp(-|p|^2 / b^2) that reproduces the wide-pump
/// limit of phi_far on the p' = -p diagonal. Support radius is declared at
/// `support_sigmas` envelope widths.
RadialProfile gaussian_profile(double b, double support_sigmas = 3.0);

struct SaddleValue {
    cplx value{};
    /// True when the quadratic phase sweeps at least 4*pi over the image of
    /// the envelope support, i.e. phase_span >= 4*pi.
    bool valid = false;
    double phase_span = 0.0;
};

/// Stationary-phase form of the strongly defocused biphoton:
///   f(k (x-x') / z_sum) * exp(i k |x-x'|^2 / (2 z_sum)).
/// Out-of-validity inputs are flagged, not refused.
SaddleValue phi_saddle(TransversePoint x, TransversePoint xp, const RadialProfile& f,
                       double z_sum, double k);

/// Type-erased joint amplitude, used by the permanent engine.
using BiphotonFn = std::function<cplx(TransversePoint, TransversePoint)>;

BiphotonFn near_field_fn(const SourceParams& p);
BiphotonFn defocused_position_fn(const DefocusParams& d);

}  // namespace qimcorr
