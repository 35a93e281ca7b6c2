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

#include "qimcorr/biphoton.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qimcorr {

void SourceParams::validate() const {
    if (!(w0 > 0.0) || !(b > 0.0) || !(k > 0.0)) {
        throw std::invalid_argument("SourceParams: w0, b and k must be positive");
    }
    if (!(z >= 0.0) || !(z_prime >= 0.0)) {
        throw std::invalid_argument("SourceParams: propagation distances must be nonnegative");
    }
}

void DefocusParams::validate() const {
    if (!(alpha > 0.0) || !(beta >= 0.0) || !(big_z >= 0.0) || !(schmidt_k >= 1.0)) {
        throw std::invalid_argument("DefocusParams: out of range");
    }
}

DefocusParams derive_defocus(const SourceParams& p) {
    p.validate();
    DefocusParams d;
    d.big_z = p.b * p.b * (p.z + p.z_prime) / (2.0 * p.k);
    d.alpha = p.b * p.b / (1.0 + d.big_z * d.big_z);
    d.beta = d.alpha * d.big_z;
    double bw = p.b * p.w0;
    d.schmidt_k = 0.25 * (bw + 1.0 / bw) * (bw + 1.0 / bw);
    return d;
}

cplx phi_near(TransversePoint x, TransversePoint xp, const SourceParams& p) {
    double sum2 = norm2(x + xp);
    double diff2 = norm2(x - xp);
    return std::exp(-sum2 / (4.0 * p.w0 * p.w0) - p.b * p.b * diff2 / 4.0);
}

cplx phi_far(TransversePoint mom, TransversePoint momp, const SourceParams& p) {
    double sum2 = norm2(mom + momp);
    double diff2 = norm2(mom - momp);
    return std::exp(-p.w0 * p.w0 * sum2 / 4.0 - diff2 / (4.0 * p.b * p.b));
}

cplx phi_defocused_momentum(TransversePoint mom, TransversePoint momp, const SourceParams& p) {
    double phase = -p.z * norm2(mom) / (2.0 * p.k) - p.z_prime * norm2(momp) / (2.0 * p.k);
    return phi_far(mom, momp, p) * std::polar(1.0, phase);
}

cplx phi_defocused_position(TransversePoint x, TransversePoint xp, const DefocusParams& d) {
    double diff2 = norm2(x - xp);
    return std::exp(cplx(-d.alpha, d.beta) * (diff2 / 4.0));
}

RadialProfile gaussian_profile(double b, double support_sigmas) {
    if (!(b > 0.0)) {
        throw std::invalid_argument("gaussian_profile: b must be positive");
    }
    RadialProfile f;
    f.envelope = [b](TransversePoint mom) -> cplx { return std::exp(-norm2(mom) / (b * b)); };
    f.support_radius = support_sigmas * b;
    return f;
}

SaddleValue phi_saddle(TransversePoint x, TransversePoint xp, const RadialProfile& f,
                       double z_sum, double k) {
    if (!(z_sum > 0.0) || !(k > 0.0)) {
        throw std::invalid_argument("phi_saddle: z_sum and k must be positive");
    }
    SaddleValue out;
    TransversePoint diff = x - xp;
    TransversePoint saddle = (k / z_sum) * diff;
    out.value = f.envelope(saddle) * std::polar(1.0, k * norm2(diff) / (2.0 * z_sum));
    // validity requires the quadratic phase to wind over the envelope image:
    // the support |p| <= P maps to |x-x'| <= P z_sum / k, where the phase is
    // P^2 z_sum / (2k).
    out.phase_span = f.support_radius * f.support_radius * z_sum / (2.0 * k);
    out.valid = out.phase_span >= 4.0 * std::numbers::pi;
    return out;
}

BiphotonFn near_field_fn(const SourceParams& p) {
    p.validate();
    return [p](TransversePoint x, TransversePoint xp) { return phi_near(x, xp, p); };
}

BiphotonFn defocused_position_fn(const DefocusParams& d) {
    d.validate();
    return [d](TransversePoint x, TransversePoint xp) { return phi_defocused_position(x, xp, d); };
}

}  // namespace qimcorr
