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
#include <vector>

#include "qimcorr/biphoton.hpp"

namespace qimcorr {

/// Bob's two-photon state conditioned on Alice detections at (+a, 0) and
/// (-a, 0): the symmetrized pairing sum of the defocused amplitude.
struct ConditionalState {
    double a = 0.0;
    DefocusParams defocus;

    cplx amplitude(TransversePoint x1p, TransversePoint x2p) const;
};

ConditionalState conditional_state(double a, const DefocusParams& defocus);

/// Margins for the approximations that turn the conditional state into a
/// two-qubit momentum state. Each margin is a dimensionless ratio; the
/// approximation direction is "margin large".
struct ValidityReport {
    double margin_defocus = 0.0;     ///< beta / alpha
    double margin_y = 0.0;           ///< 1 / (max(alpha, beta) y^2)
    double margin_alpha_terms = 0.0; ///< 1 / (alpha max(a^2, a l, l^2))
    double margin_delta = 0.0;       ///< 1 / (beta delta^2)
    double margin_beta_phase = 0.0;  ///< beta min(a^2, a l, l^2)

    static constexpr double kThreshold = 10.0;

    bool all_valid(double threshold = kThreshold) const;
    std::array<std::pair<const char*, double>, 5> items() const;
};

/// Post-selected two-qubit momentum state near the windows at (+l, 0) and
/// (-l, 0). Basis momenta of each window differ by beta*a; amplitudes sit on
/// |00> and |11> with relative phase 2 beta a l.
struct TwoQubitState {
    double window_center = 0.0;  ///< l (um)
    double separation = 0.0;     ///< a (um)
    /// Momentum labels s1*beta*l/2 + s2*beta*a/2 for signs (s1, s2).
    double p_pp = 0.0, p_pm = 0.0, p_mp = 0.0, p_mm = 0.0;
    /// Photon near +l uses basis (p_pm, p_pp); photon near -l uses
    /// (p_mp, p_mm). |0>|0> pairs (p_pm, p_mp); |1>|1> pairs (p_pp, p_mm).
    cplx amp0{}, amp1{};
    double relative_phase = 0.0;  ///< 2 beta a l, exactly
    double basis_spacing = 0.0;   ///< beta a, the SLM grating wavenumber

    std::array<cplx, 4> state_vector() const;  ///< {amp0, 0, 0, amp1}
};

struct QubitApproximation {
    TwoQubitState state;
    ValidityReport report;
    bool degenerate = false;  ///< a == 0 collapses the two basis momenta
    double delta = 0.0;       ///< window half width along x (um)
    double y_extent = 0.0;    ///< window half width along y (um)
};

QubitApproximation qubit_approximation(double a, double l, double delta, double y_extent,
                                       const DefocusParams& defocus);

/// Overlap |<qubit|phi>|^2 (both restricted to the windows and normalized)
/// between the two-qubit form and the exact conditional state, evaluated by
/// quadrature on the sector x1' near +l, x2' near -l.
double qubit_overlap(const QubitApproximation& approx, const ConditionalState& exact,
                     std::size_t quadrature_points = 257);

// ---------------------------------------------------------------------------
// SLM tomography
// ---------------------------------------------------------------------------

/// Periodic phase mask epsilon * cos(k_slm x + theta) written on the SLM.
struct TomographySetting {
    double epsilon = 0.5;  ///< phase depth (rad)
    double theta = 0.0;    ///< phase offset (rad)
    double k_slm = 0.0;    ///< grating wavenumber (1/um)
};

/// Diffraction-order coefficient a_n = i^n J_n(epsilon).
cplx slm_order_coefficient(int order, double epsilon);

struct MomentumAmplitude {
    double momentum = 0.0;
    cplx amplitude{};
};

/// Apply the mask to the superposition amp_p |p> + amp_pk |p + k_slm>.
/// Orders are truncated at |n| <= order_cut per input momentum; the listed
/// ladder covers p + m k for m in [-order_cut, order_cut + 1].
/// Throws std::invalid_argument for order_cut < 1.
std::vector<MomentumAmplitude> slm_transform(double p, cplx amp_p, cplx amp_pk,
                                             const TomographySetting& setting, int order_cut);

struct FarFieldSpot {
    int order_b = 0;    ///< ladder index on the +l window, 0 = |0> momentum
    int order_bp = 0;   ///< ladder index on the -l window
    double p_b = 0.0;   ///< spot momentum, +l window (1/um)
    double p_bp = 0.0;  ///< spot momentum, -l window
    double probability = 0.0;
};

struct FarFieldTable {
    TomographySetting setting_b, setting_bp;
    std::vector<FarFieldSpot> spots;
    double truncation_mass = 0.0;  ///< 1 - sum of listed probabilities
};

/// Joint far-field detection probabilities after per-window masks. Both
/// settings must use k_slm equal to the state's basis spacing beta*a.
FarFieldTable far_field_probs(const TwoQubitState& state, const TomographySetting& setting_b,
                              const TomographySetting& setting_bp, int order_cut = 8);

/// Probabilities the same measurement would give on an arbitrary two-qubit
/// density matrix (row-major 4x4, basis |00>, |01>, |10>, |11>).
FarFieldTable far_field_probs_from_density(const std::array<cplx, 16>& rho,
                                           const TwoQubitState& basis,
                                           const TomographySetting& setting_b,
                                           const TomographySetting& setting_bp,
                                           int order_cut = 8);

struct TomographyResult {
    std::array<cplx, 16> rho{};  ///< row-major, PSD, unit trace
    double fidelity = 0.0;       ///< against the ideal amp0|00> + amp1|11>
    double concurrence = 0.0;
};

/// Least-squares state reconstruction from far-field tables, projected onto
/// the closest PSD unit-trace matrix. Throws ConfigError when the settings
/// do not span a complete measurement set.
TomographyResult reconstruct(const TwoQubitState& ideal,
                             const std::vector<FarFieldTable>& tables);

}  // namespace qimcorr
