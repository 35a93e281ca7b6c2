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

#include "qimcorr/swap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qimcorr/errors.hpp"

namespace qimcorr {

namespace {

using Matrix4 = Eigen::Matrix<cplx, 4, 4, Eigen::RowMajor>;
using Vector4 = Eigen::Matrix<cplx, 4, 1>;

constexpr double kSqrtHalf = 0.70710678118654752440;

/// Simpson weights require an odd number of points.
double simpson_weight(std::size_t i, std::size_t n) {
    if (i == 0 || i == n - 1) {
        return 1.0;
    }
    return (i % 2 == 1) ? 4.0 : 2.0;
}

}  // namespace

cplx ConditionalState::amplitude(TransversePoint x1p, TransversePoint x2p) const {
    TransversePoint alice1{a, 0.0};
    TransversePoint alice2{-a, 0.0};
    return phi_defocused_position(alice1, x1p, defocus) *
               phi_defocused_position(alice2, x2p, defocus) +
           phi_defocused_position(alice1, x2p, defocus) *
               phi_defocused_position(alice2, x1p, defocus);
}

ConditionalState conditional_state(double a, const DefocusParams& defocus) {
    defocus.validate();
    return ConditionalState{a, defocus};
}

bool ValidityReport::all_valid(double threshold) const {
    for (const auto& [name, margin] : items()) {
        (void)name;
        if (!(margin >= threshold)) {
            return false;
        }
    }
    return true;
}

std::array<std::pair<const char*, double>, 5> ValidityReport::items() const {
    return {{{"defocus beta/alpha", margin_defocus},
             {"y extent", margin_y},
             {"alpha window terms", margin_alpha_terms},
             {"delta quadratic phase", margin_delta},
             {"beta phase dominance", margin_beta_phase}}};
}

std::array<cplx, 4> TwoQubitState::state_vector() const {
    return {amp0, cplx{}, cplx{}, amp1};
}

QubitApproximation qubit_approximation(double a, double l, double delta, double y_extent,
                                       const DefocusParams& defocus) {
    defocus.validate();
    if (a < 0.0 || !(l > 0.0) || !(delta > 0.0) || !(y_extent > 0.0)) {
        throw std::invalid_argument("qubit_approximation: need a >= 0, l, delta, y > 0");
    }
    double alpha = defocus.alpha, beta = defocus.beta;

    QubitApproximation out;
    TwoQubitState& st = out.state;
    st.window_center = l;
    st.separation = a;
    st.p_pp = beta * l / 2.0 + beta * a / 2.0;
    st.p_pm = beta * l / 2.0 - beta * a / 2.0;
    st.p_mp = -beta * l / 2.0 + beta * a / 2.0;
    st.p_mm = -beta * l / 2.0 - beta * a / 2.0;
    st.amp0 = kSqrtHalf * std::polar(1.0, -beta * a * l);
    st.amp1 = kSqrtHalf * std::polar(1.0, +beta * a * l);
    st.relative_phase = 2.0 * beta * a * l;
    st.basis_spacing = beta * a;
    out.degenerate = (a == 0.0);

    out.delta = delta;
    out.y_extent = y_extent;

    double window_sq = std::max({a * a, a * l, l * l});
    double window_sq_min = std::min({a * a, a * l, l * l});
    ValidityReport& r = out.report;
    r.margin_defocus = beta / alpha;
    r.margin_y = 1.0 / (std::max(alpha, beta) * y_extent * y_extent);
    r.margin_alpha_terms = 1.0 / (alpha * window_sq);
    r.margin_delta = beta > 0.0 ? 1.0 / (beta * delta * delta)
                                : std::numeric_limits<double>::infinity();
    r.margin_beta_phase = beta * window_sq_min;
    return out;
}

double qubit_overlap(const QubitApproximation& approx, const ConditionalState& exact,
                     std::size_t quadrature_points) {
    std::size_t n = quadrature_points | 1;  // Simpson needs an odd count
    const TwoQubitState& st = approx.state;
    double l = st.window_center;
    double delta = approx.delta;
    double y_extent = approx.y_extent;
    const DefocusParams& d = exact.defocus;

    // the exact amplitude factorizes into a common y Gaussian and an x part,
    // so the 4D window integrals reduce to 1D (y) and 2D (x) quadratures
    cplx gamma(d.alpha, -d.beta);  // exponent scale: exp(-gamma y^2 / 4)
    cplx y_cross{};                // integral of F(y) dy
    double y_norm = 0.0;           // integral of |F(y)|^2 dy
    double hy = 2.0 * y_extent / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double y = -y_extent + double(i) * hy;
        double wgt = simpson_weight(i, n);
        cplx fy = std::exp(-gamma * (y * y / 4.0));
        y_cross += wgt * fy;
        y_norm += wgt * std::norm(fy);
    }
    y_cross *= hy / 3.0;
    y_norm *= hy / 3.0;

    // momenta of the qubit plane waves about each window center
    double p1_basis[2] = {st.p_pm, st.p_pp};   // photon near +l
    double p2_basis[2] = {st.p_mp, st.p_mm};   // photon near -l
    cplx amps[2] = {st.amp0, st.amp1};

    cplx cross{};
    double qubit_norm = 0.0, exact_norm = 0.0;
    double hd = 2.0 * delta / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double d1 = -delta + double(i) * hd;
        double wi = simpson_weight(i, n);
        for (std::size_t j = 0; j < n; ++j) {
            double d2 = -delta + double(j) * hd;
            double wj = simpson_weight(j, n);
            double wgt = wi * wj;
            cplx qubit{};
            for (int t = 0; t < 2; ++t) {
                qubit += amps[t] * std::polar(1.0, p1_basis[t] * d1 + p2_basis[t] * d2);
            }
            cplx h = exact.amplitude({l + d1, 0.0}, {-l + d2, 0.0});
            cross += wgt * std::conj(qubit) * h;
            qubit_norm += wgt * std::norm(qubit);
            exact_norm += wgt * std::norm(h);
        }
    }
    double h2 = (hd / 3.0) * (hd / 3.0);
    cross *= h2;
    qubit_norm *= h2;
    exact_norm *= h2;

    // <q|phi> = y_cross^2 * cross (one y integral per photon); the qubit form
    // is flat in y, so its norm carries (2 y_extent) per photon.
    double qubit_y = 2.0 * y_extent;
    double numerator = std::norm(cross) * std::norm(y_cross) * std::norm(y_cross);
    double denominator = (qubit_norm * qubit_y * qubit_y) * (exact_norm * y_norm * y_norm);
    return numerator / denominator;
}

// ---------------------------------------------------------------------------
// SLM tomography
// ---------------------------------------------------------------------------

cplx slm_order_coefficient(int order, double epsilon) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("slm_order_coefficient: epsilon must be >= 0");
    }
    unsigned mag = unsigned(order < 0 ? -order : order);
    double jn = std::cyl_bessel_j(double(mag), epsilon);
    if (order < 0 && mag % 2 == 1) {
        jn = -jn;  // J_{-n} = (-1)^n J_n
    }
    static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return i_pow[((order % 4) + 4) % 4] * jn;
}

std::vector<MomentumAmplitude> slm_transform(double p, cplx amp_p, cplx amp_pk,
                                             const TomographySetting& setting, int order_cut) {
    if (order_cut < 1) {
        throw std::invalid_argument("slm_transform: order_cut must be >= 1");
    }
    if (!(setting.k_slm > 0.0)) {
        throw std::invalid_argument("slm_transform: k_slm must be positive");
    }
    std::vector<MomentumAmplitude> out;
    out.reserve(std::size_t(2 * order_cut + 2));
    for (int m = -order_cut; m <= order_cut + 1; ++m) {
        cplx amp{};
        if (std::abs(-m) <= order_cut) {
            amp += amp_p * slm_order_coefficient(-m, setting.epsilon) *
                   std::polar(1.0, double(-m) * setting.theta);
        }
        if (std::abs(1 - m) <= order_cut) {
            amp += amp_pk * slm_order_coefficient(1 - m, setting.epsilon) *
                   std::polar(1.0, double(1 - m) * setting.theta);
        }
        out.push_back({p + double(m) * setting.k_slm, amp});
    }
    return out;
}

namespace {

/// Route amplitude of basis state j (ladder position s_j) to ladder order m.
cplx route(int s_j, int m, const TomographySetting& setting, int order_cut) {
    int n = s_j - m;
    if (std::abs(n) > order_cut) {
        return {};
    }
    return slm_order_coefficient(n, setting.epsilon) * std::polar(1.0, double(n) * setting.theta);
}

void check_k_slm(const TwoQubitState& state, const TomographySetting& setting) {
    double spacing = state.basis_spacing;
    if (std::abs(setting.k_slm - spacing) > 1e-9 * std::max(1.0, std::abs(spacing))) {
        throw std::invalid_argument("far_field_probs: k_slm must equal the basis spacing beta*a");
    }
}

FarFieldTable table_from_density(const Matrix4& rho, const TwoQubitState& basis,
                                 const TomographySetting& setting_b,
                                 const TomographySetting& setting_bp, int order_cut) {
    check_k_slm(basis, setting_b);
    check_k_slm(basis, setting_bp);
    if (order_cut < 1) {
        throw std::invalid_argument("far_field_probs: order_cut must be >= 1");
    }
    // ladder positions of |1> relative to |0>: +1 on the +l window, -1 on -l
    const int s_b[2] = {0, +1};
    const int s_bp[2] = {0, -1};
    double k = basis.basis_spacing;
    FarFieldTable table;
    table.setting_b = setting_b;
    table.setting_bp = setting_bp;
    double total = 0.0;
    for (int m = -order_cut - 1; m <= order_cut + 1; ++m) {
        for (int mp = -order_cut - 1; mp <= order_cut + 1; ++mp) {
            // probability = meas^dagger rho meas with meas holding the
            // conjugated route amplitudes, so a pure state gives
            // |sum_j c_j route_j|^2
            Vector4 meas;
            for (int j = 0; j < 2; ++j) {
                for (int jp = 0; jp < 2; ++jp) {
                    meas(2 * j + jp) = std::conj(route(s_b[j], m, setting_b, order_cut) *
                                                 route(s_bp[jp], mp, setting_bp, order_cut));
                }
            }
            double prob = (meas.adjoint() * rho * meas).value().real();
            prob = std::max(prob, 0.0);
            total += prob;
            table.spots.push_back({m, mp, basis.p_pm + double(m) * k,
                                   basis.p_mp + double(mp) * k, prob});
        }
    }
    table.truncation_mass = 1.0 - total;
    return table;
}

Matrix4 density_of(const TwoQubitState& state) {
    auto v = state.state_vector();
    Vector4 psi;
    for (int i = 0; i < 4; ++i) {
        psi(i) = v[std::size_t(i)];
    }
    return (psi * psi.adjoint()).eval();
}

}  // namespace

FarFieldTable far_field_probs(const TwoQubitState& state, const TomographySetting& setting_b,
                              const TomographySetting& setting_bp, int order_cut) {
    return table_from_density(density_of(state), state, setting_b, setting_bp, order_cut);
}

FarFieldTable far_field_probs_from_density(const std::array<cplx, 16>& rho,
                                           const TwoQubitState& basis,
                                           const TomographySetting& setting_b,
                                           const TomographySetting& setting_bp, int order_cut) {
    Matrix4 m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) = rho[std::size_t(4 * r + c)];
        }
    }
    return table_from_density(m, basis, setting_b, setting_bp, order_cut);
}

TomographyResult reconstruct(const TwoQubitState& ideal, const std::vector<FarFieldTable>& tables) {
    if (tables.empty()) {
        throw ConfigError("reconstruct: no measurement tables");
    }
    // hermitian basis: diagonal units, then (r,c) real and imaginary pairs
    std::vector<Matrix4> basis;
    for (int r = 0; r < 4; ++r) {
        Matrix4 m = Matrix4::Zero();
        m(r, r) = 1.0;
        basis.push_back(m);
    }
    for (int r = 0; r < 4; ++r) {
        for (int c = r + 1; c < 4; ++c) {
            Matrix4 re = Matrix4::Zero();
            re(r, c) = 1.0;
            re(c, r) = 1.0;
            basis.push_back(re);
            Matrix4 im = Matrix4::Zero();
            im(r, c) = cplx(0.0, -1.0);
            im(c, r) = cplx(0.0, 1.0);
            basis.push_back(im);
        }
    }

    std::size_t rows = 0;
    for (const auto& t : tables) {
        rows += t.spots.size();
    }
    Eigen::MatrixXd design(rows, 16);
    Eigen::VectorXd target(rows);
    std::size_t row = 0;
    int order_cut_guess = 0;
    for (const auto& t : tables) {
        for (const auto& s : t.spots) {
            order_cut_guess = std::max(order_cut_guess, std::abs(s.order_b));
        }
    }
    int order_cut = std::max(1, order_cut_guess - 1);
    for (const auto& t : tables) {
        const int s_b[2] = {0, +1};
        const int s_bp[2] = {0, -1};
        for (const auto& s : t.spots) {
            Vector4 meas;
            for (int j = 0; j < 2; ++j) {
                for (int jp = 0; jp < 2; ++jp) {
                    meas(2 * j + jp) =
                        std::conj(route(s_b[j], s.order_b, t.setting_b, order_cut) *
                                  route(s_bp[jp], s.order_bp, t.setting_bp, order_cut));
                }
            }
            for (std::size_t col = 0; col < 16; ++col) {
                design(Eigen::Index(row), Eigen::Index(col)) =
                    (meas.adjoint() * basis[col] * meas).value().real();
            }
            target(Eigen::Index(row)) = s.probability;
            ++row;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    if (svd.rank() < 16) {
        throw ConfigError("reconstruct: rank-deficient setting set (rank " +
                          std::to_string(svd.rank()) + " of 16)");
    }
    Eigen::VectorXd coeffs = svd.solve(target);

    Matrix4 rho = Matrix4::Zero();
    for (std::size_t i = 0; i < 16; ++i) {
        rho += coeffs(Eigen::Index(i)) * basis[i];
    }
    rho = (0.5 * (rho + rho.adjoint().eval())).eval();

    // project onto the PSD cone and renormalize the trace
    Eigen::SelfAdjointEigenSolver<Matrix4> es(rho);
    Eigen::Vector4d evals = es.eigenvalues().cwiseMax(0.0);
    double trace = evals.sum();
    if (!(trace > 0.0)) {
        throw ConfigError("reconstruct: projected state has zero trace");
    }
    evals /= trace;
    Matrix4 psd = Matrix4::Zero();
    for (int i = 0; i < 4; ++i) {
        Vector4 v = es.eigenvectors().col(i);
        psd += evals(i) * (v * v.adjoint());
    }

    TomographyResult result;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            result.rho[std::size_t(4 * r + c)] = psd(r, c);
        }
    }

    auto ideal_vec = ideal.state_vector();
    Vector4 psi;
    for (int i = 0; i < 4; ++i) {
        psi(i) = ideal_vec[std::size_t(i)];
    }
    psi.normalize();
    result.fidelity = (psi.adjoint() * psd * psi).value().real();

    // Wootters concurrence via the spin-flipped overlap spectrum
    Matrix4 yy = Matrix4::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    Matrix4 rho_tilde = yy * psd.conjugate() * yy;
    Eigen::SelfAdjointEigenSolver<Matrix4> es_rho(psd);
    Eigen::Vector4d sq = es_rho.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix4 sqrt_rho = Matrix4::Zero();
    for (int i = 0; i < 4; ++i) {
        Vector4 v = es_rho.eigenvectors().col(i);
        sqrt_rho += sq(i) * (v * v.adjoint());
    }
    Matrix4 mid = sqrt_rho * rho_tilde * sqrt_rho;
    mid = (0.5 * (mid + mid.adjoint().eval())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix4> es_mid(mid);
    Eigen::Vector4d lambdas = es_mid.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(lambdas.data(), lambdas.data() + 4, std::greater<double>());
    result.concurrence = std::max(0.0, lambdas(0) - lambdas(1) - lambdas(2) - lambdas(3));
    return result;
}

}  // namespace qimcorr
