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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qimcorr/correlator.hpp"
#include "qimcorr/permanent.hpp"
#include "qimcorr/stochastic.hpp"
#include "qimcorr/swap.hpp"

namespace py = pybind11;
using namespace qimcorr;

namespace {

using Point = std::pair<double, double>;

TransversePoint to_point(const Point& p) {
    return {p.first, p.second};
}

std::vector<TransversePoint> to_points(const std::vector<Point>& pts) {
    std::vector<TransversePoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        out.push_back(to_point(p));
    }
    return out;
}

ComplexMatrix matrix_from_numpy(const py::array_t<cplx>& array) {
    auto buf = array.unchecked<2>();
    if (buf.shape(0) != buf.shape(1)) {
        throw std::invalid_argument("permanent: matrix must be square");
    }
    ComplexMatrix m = ComplexMatrix::zero(std::size_t(buf.shape(0)));
    for (py::ssize_t i = 0; i < buf.shape(0); ++i) {
        for (py::ssize_t j = 0; j < buf.shape(1); ++j) {
            m.at(std::size_t(i), std::size_t(j)) = buf(i, j);
        }
    }
    return m;
}

py::array_t<double> grid_values(const CorrelationGrid& grid) {
    py::array_t<double> out({grid.axis1.count, grid.axis2.count});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i1 = 0; i1 < grid.axis1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.count; ++i2) {
            buf(py::ssize_t(i1), py::ssize_t(i2)) = grid.at(i1, i2);
        }
    }
    return out;
}

py::array_t<double> grid_sigma(const CorrelationGrid& grid) {
    py::array_t<double> out({grid.axis1.count, grid.axis2.count});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i1 = 0; i1 < grid.axis1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.count; ++i2) {
            buf(py::ssize_t(i1), py::ssize_t(i2)) =
                grid.sigma.empty() ? 0.0 : grid.sigma[grid.index(i1, i2)];
        }
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiphoton correlations between entangled quantum images";

    py::class_<SourceParams>(m, "SourceParams")
        .def(py::init([](double w0, double b, double k, double z, double z_prime) {
                 SourceParams p{w0, b, k, z, z_prime};
                 p.validate();
                 return p;
             }),
             py::arg("w0"), py::arg("b"), py::arg("k"), py::arg("z") = 0.0,
             py::arg("z_prime") = 0.0)
        .def_readwrite("w0", &SourceParams::w0)
        .def_readwrite("b", &SourceParams::b)
        .def_readwrite("k", &SourceParams::k)
        .def_readwrite("z", &SourceParams::z)
        .def_readwrite("z_prime", &SourceParams::z_prime);

    py::class_<DefocusParams>(m, "DefocusParams")
        .def(py::init([](double alpha, double beta) {
                 DefocusParams d{alpha, beta, alpha > 0.0 ? beta / alpha : 0.0, 1.0};
                 d.validate();
                 return d;
             }),
             py::arg("alpha"), py::arg("beta"))
        .def_readonly("alpha", &DefocusParams::alpha)
        .def_readonly("beta", &DefocusParams::beta)
        .def_readonly("big_z", &DefocusParams::big_z)
        .def_readonly("schmidt_k", &DefocusParams::schmidt_k);

    m.def("derive_defocus", &derive_defocus, py::arg("source"));

    m.def(
        "phi_near",
        [](const Point& x, const Point& xp, const SourceParams& p) {
            return phi_near(to_point(x), to_point(xp), p);
        },
        py::arg("x"), py::arg("x_prime"), py::arg("source"));
    m.def(
        "phi_far",
        [](const Point& p1, const Point& p2, const SourceParams& p) {
            return phi_far(to_point(p1), to_point(p2), p);
        },
        py::arg("p"), py::arg("p_prime"), py::arg("source"));
    m.def(
        "phi_defocused_momentum",
        [](const Point& p1, const Point& p2, const SourceParams& p) {
            return phi_defocused_momentum(to_point(p1), to_point(p2), p);
        },
        py::arg("p"), py::arg("p_prime"), py::arg("source"));
    m.def(
        "phi_defocused_position",
        [](const Point& x, const Point& xp, const DefocusParams& d) {
            return phi_defocused_position(to_point(x), to_point(xp), d);
        },
        py::arg("x"), py::arg("x_prime"), py::arg("defocus"));

    m.def(
        "permanent", [](const py::array_t<cplx>& a) { return permanent(matrix_from_numpy(a)); },
        py::arg("matrix"), "Permanent via Ryser's formula in Gray-code order.");
    m.def(
        "permanent_reference",
        [](const py::array_t<cplx>& a) { return permanent_by_permutations(matrix_from_numpy(a)); },
        py::arg("matrix"), "Reference permanent by permutation enumeration (n <= 7).");

    m.def(
        "joint_probability",
        [](const std::vector<Point>& alice, const std::vector<Point>& bob,
           const DefocusParams& d) {
            DetectionPattern pattern{to_points(alice), to_points(bob)};
            return joint_probability(pattern, defocused_position_fn(d));
        },
        py::arg("alice"), py::arg("bob"), py::arg("defocus"));

    m.def(
        "p2",
        [](const Point& x, const Point& xp, const DefocusParams& d) {
            return p2(to_point(x), to_point(xp), d);
        },
        py::arg("x"), py::arg("x_prime"), py::arg("defocus"));
    m.def(
        "p4",
        [](const Point& x1, const Point& x2, const Point& x1p, const Point& x2p,
           const DefocusParams& d) {
            return p4({to_point(x1), to_point(x2), to_point(x1p), to_point(x2p)}, d);
        },
        py::arg("x1"), py::arg("x2"), py::arg("x1_prime"), py::arg("x2_prime"),
        py::arg("defocus"));
    m.def(
        "p2n",
        [](const std::vector<Point>& alice, const std::vector<Point>& bob,
           const DefocusParams& d) {
            DetectionPattern pattern{to_points(alice), to_points(bob)};
            return p2n(pattern, d);
        },
        py::arg("alice"), py::arg("bob"), py::arg("defocus"));
    m.def("p2n_term_count", &p2n_term_count, py::arg("n"));

    py::class_<MapSpec>(m, "MapSpec")
        .def(py::init([](const std::string& scan1, std::size_t count1, double pitch1,
                         const std::string& scan2, std::size_t count2, double pitch2,
                         const std::string& fixed1, double value1, const std::string& fixed2,
                         double value2, std::size_t window, double window_pitch) {
                 MapSpec spec;
                 auto coord = [](const std::string& name) {
                     auto c = parse_map_coord(name);
                     if (!c) {
                         throw std::invalid_argument("unknown coordinate: " + name);
                     }
                     return *c;
                 };
                 spec.scan1 = {coord(scan1), count1, pitch1, 0.0};
                 spec.scan2 = {coord(scan2), count2, pitch2, 0.0};
                 spec.fixed1 = {coord(fixed1), value1};
                 spec.fixed2 = {coord(fixed2), value2};
                 if (window > 0) {
                     spec.averaging = AveragingMode::DetectorWindow;
                     spec.window = window;
                     spec.window_pitch = window_pitch;
                 }
                 spec.validate();
                 return spec;
             }),
             py::arg("scan1"), py::arg("count1"), py::arg("pitch1"), py::arg("scan2"),
             py::arg("count2"), py::arg("pitch2"), py::arg("fixed1"), py::arg("value1"),
             py::arg("fixed2"), py::arg("value2"), py::arg("window") = 0,
             py::arg("window_pitch") = 2.7);

    m.def(
        "analytic_map",
        [](const MapSpec& spec, const DefocusParams& d) {
            return grid_values(correlation_map(spec, d));
        },
        py::arg("spec"), py::arg("defocus"));

    m.def(
        "stochastic_g4",
        [](const SourceParams& source, std::size_t n_pixels, double pitch, const MapSpec& spec,
           std::uint64_t shots, std::size_t batches, double gain_peak, std::uint64_t seed,
           unsigned workers) {
            GridSpec grid{n_pixels, pitch, spec.window};
            G4Accumulator acc(grid, spec, batches, shots);
            ShotPipeline pipeline{grid, source, GainProfile::calibrate(source, grid, gain_peak)};
            run_shots(pipeline, seed, acc, shots, workers);
            CorrelationGrid g4 = acc.genuine_g4();
            return py::make_tuple(grid_values(g4), grid_sigma(g4));
        },
        py::arg("source"), py::arg("n_pixels"), py::arg("pitch"), py::arg("spec"),
        py::arg("shots"), py::arg("batches"), py::arg("gain_peak"), py::arg("seed") = 1,
        py::arg("workers") = 1);

    py::class_<TwoQubitState>(m, "TwoQubitState")
        .def_readonly("relative_phase", &TwoQubitState::relative_phase)
        .def_readonly("basis_spacing", &TwoQubitState::basis_spacing)
        .def_readonly("amp0", &TwoQubitState::amp0)
        .def_readonly("amp1", &TwoQubitState::amp1);

    py::class_<QubitApproximation>(m, "QubitApproximation")
        .def_readonly("state", &QubitApproximation::state)
        .def_readonly("degenerate", &QubitApproximation::degenerate)
        .def_property_readonly("margins", [](const QubitApproximation& q) {
            py::dict out;
            for (const auto& [name, margin] : q.report.items()) {
                out[name] = margin;
            }
            return out;
        });

    m.def(
        "qubit_approximation",
        [](double a, double l, double delta, double y_extent, const DefocusParams& d) {
            return qubit_approximation(a, l, delta, y_extent, d);
        },
        py::arg("a"), py::arg("l"), py::arg("delta"), py::arg("y_extent"), py::arg("defocus"));

    m.def(
        "qubit_overlap",
        [](const QubitApproximation& approx, double a, const DefocusParams& d) {
            return qubit_overlap(approx, conditional_state(a, d));
        },
        py::arg("approx"), py::arg("a"), py::arg("defocus"));

    m.def("slm_order_coefficient", &slm_order_coefficient, py::arg("order"), py::arg("epsilon"));

    m.def(
        "swap_tomography",
        [](double a, double l, double delta, double y_extent, const DefocusParams& d,
           double epsilon, const std::vector<double>& thetas, int order_cut) {
            QubitApproximation approx = qubit_approximation(a, l, delta, y_extent, d);
            double k_slm = approx.state.basis_spacing;
            std::vector<FarFieldTable> tables;
            tables.push_back(
                far_field_probs(approx.state, {0.0, 0.0, k_slm}, {0.0, 0.0, k_slm}, order_cut));
            for (double tb : thetas) {
                for (double tbp : thetas) {
                    tables.push_back(far_field_probs(approx.state, {epsilon, tb, k_slm},
                                                     {epsilon, tbp, k_slm}, order_cut));
                }
            }
            TomographyResult result = reconstruct(approx.state, tables);
            py::array_t<cplx> rho({4, 4});
            auto buf = rho.mutable_unchecked<2>();
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) {
                    buf(r, c) = result.rho[std::size_t(4 * r + c)];
                }
            }
            py::dict out;
            out["rho"] = rho;
            out["fidelity"] = result.fidelity;
            out["concurrence"] = result.concurrence;
            out["relative_phase"] = approx.state.relative_phase;
            return out;
        },
        py::arg("a"), py::arg("l"), py::arg("delta"), py::arg("y_extent"), py::arg("defocus"),
        py::arg("epsilon") = 0.5,
        py::arg("thetas") = std::vector<double>{0.0, 2.0943951023931953, 4.1887902047863905},
        py::arg("order_cut") = 8);
}
