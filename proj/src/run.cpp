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

#include "qimcorr/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "qimcorr/errors.hpp"
#include "qimcorr/grid_io.hpp"
#include "qimcorr/hash.hpp"
#include "qimcorr/permanent.hpp"
#include "qimcorr/rng.hpp"
#include "qimcorr/swap.hpp"
#include "qimcorr/text.hpp"

namespace qimcorr {

namespace {

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

unsigned effective_workers(const RunOptions& options) {
    if (options.workers > 0) {
        return options.workers;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::uint64_t resolve_seed(const RunConfig& config, const RunOptions& options) {
    return options.seed_override.value_or(config.seed);
}

/// Rebuild the MapSpec and defocus parameters a grid was generated with from
/// its metadata, for envelope reconstruction during fringe fitting.
struct GridLayout {
    MapSpec spec;
    DefocusParams defocus;
};

std::optional<GridLayout> layout_from_metadata(const CorrelationGrid& grid) {
    auto meta = [&grid](const std::string& key) -> const std::string* {
        auto it = grid.metadata.find(key);
        return it == grid.metadata.end() ? nullptr : &it->second;
    };
    const std::string* alpha = meta("alpha_inv_um2");
    const std::string* beta = meta("beta_inv_um2");
    const std::string* averaging = meta("averaging");
    if (alpha == nullptr || beta == nullptr || averaging == nullptr) {
        return std::nullopt;
    }
    GridLayout out;
    out.defocus.alpha = parse_double(*alpha);
    out.defocus.beta = parse_double(*beta);
    if (!(out.defocus.alpha > 0.0)) {
        return std::nullopt;
    }
    out.defocus.big_z = out.defocus.beta / out.defocus.alpha;
    out.defocus.schmidt_k = 1.0;

    auto axis_coord = [](const GridAxis& axis) -> std::optional<MapCoord> {
        std::string name = axis.name;
        if (name.size() > 3 && name.substr(name.size() - 3) == "_um") {
            name.resize(name.size() - 3);
        }
        return parse_map_coord(name);
    };
    auto c1 = axis_coord(grid.axis1), c2 = axis_coord(grid.axis2);
    if (!c1 || !c2) {
        return std::nullopt;
    }
    out.spec.scan1 = {*c1, grid.axis1.count, grid.axis1.pitch, grid.axis1.center};
    out.spec.scan2 = {*c2, grid.axis2.count, grid.axis2.pitch, grid.axis2.center};

    std::vector<FixedCoordSpec> fixed;
    for (const auto& [key, value] : grid.metadata) {
        if (key.rfind("fixed.", 0) == 0) {
            std::string name = key.substr(6);
            if (name.size() > 3 && name.substr(name.size() - 3) == "_um") {
                name.resize(name.size() - 3);
            }
            auto coord = parse_map_coord(name);
            if (!coord) {
                return std::nullopt;
            }
            fixed.push_back({*coord, parse_double(value)});
        }
    }
    if (fixed.size() != 2) {
        return std::nullopt;
    }
    out.spec.fixed1 = fixed[0];
    out.spec.fixed2 = fixed[1];

    if (*averaging == "window") {
        out.spec.averaging = AveragingMode::DetectorWindow;
        const std::string* w = meta("window_px");
        const std::string* wp = meta("window_pitch_um");
        if (w == nullptr || wp == nullptr) {
            return std::nullopt;
        }
        out.spec.window = std::size_t(parse_uint(*w));
        out.spec.window_pitch = parse_double(*wp);
    } else {
        out.spec.averaging = AveragingMode::Lattice;
        const std::string* c = meta("avg_count");
        const std::string* p = meta("avg_pitch_um");
        if (c == nullptr || p == nullptr) {
            return std::nullopt;
        }
        out.spec.avg_count = std::size_t(parse_uint(*c));
        out.spec.avg_pitch = parse_double(*p);
    }
    return out;
}

}  // namespace

double normalized_cross_correlation(const CorrelationGrid& a, const CorrelationGrid& b) {
    auto axes_match = [](const GridAxis& x, const GridAxis& y) {
        return x.name == y.name && x.count == y.count && std::abs(x.pitch - y.pitch) < 1e-9 &&
               std::abs(x.center - y.center) < 1e-9;
    };
    if (!axes_match(a.axis1, b.axis1) || !axes_match(a.axis2, b.axis2)) {
        throw ConfigError("compare: grids do not share axes");
    }
    std::size_t n = a.values.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.values[i];
        mean_b += b.values[i];
    }
    mean_a /= double(n);
    mean_b /= double(n);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a.values[i] - mean_a, db = b.values[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        return 0.0;
    }
    return cov / std::sqrt(var_a * var_b);
}

FringeFit fit_fringe_beta(const CorrelationGrid& grid) {
    FringeFit fit;
    auto layout = layout_from_metadata(grid);
    if (!layout) {
        return fit;
    }
    const MapSpec& spec = layout->spec;
    const DefocusParams& d = layout->defocus;
    if (!(d.beta > 0.0)) {
        return fit;
    }

    std::size_t n1 = grid.axis1.count, n2 = grid.axis2.count;
    std::vector<double> overlap(n1 * n2), flattened(n1 * n2), weight(n1 * n2);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            std::size_t idx = grid.index(i1, i2);
            double v1 = grid.axis1.value(i1), v2 = grid.axis2.value(i2);
            double env = map_envelope(spec, d, v1, v2);
            overlap[idx] = map_cell_overlap(spec, v1, v2);
            flattened[idx] = grid.values[idx] / env;
            if (!grid.sigma.empty() && grid.sigma[idx] > 0.0) {
                double se = grid.sigma[idx] / env;
                weight[idx] = 1.0 / (se * se);
            } else {
                weight[idx] = 1.0;
            }
        }
    }

    // model: y = A (cosh(alpha S / 2) + cos(beta S / 2)); A is linear, scan
    // beta and keep the best, then refine by golden section
    auto sse_for = [&](double beta) {
        double num = 0.0, den = 0.0;
        std::vector<double> model(flattened.size());
        for (std::size_t i = 0; i < flattened.size(); ++i) {
            model[i] = std::cosh(d.alpha * overlap[i] / 2.0) + std::cos(beta * overlap[i] / 2.0);
            num += weight[i] * flattened[i] * model[i];
            den += weight[i] * model[i] * model[i];
        }
        double amp = den > 0.0 ? num / den : 0.0;
        double sse = 0.0;
        for (std::size_t i = 0; i < flattened.size(); ++i) {
            double r = flattened[i] - amp * model[i];
            sse += weight[i] * r * r;
        }
        return sse;
    };

    double lo = 0.2 * d.beta, hi = 3.0 * d.beta;
    double best_beta = d.beta, best_sse = sse_for(d.beta);
    const int coarse = 400;
    for (int i = 0; i <= coarse; ++i) {
        double beta = lo + (hi - lo) * double(i) / double(coarse);
        double sse = sse_for(beta);
        if (sse < best_sse) {
            best_sse = sse;
            best_beta = beta;
        }
    }
    double step = (hi - lo) / double(coarse);
    double a = std::max(lo, best_beta - step), b = std::min(hi, best_beta + step);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = sse_for(x1), f2 = sse_for(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = sse_for(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = sse_for(x2);
        }
    }
    fit.ok = true;
    fit.beta = 0.5 * (a + b);
    fit.period_s = 4.0 * std::numbers::pi / fit.beta;
    return fit;
}

void run_analytic_map(const RunConfig& config, const RunOptions& options) {
    Stopwatch watch;
    std::string started = utc_now();
    std::filesystem::create_directories(options.out_dir);
    DefocusParams defocus = derive_defocus(config.source);
    CorrelationGrid grid = correlation_map(config.map_or_throw(), defocus);

    write_grid_csv(options.out_dir / "analytic_map.csv", grid);
    write_grid_pgm(options.out_dir / "analytic_map.pgm", grid);

    RunManifest manifest;
    manifest.command = "analytic-map";
    manifest.seed = resolve_seed(config, options);
    manifest.workers = effective_workers(options);
    manifest.outputs = {"analytic_map.csv", "analytic_map.pgm"};
    manifest.started_utc = started;
    manifest.wall_seconds = watch.seconds();
    write_manifest(options.out_dir, manifest, config.raw);
}

void run_stochastic(const RunConfig& config, const RunOptions& options) {
    Stopwatch watch;
    std::string started = utc_now();
    std::filesystem::create_directories(options.out_dir);

    const GridSpec& grid_spec = config.grid_or_throw();
    const MapSpec& layout = config.map_or_throw();
    const StochasticConfig& stoch = config.stochastic_or_throw();
    if (layout.averaging != AveragingMode::DetectorWindow) {
        throw ConfigError("stochastic-run requires [map] averaged = window");
    }
    if (stoch.shots < stoch.batches) {
        throw ConfigError("[stochastic] shots: need at least one shot per batch");
    }
    std::uint64_t seed = resolve_seed(config, options);
    std::uint64_t config_hash = fnv1a64(config.canonical_text() + "#seed=" + std::to_string(seed));

    std::filesystem::path checkpoint = options.out_dir / "checkpoint.g4acc";
    G4Accumulator acc;
    if (stoch.checkpoint && std::filesystem::exists(checkpoint)) {
        acc = G4Accumulator::load(checkpoint, config_hash);
    } else {
        acc = G4Accumulator(grid_spec, layout, stoch.batches, stoch.shots);
    }

    ShotPipeline pipeline;
    pipeline.grid = grid_spec;
    pipeline.source = config.source;
    pipeline.gain = GainProfile::calibrate(config.source, grid_spec, stoch.gain_peak);

    std::uint64_t budget = options.max_new_shots.value_or(stoch.shots);
    run_shots(pipeline, seed, acc, budget, effective_workers(options));

    std::vector<std::filesystem::path> outputs;
    if (stoch.checkpoint) {
        acc.save(checkpoint, config_hash);
        outputs.push_back("checkpoint.g4acc");
    }

    CorrelationGrid g4 = acc.genuine_g4(2);
    DefocusParams defocus = derive_defocus(config.source);
    g4.metadata["alpha_inv_um2"] = format_double(defocus.alpha);
    g4.metadata["beta_inv_um2"] = format_double(defocus.beta);
    g4.metadata["gain_peak"] = format_double(stoch.gain_peak);
    bool low_stats = acc.shot_count() < stoch.min_shots;
    g4.metadata["low_statistics"] = low_stats ? "true" : "false";

    write_grid_csv(options.out_dir / "g4.csv", g4);
    write_grid_pgm(options.out_dir / "g4.pgm", g4);
    outputs.push_back("g4.csv");
    outputs.push_back("g4.pgm");

    CorrelationGrid err = g4;
    err.values = g4.sigma;
    err.sigma.clear();
    err.metadata["kind"] = "genuine_g4_sigma";
    write_grid_csv(options.out_dir / "g4_sigma.csv", err);
    outputs.push_back("g4_sigma.csv");

    RunManifest manifest;
    manifest.command = "stochastic-run";
    manifest.seed = seed;
    manifest.workers = effective_workers(options);
    manifest.outputs = outputs;
    manifest.started_utc = started;
    manifest.extra["estimator_version"] = "g4-wick-subtraction/1";
    manifest.extra["shots"] = std::to_string(acc.shot_count());
    manifest.extra["planned_shots"] = std::to_string(acc.planned_shots());
    manifest.extra["batches"] = std::to_string(acc.batch_count());
    manifest.extra["gain_amplitude_scale"] = format_double(pipeline.gain.amplitude_scale());
    manifest.extra["low_statistics"] = low_stats ? "true" : "false";
    manifest.wall_seconds = watch.seconds();
    write_manifest(options.out_dir, manifest, config.raw);
}

CompareReport run_compare(const std::filesystem::path& grid_a, const std::filesystem::path& grid_b,
                          const RunOptions& options) {
    Stopwatch watch;
    std::string started = utc_now();
    std::filesystem::create_directories(options.out_dir);
    CorrelationGrid a = read_grid_csv(grid_a);
    CorrelationGrid b = read_grid_csv(grid_b);

    CompareReport report;
    report.ncc = normalized_cross_correlation(a, b);
    report.fit_a = fit_fringe_beta(a);
    report.fit_b = fit_fringe_beta(b);

    nlohmann::ordered_json doc;
    doc["ncc_after_max_normalization"] = report.ncc;
    auto fit_json = [](const FringeFit& fit) {
        nlohmann::ordered_json j;
        j["ok"] = fit.ok;
        if (fit.ok) {
            j["beta_inv_um2"] = fit.beta;
            j["fringe_period_s_um2"] = fit.period_s;
        }
        return j;
    };
    doc["grid_a"] = {{"path", grid_a.string()}, {"fringe_fit", fit_json(report.fit_a)}};
    doc["grid_b"] = {{"path", grid_b.string()}, {"fringe_fit", fit_json(report.fit_b)}};
    std::filesystem::path report_path = options.out_dir / "compare_report.json";
    {
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        out << doc.dump(2) << "\n";
    }

    RunManifest manifest;
    manifest.command = "compare";
    manifest.workers = 1;
    manifest.outputs = {"compare_report.json"};
    manifest.started_utc = started;
    manifest.wall_seconds = watch.seconds();
    write_manifest(options.out_dir, manifest, IniFile{});
    return report;
}

void run_perm_bench(std::size_t n_max, std::uint64_t seed, const RunOptions& options) {
    Stopwatch watch;
    std::string started = utc_now();
    if (n_max > kPermanentOrderGuard) {
        throw NumericGuardError("perm-bench: n_max exceeds the permanent order guard");
    }
    if (n_max < 1) {
        throw ConfigError("perm-bench: n_max must be at least 1");
    }
    std::filesystem::create_directories(options.out_dir);
    std::filesystem::path csv_path = options.out_dir / "perm_bench.csv";
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    out << "# columns: n,algorithm,seconds\n";

    double previous_seconds = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        CounterRng rng(seed, n);
        ComplexMatrix m = ComplexMatrix::zero(n);
        for (auto& entry : m.entries) {
            entry = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
        }
        Stopwatch gray_watch;
        cplx gray = permanent(m);
        double gray_seconds = gray_watch.seconds();
        out << n << ",gray_code," << format_double(gray_seconds) << "\n";
        if (n <= kPermanentReferenceGuard) {
            Stopwatch ref_watch;
            cplx reference = permanent_by_permutations(m);
            double ref_seconds = ref_watch.seconds();
            out << n << ",reference," << format_double(ref_seconds) << "\n";
            double scale = std::max(1.0, std::abs(reference));
            if (std::abs(gray - reference) > 1e-12 * scale) {
                throw std::runtime_error("perm-bench: gray-code and reference permanents differ");
            }
        }
        if (gray_seconds + 1e-9 < previous_seconds) {
            std::cerr << "warning: permanent timing decreased from n=" << n - 1 << " to n=" << n
                      << " (noise?)\n";
        }
        previous_seconds = gray_seconds;
    }
    out.close();

    RunManifest manifest;
    manifest.command = "perm-bench";
    manifest.seed = seed;
    manifest.workers = 1;
    manifest.outputs = {"perm_bench.csv"};
    manifest.started_utc = started;
    manifest.wall_seconds = watch.seconds();
    write_manifest(options.out_dir, manifest, IniFile{});
}

void run_swap_demo(const RunConfig& config, const RunOptions& options) {
    Stopwatch watch;
    std::string started = utc_now();
    std::filesystem::create_directories(options.out_dir);
    const SwapConfig& swap = config.swap_or_throw();
    DefocusParams defocus = derive_defocus(config.source);

    QubitApproximation approx =
        qubit_approximation(swap.a, swap.l, swap.delta, swap.y_extent, defocus);
    ConditionalState exact = conditional_state(swap.a, defocus);
    double overlap = qubit_overlap(approx, exact);

    double k_slm = approx.state.basis_spacing;
    std::vector<FarFieldTable> tables;
    tables.push_back(far_field_probs(approx.state, {0.0, 0.0, k_slm}, {0.0, 0.0, k_slm},
                                     swap.order_cut));
    for (double theta_b : swap.thetas) {
        for (double theta_bp : swap.thetas) {
            tables.push_back(far_field_probs(approx.state, {swap.epsilon, theta_b, k_slm},
                                             {swap.epsilon, theta_bp, k_slm}, swap.order_cut));
        }
    }

    std::filesystem::path prob_path = options.out_dir / "swap_probabilities.csv";
    {
        std::ofstream out(prob_path, std::ios::binary | std::ios::trunc);
        out << "# columns: epsilon_b,theta_b,epsilon_bp,theta_bp,order_b,order_bp,p_b_inv_um,"
               "p_bp_inv_um,probability\n";
        for (const auto& table : tables) {
            for (const auto& spot : table.spots) {
                out << format_double(table.setting_b.epsilon) << ","
                    << format_double(table.setting_b.theta) << ","
                    << format_double(table.setting_bp.epsilon) << ","
                    << format_double(table.setting_bp.theta) << "," << spot.order_b << ","
                    << spot.order_bp << "," << format_double(spot.p_b) << ","
                    << format_double(spot.p_bp) << "," << format_double(spot.probability) << "\n";
            }
        }
    }

    TomographyResult result = reconstruct(approx.state, tables);

    std::filesystem::path rho_path = options.out_dir / "swap_density.csv";
    {
        std::ofstream out(rho_path, std::ios::binary | std::ios::trunc);
        out << "# columns: row,col,re,im\n";
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                const cplx& v = result.rho[std::size_t(4 * r + c)];
                out << r << "," << c << "," << format_double(v.real()) << ","
                    << format_double(v.imag()) << "\n";
            }
        }
    }

    nlohmann::ordered_json summary;
    summary["fidelity"] = result.fidelity;
    summary["concurrence"] = result.concurrence;
    summary["relative_phase_rad"] = approx.state.relative_phase;
    summary["basis_spacing_inv_um"] = approx.state.basis_spacing;
    summary["qubit_overlap"] = overlap;
    summary["degenerate"] = approx.degenerate;
    nlohmann::ordered_json margins;
    for (const auto& [name, margin] : approx.report.items()) {
        margins[name] = margin;
    }
    summary["validity_margins"] = margins;
    summary["all_margins_valid"] = approx.report.all_valid();
    std::filesystem::path summary_path = options.out_dir / "swap_summary.json";
    {
        std::ofstream out(summary_path, std::ios::binary | std::ios::trunc);
        out << summary.dump(2) << "\n";
    }

    RunManifest manifest;
    manifest.command = "swap-demo";
    manifest.seed = resolve_seed(config, options);
    manifest.workers = 1;
    manifest.outputs = {"swap_probabilities.csv", "swap_density.csv", "swap_summary.json"};
    manifest.started_utc = started;
    manifest.wall_seconds = watch.seconds();
    write_manifest(options.out_dir, manifest, config.raw);
}

}  // namespace qimcorr
