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

#include "qimcorr/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "qimcorr/errors.hpp"
#include "qimcorr/rng.hpp"
#include "qimcorr/text.hpp"

namespace qimcorr {

namespace {

/// FFT momentum component for lattice index j of n pixels at `pitch`.
inline double lattice_momentum(std::size_t j, std::size_t n, double pitch) {
    double step = 2.0 * std::numbers::pi / (double(n) * pitch);
    std::ptrdiff_t signed_j = std::ptrdiff_t(j) <= std::ptrdiff_t(n / 2)
                                  ? std::ptrdiff_t(j)
                                  : std::ptrdiff_t(j) - std::ptrdiff_t(n);
    return step * double(signed_j);
}

}  // namespace

void GridSpec::validate() const {
    if (!is_power_of_two(n_pixels)) {
        throw std::invalid_argument("GridSpec: n_pixels must be a power of two");
    }
    if (window < 1 || window > n_pixels) {
        throw std::invalid_argument("GridSpec: window must fit inside the grid");
    }
    if (!(pitch > 0.0)) {
        throw std::invalid_argument("GridSpec: pitch must be positive");
    }
}

FieldFrame sample_vacuum(const GridSpec& grid, std::uint64_t seed, std::uint64_t shot_index) {
    grid.validate();
    FieldFrame frame;
    frame.n = grid.n_pixels;
    frame.pitch = grid.pitch;
    frame.master_seed = seed;
    frame.shot_index = shot_index;
    std::size_t total = frame.n * frame.n;
    frame.signal.resize(total);
    frame.idler.resize(total);
    CounterRng rng(seed, shot_index);
    for (auto& v : frame.signal) {
        v = rng.vacuum_sample();
    }
    for (auto& v : frame.idler) {
        v = rng.vacuum_sample();
    }
    return frame;
}

GainProfile GainProfile::calibrate(const SourceParams& source, const GridSpec& grid,
                                   double gain_peak) {
    source.validate();
    grid.validate();
    if (!(gain_peak >= 0.0)) {
        throw std::invalid_argument("GainProfile: gain_peak must be nonnegative");
    }
    GainProfile g;
    g.b_ = source.b;
    g.grid_ = grid;
    if (gain_peak == 0.0) {
        g.amp_ = 0.0;
        return g;
    }
    // mean photons per pixel is monotone in the amplitude scale; bisect
    auto mean_for = [&](double amp) {
        double sum = 0.0;
        std::size_t n = grid.n_pixels;
        for (std::size_t jx = 0; jx < n; ++jx) {
            double px = lattice_momentum(jx, n, grid.pitch);
            for (std::size_t jy = 0; jy < n; ++jy) {
                double py = lattice_momentum(jy, n, grid.pitch);
                double env = std::exp(-(px * px + py * py) / (source.b * source.b));
                double pair = amp * env;
                sum += 0.5 * (std::sqrt(1.0 + 4.0 * pair * pair) - 1.0);
            }
        }
        return sum / double(n * n);
    };
    double hi = 1.0;
    while (mean_for(hi) < gain_peak) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw std::invalid_argument("GainProfile: gain_peak unreachable");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mean_for(mid) < gain_peak ? lo : hi) = mid;
    }
    g.amp_ = 0.5 * (lo + hi);
    return g;
}

double GainProfile::pair_amplitude(double p_norm2) const {
    return amp_ * std::exp(-p_norm2 / (b_ * b_));
}

double GainProfile::mean_photons_per_pixel() const {
    if (!calibrated()) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t n = grid_.n_pixels;
    for (std::size_t jx = 0; jx < n; ++jx) {
        double px = lattice_momentum(jx, n, grid_.pitch);
        for (std::size_t jy = 0; jy < n; ++jy) {
            double py = lattice_momentum(jy, n, grid_.pitch);
            double pair = pair_amplitude(px * px + py * py);
            sum += 0.5 * (std::sqrt(1.0 + 4.0 * pair * pair) - 1.0);
        }
    }
    return sum / double(n * n);
}

void apply_gain(FieldFrame& frame, const GainProfile& gain) {
    if (!gain.calibrated()) {
        throw std::invalid_argument("apply_gain: gain profile not calibrated");
    }
    if (frame.n != gain.grid().n_pixels || frame.pitch != gain.grid().pitch) {
        throw std::invalid_argument("apply_gain: frame and gain grids differ");
    }
    if (gain.amplitude_scale() == 0.0) {
        return;  // identity Bogoliubov, keep the frame bit-exact
    }
    std::size_t n = frame.n;
    Fft2D fft(n);
    fft.forward(frame.signal);
    fft.forward(frame.idler);
    std::vector<cplx> new_signal(n * n), new_idler(n * n);
    for (std::size_t jx = 0; jx < n; ++jx) {
        double px = lattice_momentum(jx, n, frame.pitch);
        std::size_t njx = (n - jx) % n;
        for (std::size_t jy = 0; jy < n; ++jy) {
            double py = lattice_momentum(jy, n, frame.pitch);
            std::size_t njy = (n - jy) % n;
            double pair = gain.pair_amplitude(px * px + py * py);
            double sinh2 = 0.5 * (std::sqrt(1.0 + 4.0 * pair * pair) - 1.0);
            double sh = std::sqrt(sinh2);
            double ch = std::sqrt(1.0 + sinh2);
            std::size_t idx = jx * n + jy;
            std::size_t nidx = njx * n + njy;
            new_signal[idx] = ch * frame.signal[idx] + sh * std::conj(frame.idler[nidx]);
            new_idler[idx] = ch * frame.idler[idx] + sh * std::conj(frame.signal[nidx]);
        }
    }
    frame.signal = std::move(new_signal);
    frame.idler = std::move(new_idler);
    fft.inverse(frame.signal);
    fft.inverse(frame.idler);
}

namespace {

void propagate_field(std::vector<cplx>& field, std::size_t n, double pitch, double distance,
                     double k, const Fft2D& fft) {
    if (distance == 0.0) {
        return;
    }
    fft.forward(field);
    for (std::size_t jx = 0; jx < n; ++jx) {
        double px = lattice_momentum(jx, n, pitch);
        for (std::size_t jy = 0; jy < n; ++jy) {
            double py = lattice_momentum(jy, n, pitch);
            field[jx * n + jy] *= std::polar(1.0, -distance * (px * px + py * py) / (2.0 * k));
        }
    }
    fft.inverse(field);
}

}  // namespace

void propagate(FieldFrame& frame, double distance, double k) {
    propagate(frame, distance, distance, k);
}

void propagate(FieldFrame& frame, double distance_signal, double distance_idler, double k) {
    if (distance_signal < 0.0 || distance_idler < 0.0 || !(k > 0.0)) {
        throw std::invalid_argument("propagate: distances must be nonnegative, k positive");
    }
    Fft2D fft(frame.n);
    propagate_field(frame.signal, frame.n, frame.pitch, distance_signal, k, fft);
    propagate_field(frame.idler, frame.n, frame.pitch, distance_idler, k, fft);
}

// ---------------------------------------------------------------------------
// G4 accumulation
// ---------------------------------------------------------------------------

G4Accumulator::G4Accumulator(const GridSpec& grid, const MapSpec& layout, std::size_t batch_count,
                             std::uint64_t planned_shots)
    : grid_(grid), layout_(layout), planned_shots_(planned_shots), w_(grid.window) {
    grid.validate();
    layout.validate();
    if (layout.averaging != AveragingMode::DetectorWindow || layout.window != grid.window ||
        layout.window_pitch != grid.pitch) {
        throw ConfigError("G4Accumulator: layout must use window averaging over the grid window");
    }
    if (batch_count < 2) {
        throw ConfigError("G4Accumulator: need at least two batches for error estimates");
    }
    if (planned_shots < batch_count) {
        throw ConfigError("G4Accumulator: need at least one shot per batch");
    }

    auto to_px = [&](double value, const char* what) {
        double px = value / grid.pitch;
        if (std::abs(px - std::round(px)) > 1e-9 * std::max(1.0, std::abs(px))) {
            throw ConfigError(std::string("G4Accumulator: ") + what +
                              " must be an integer number of pixels");
        }
        return int(std::lround(px));
    };

    lags_.resize(layout.scan1.count * layout.scan2.count);
    GridAxis axis1{"", layout.scan1.count, layout.scan1.pitch, layout.scan1.center};
    GridAxis axis2{"", layout.scan2.count, layout.scan2.pitch, layout.scan2.center};
    for (std::size_t i1 = 0; i1 < layout.scan1.count; ++i1) {
        for (std::size_t i2 = 0; i2 < layout.scan2.count; ++i2) {
            double coords[4] = {};  // alice_dx, alice_dy, bob_dx, bob_dy
            auto slot = [&coords](MapCoord c) -> double& {
                return coords[std::size_t(c)];  // difference coords come first in MapCoord
            };
            slot(layout.scan1.coord) = axis1.value(i1);
            slot(layout.scan2.coord) = axis2.value(i2);
            slot(layout.fixed1.coord) = layout.fixed1.value;
            slot(layout.fixed2.coord) = layout.fixed2.value;
            Lag lag{to_px(coords[0], "alice_dx"), to_px(coords[1], "alice_dy"),
                    to_px(coords[2], "bob_dx"), to_px(coords[3], "bob_dy")};
            if ((lag.ax == 0 && lag.ay == 0) || (lag.bx == 0 && lag.by == 0)) {
                throw ConfigError(
                    "G4Accumulator: zero in-pair separation would place two photons on one "
                    "pixel; offset a fixed difference by at least one pixel");
            }
            if (std::size_t(std::abs(lag.ax)) >= w_ || std::size_t(std::abs(lag.ay)) >= w_ ||
                std::size_t(std::abs(lag.bx)) >= w_ || std::size_t(std::abs(lag.by)) >= w_) {
                throw ConfigError("G4Accumulator: pair separation exceeds the analysis window");
            }
            lags_[i1 * layout.scan2.count + i2] = lag;
        }
    }

    std::size_t w2 = w_ * w_;
    counts_.assign(batch_count, 0);
    quartic_.assign(batch_count, std::vector<double>(lags_.size(), 0.0));
    pair_si_.assign(batch_count, std::vector<cplx>(w2 * w2, cplx{}));
    coh_s_.assign(batch_count, std::vector<cplx>(w2 * w2, cplx{}));
    coh_i_.assign(batch_count, std::vector<cplx>(w2 * w2, cplx{}));
}

std::size_t G4Accumulator::batch_of(std::uint64_t shot) const {
    if (shot >= planned_shots_) {
        throw std::invalid_argument("G4Accumulator: shot index beyond the planned run");
    }
    return std::size_t((__uint128_t(shot) * counts_.size()) / planned_shots_);
}

std::pair<std::uint64_t, std::uint64_t> G4Accumulator::batch_range(std::size_t batch) const {
    std::uint64_t nb = counts_.size();
    auto first_of = [&](std::uint64_t b) {
        return std::uint64_t((__uint128_t(b) * planned_shots_ + nb - 1) / nb);
    };
    return {first_of(batch), first_of(batch + 1)};
}

std::size_t G4Accumulator::cell_count() const {
    return lags_.size();
}

void G4Accumulator::add_frame(const FieldFrame& frame) {
    if (frame.n != grid_.n_pixels) {
        throw std::invalid_argument("G4Accumulator: frame grid mismatch");
    }
    std::size_t batch = batch_of(frame.shot_index);
    std::size_t w = w_, w2 = w * w;
    std::size_t origin = grid_.window_origin();

    // window extraction; window pixel (ix, iy) flattens to ix * w + iy
    std::vector<cplx> s(w2), idl(w2);
    std::vector<double> is(w2), ii(w2);
    for (std::size_t ix = 0; ix < w; ++ix) {
        for (std::size_t iy = 0; iy < w; ++iy) {
            std::size_t src = (origin + ix) * frame.n + (origin + iy);
            std::size_t dst = ix * w + iy;
            s[dst] = frame.signal[src];
            idl[dst] = frame.idler[src];
            // symmetric-ordering correction: half a photon per mode
            is[dst] = std::norm(s[dst]) - 0.5;
            ii[dst] = std::norm(idl[dst]) - 0.5;
        }
    }

    auto lag_sum = [w](const std::vector<double>& inten, int dx, int dy) {
        double sum = 0.0;
        int iw = int(w);
        for (int x = std::max(0, -dx); x <= std::min(iw - 1, iw - 1 - dx); ++x) {
            for (int y = std::max(0, -dy); y <= std::min(iw - 1, iw - 1 - dy); ++y) {
                sum += inten[std::size_t(x + dx) * w + std::size_t(y + dy)] *
                       inten[std::size_t(x) * w + std::size_t(y)];
            }
        }
        return sum;
    };

    auto& quart = quartic_[batch];
    for (std::size_t cell = 0; cell < lags_.size(); ++cell) {
        const Lag& lag = lags_[cell];
        quart[cell] += lag_sum(is, lag.ax, lag.ay) * lag_sum(ii, lag.bx, lag.by);
    }

    auto& si = pair_si_[batch];
    auto& cs = coh_s_[batch];
    auto& ci = coh_i_[batch];
    for (std::size_t a = 0; a < w2; ++a) {
        cplx sa = s[a];
        cplx sac = std::conj(sa);
        cplx iac = std::conj(idl[a]);
        for (std::size_t b = 0; b < w2; ++b) {
            si[a * w2 + b] += sa * idl[b];
            cs[a * w2 + b] += sac * s[b];
            ci[a * w2 + b] += iac * idl[b];
        }
    }
    counts_[batch] += 1;
}

void G4Accumulator::merge(const G4Accumulator& other) {
    if (other.counts_.size() != counts_.size() || other.planned_shots_ != planned_shots_ ||
        other.lags_.size() != lags_.size() || other.w_ != w_) {
        throw ConfigError("G4Accumulator: merge layout mismatch");
    }
    // Merging two nonempty halves of the same batch regroups the floating
    // point sums; the runner keeps batches whole, so merges stay bit-exact.
    for (std::size_t b = 0; b < counts_.size(); ++b) {
        if (other.counts_[b] == 0) {
            continue;
        }
        counts_[b] += other.counts_[b];
        for (std::size_t i = 0; i < quartic_[b].size(); ++i) {
            quartic_[b][i] += other.quartic_[b][i];
        }
        for (std::size_t i = 0; i < pair_si_[b].size(); ++i) {
            pair_si_[b][i] += other.pair_si_[b][i];
            coh_s_[b][i] += other.coh_s_[b][i];
            coh_i_[b][i] += other.coh_i_[b][i];
        }
    }
}

std::uint64_t G4Accumulator::shot_count() const {
    std::uint64_t total = 0;
    for (auto c : counts_) {
        total += c;
    }
    return total;
}

CorrelationGrid G4Accumulator::genuine_g4(std::uint64_t min_shots) const {
    std::size_t populated = 0;
    for (auto c : counts_) {
        populated += (c > 0);
    }
    if (shot_count() < std::max<std::uint64_t>(min_shots, 2) || populated < 2) {
        throw InsufficientStatsError("genuine_g4: need at least two shots in two batches");
    }

    std::size_t w = w_, w2 = w * w;
    std::size_t cells = cell_count();

    // anchor tuple lists per cell (window pixel indices of the second photon)
    auto anchors_for = [w](int dx, int dy) {
        std::vector<std::size_t> list;
        int iw = int(w);
        for (int x = std::max(0, -dx); x <= std::min(iw - 1, iw - 1 - dx); ++x) {
            for (int y = std::max(0, -dy); y <= std::min(iw - 1, iw - 1 - dy); ++y) {
                list.push_back(std::size_t(x) * w + std::size_t(y));
            }
        }
        return list;
    };
    auto shifted = [w](std::size_t anchor, int dx, int dy) {
        std::size_t x = anchor / w, y = anchor % w;
        return (x + std::size_t(dx)) * w + (y + std::size_t(dy));
    };

    std::vector<std::vector<double>> batch_values;
    std::vector<double> batch_weights;
    for (std::size_t b = 0; b < counts_.size(); ++b) {
        if (counts_[b] == 0) {
            continue;
        }
        double inv = 1.0 / double(counts_[b]);
        const auto& si = pair_si_[b];
        const auto& cs = coh_s_[b];
        const auto& ci = coh_i_[b];
        auto pair_c = [&](std::size_t a, std::size_t bb) { return si[a * w2 + bb] * inv; };
        auto coh_a = [&](std::size_t a, std::size_t bb) {
            cplx v = cs[a * w2 + bb] * inv;
            return a == bb ? v - cplx(0.5, 0.0) : v;
        };
        auto coh_b = [&](std::size_t a, std::size_t bb) {
            cplx v = ci[a * w2 + bb] * inv;
            return a == bb ? v - cplx(0.5, 0.0) : v;
        };

        std::vector<double> values(cells, 0.0);
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const Lag& lag = lags_[cell];
            auto alice_anchors = anchors_for(lag.ax, lag.ay);
            auto bob_anchors = anchors_for(lag.bx, lag.by);
            double accidental_sum = 0.0;
            for (std::size_t a2 : alice_anchors) {
                std::size_t a1 = shifted(a2, lag.ax, lag.ay);
                std::size_t xs[2] = {a1, a2};
                for (std::size_t b2 : bob_anchors) {
                    std::size_t b1 = shifted(b2, lag.bx, lag.by);
                    std::size_t bs[2] = {b1, b2};
                    cplx c2[2][2], ga[2][2], gb[2][2];
                    for (int i = 0; i < 2; ++i) {
                        for (int j = 0; j < 2; ++j) {
                            c2[i][j] = pair_c(xs[i], bs[j]);
                            ga[i][j] = coh_a(xs[i], xs[j]);
                            gb[i][j] = coh_b(bs[i], bs[j]);
                        }
                    }
                    double g1 = ga[0][0].real(), g2 = ga[1][1].real();
                    double g1p = gb[0][0].real(), g2p = gb[1][1].real();
                    double acc = (g1 * g2 + std::norm(ga[0][1])) * (g1p * g2p + std::norm(gb[0][1]));
                    cplx cross{};
                    for (int i = 0; i < 2; ++i) {
                        for (int j = 0; j < 2; ++j) {
                            for (int k = 0; k < 2; ++k) {
                                for (int l = 0; l < 2; ++l) {
                                    cross += c2[i][j] * std::conj(c2[k][l]) * ga[1 - k][1 - i] *
                                             gb[1 - l][1 - j];
                                }
                            }
                        }
                    }
                    accidental_sum += acc + cross.real();
                }
            }
            double tuples = double(alice_anchors.size() * bob_anchors.size());
            values[cell] = quartic_[b][cell] * inv / tuples - accidental_sum / tuples;
        }
        batch_values.push_back(std::move(values));
        batch_weights.push_back(double(counts_[b]));
    }

    CorrelationGrid grid;
    grid.axis1 = {std::string(to_string(layout_.scan1.coord)) + "_um", layout_.scan1.count,
                  layout_.scan1.pitch, layout_.scan1.center};
    grid.axis2 = {std::string(to_string(layout_.scan2.coord)) + "_um", layout_.scan2.count,
                  layout_.scan2.pitch, layout_.scan2.center};
    grid.values.assign(cells, 0.0);
    grid.sigma.assign(cells, 0.0);

    double weight_total = 0.0;
    for (double wgt : batch_weights) {
        weight_total += wgt;
    }
    std::size_t nb = batch_values.size();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        double mean = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            mean += batch_weights[b] * batch_values[b][cell];
        }
        mean /= weight_total;
        double var = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            double dev = batch_values[b][cell] - mean;
            var += batch_weights[b] * dev * dev;
        }
        var /= weight_total;
        grid.values[cell] = mean;
        grid.sigma[cell] = std::sqrt(var / double(nb - 1));
    }

    grid.metadata["kind"] = "genuine_g4";
    grid.metadata["averaging"] = "window";
    grid.metadata["window_px"] = std::to_string(w_);
    grid.metadata["window_pitch_um"] = format_double(grid_.pitch);
    grid.metadata["fixed." + std::string(to_string(layout_.fixed1.coord)) + "_um"] =
        format_double(layout_.fixed1.value);
    grid.metadata["fixed." + std::string(to_string(layout_.fixed2.coord)) + "_um"] =
        format_double(layout_.fixed2.value);
    grid.metadata["normalization"] = "raw";
    grid.metadata["shots"] = std::to_string(shot_count());
    grid.metadata["batches"] = std::to_string(nb);
    return grid;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'Q', 'I', 'M', 'G', '4', 'A', '0', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void put_axis(std::ostream& out, const ScanAxisSpec& a) {
    put(out, std::uint8_t(a.coord));
    put(out, std::uint64_t(a.count));
    put(out, a.pitch);
    put(out, a.center);
}

ScanAxisSpec get_axis(std::istream& in) {
    ScanAxisSpec a;
    a.coord = MapCoord(get<std::uint8_t>(in));
    a.count = std::size_t(get<std::uint64_t>(in));
    a.pitch = get<double>(in);
    a.center = get<double>(in);
    return a;
}

}  // namespace

void G4Accumulator::save(const std::filesystem::path& path, std::uint64_t config_hash) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write checkpoint: " + path.string());
    }
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put(out, config_hash);
    put(out, planned_shots_);
    put(out, std::uint64_t(counts_.size()));
    put(out, std::uint64_t(grid_.n_pixels));
    put(out, grid_.pitch);
    put(out, std::uint64_t(grid_.window));
    put_axis(out, layout_.scan1);
    put_axis(out, layout_.scan2);
    put(out, std::uint8_t(layout_.fixed1.coord));
    put(out, layout_.fixed1.value);
    put(out, std::uint8_t(layout_.fixed2.coord));
    put(out, layout_.fixed2.value);
    for (std::size_t b = 0; b < counts_.size(); ++b) {
        put(out, counts_[b]);
        out.write(reinterpret_cast<const char*>(quartic_[b].data()),
                  std::streamsize(quartic_[b].size() * sizeof(double)));
        auto put_cvec = [&out](const std::vector<cplx>& v) {
            out.write(reinterpret_cast<const char*>(v.data()),
                      std::streamsize(v.size() * sizeof(cplx)));
        };
        put_cvec(pair_si_[b]);
        put_cvec(coh_s_[b]);
        put_cvec(coh_i_[b]);
    }
    if (!out) {
        throw ConfigError("checkpoint write failed: " + path.string());
    }
}

G4Accumulator G4Accumulator::load(const std::filesystem::path& path, std::uint64_t config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read checkpoint: " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw ConfigError("not a checkpoint file: " + path.string());
    }
    std::uint64_t stored_hash = get<std::uint64_t>(in);
    if (stored_hash != config_hash) {
        throw ConfigError("checkpoint does not match the run configuration");
    }
    std::uint64_t planned = get<std::uint64_t>(in);
    std::uint64_t batches = get<std::uint64_t>(in);
    GridSpec grid;
    grid.n_pixels = std::size_t(get<std::uint64_t>(in));
    grid.pitch = get<double>(in);
    grid.window = std::size_t(get<std::uint64_t>(in));
    MapSpec layout;
    layout.scan1 = get_axis(in);
    layout.scan2 = get_axis(in);
    layout.fixed1.coord = MapCoord(get<std::uint8_t>(in));
    layout.fixed1.value = get<double>(in);
    layout.fixed2.coord = MapCoord(get<std::uint8_t>(in));
    layout.fixed2.value = get<double>(in);
    layout.averaging = AveragingMode::DetectorWindow;
    layout.window = grid.window;
    layout.window_pitch = grid.pitch;
    G4Accumulator acc(grid, layout, std::size_t(batches), planned);
    for (std::size_t b = 0; b < acc.counts_.size(); ++b) {
        acc.counts_[b] = get<std::uint64_t>(in);
        in.read(reinterpret_cast<char*>(acc.quartic_[b].data()),
                std::streamsize(acc.quartic_[b].size() * sizeof(double)));
        auto get_cvec = [&in](std::vector<cplx>& v) {
            in.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(cplx)));
        };
        get_cvec(acc.pair_si_[b]);
        get_cvec(acc.coh_s_[b]);
        get_cvec(acc.coh_i_[b]);
    }
    if (!in) {
        throw ConfigError("checkpoint truncated: " + path.string());
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Shot runner
// ---------------------------------------------------------------------------

void run_shots(const ShotPipeline& pipeline, std::uint64_t seed, G4Accumulator& acc,
               std::uint64_t max_new_shots, unsigned workers) {
    if (workers == 0) {
        workers = 1;
    }
    if (!pipeline.gain.calibrated()) {
        throw std::invalid_argument("run_shots: gain profile not calibrated");
    }
    // allocate the budget over the missing shots in global order
    struct Slice {
        std::size_t batch;
        std::uint64_t lo, hi;
    };
    std::vector<Slice> plan;
    std::uint64_t budget = max_new_shots;
    for (std::size_t b = 0; b < acc.batch_count() && budget > 0; ++b) {
        auto [lo, hi] = acc.batch_range(b);
        lo += acc.batch_done(b);
        if (lo >= hi) {
            continue;
        }
        std::uint64_t take = std::min<std::uint64_t>(budget, hi - lo);
        plan.push_back({b, lo, lo + take});
        budget -= take;
    }
    auto run_slice = [&](const Slice& slice) {
        for (std::uint64_t shot = slice.lo; shot < slice.hi; ++shot) {
            FieldFrame frame = sample_vacuum(pipeline.grid, seed, shot);
            apply_gain(frame, pipeline.gain);
            propagate(frame, pipeline.source.z, pipeline.source.z_prime, pipeline.source.k);
            acc.add_frame(frame);
        }
    };
    if (workers == 1 || plan.size() == 1) {
        for (const Slice& s : plan) {
            run_slice(s);
        }
        return;
    }
    // whole batches per worker: the accumulator slots touched by different
    // workers are disjoint
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
        pool.emplace_back([&, wkr]() {
            for (std::size_t i = wkr; i < plan.size(); i += workers) {
                run_slice(plan[i]);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace qimcorr
