// SPDX-License-Identifier: Apache-2.0
//
// mmtrack: uplink mmWave trajectory tracking from multi-path Doppler differences
// Copyright (C) 2026 The mmtrack authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmtrack/detect.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mmtrack/errors.hpp"
#include "mmtrack/random.hpp"

namespace mmtrack {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class ForwardFft {
public:
    explicit ForwardFft(std::size_t n) : n_(n) {
        buffer_ = fftw_alloc_complex(n);
        if (buffer_ == nullptr) {
            throw std::bad_alloc();
        }
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~ForwardFft() {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(buffer_);
    }
    ForwardFft(const ForwardFft&) = delete;
    ForwardFft& operator=(const ForwardFft&) = delete;

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buffer_); }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan plan_ = nullptr;
};

ForwardFft& fft_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<ForwardFft>> cache;
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<ForwardFft>(n);
    }
    return *slot;
}

}  // namespace

void DetectorConfig::validate(std::size_t samples_per_interval) const {
    const std::size_t nw = effective_window(samples_per_interval);
    if (nw < 1 || nw > samples_per_interval) {
        throw ConfigError("detector.window_len", "must lie in [1, N_0]");
    }
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw ConfigError("detector.gamma", "must exceed 1");
    }
    if (half_train < 1) {
        throw ConfigError("detector.half_train", "must be at least 1");
    }
    if (decimation < 1) {
        throw ConfigError("detector.decimation", "must be at least 1");
    }
    if (nw % decimation != 0) {
        throw ConfigError("detector.decimation", "must divide the CAF window length");
    }
    if (zero_pad_factor < 1) {
        throw ConfigError("detector.zero_pad_factor", "must be at least 1");
    }
    if (!(max_abs_mddoa_hz >= 0.0) || !std::isfinite(max_abs_mddoa_hz)) {
        throw ConfigError("detector.max_abs_mddoa_hz", "must be non-negative");
    }
    if (!(aoa_noise_std_rad >= 0.0) || !std::isfinite(aoa_noise_std_rad)) {
        throw ConfigError("detector.aoa_noise_std_rad", "must be non-negative");
    }
    if (!(aoa_quant_step_rad >= 0.0) || !std::isfinite(aoa_quant_step_rad)) {
        throw ConfigError("detector.aoa_quant_step_rad", "must be non-negative");
    }
}

double CafSpectrum::frequency(std::size_t j) const {
    const double first = std::round(grid_start_hz / bin_width_hz);
    return (first + static_cast<double>(j)) * bin_width_hz;
}

CafSpectrum caf(std::span<const Sample> los, std::span<const Sample> nlos, double sample_period_s,
                const DetectorConfig& cfg, std::size_t k, Path path) {
    if (los.size() != nlos.size() || los.empty()) {
        throw std::invalid_argument("CAF windows must be non-empty and of equal length");
    }
    const std::size_t nw = los.size();
    const std::size_t dec = cfg.decimation;
    if (dec == 0 || nw % dec != 0) {
        throw std::invalid_argument("decimation must divide the CAF window length");
    }
    const std::size_t nd = nw / dec;
    const std::size_t nfft = nd * std::max<std::size_t>(cfg.zero_pad_factor, 1);

    ForwardFft& fft = fft_for(nfft);
    std::complex<double>* buf = fft.data();
    // Integrate-and-dump low-pass ahead of decimation.
    for (std::size_t m = 0; m < nd; ++m) {
        std::complex<double> acc{};
        for (std::size_t l = 0; l < dec; ++l) {
            const std::size_t n = m * dec + l;
            acc += nlos[n] * std::conj(los[n]);
        }
        buf[m] = acc;
    }
    std::fill(buf + nd, buf + nfft, std::complex<double>{});
    fft.execute();

    CafSpectrum out;
    out.k = k;
    out.path = path;
    const double decimated_period = sample_period_s * static_cast<double>(dec);
    out.bin_width_hz = 1.0 / (static_cast<double>(nfft) * decimated_period);
    out.resolution_hz = 1.0 / (static_cast<double>(nw) * sample_period_s);
    const std::size_t half = nfft / 2;
    out.grid_start_hz = -static_cast<double>(half) / (static_cast<double>(nfft) * decimated_period);
    out.bins.resize(nfft);
    out.magnitude.resize(nfft);
    for (std::size_t j = 0; j < nfft; ++j) {
        const std::size_t u = (j + nfft - half) % nfft;
        out.bins[j] = buf[u];
        out.magnitude[j] = std::abs(buf[u]);
    }
    return out;
}

CafSpectrum caf(const BasebandCapture& capture, std::size_t k, Path path, const DetectorConfig& cfg) {
    if (path == Path::kLos) {
        throw std::invalid_argument("CAF is defined for the NLoS paths only");
    }
    const std::size_t n0 = capture.samples_per_interval;
    const std::size_t nw = cfg.effective_window(n0);
    const std::size_t start = k * n0;
    if (start + nw > capture.length()) {
        throw std::out_of_range("CAF window for instant " + std::to_string(k) + " exceeds the capture");
    }
    const auto i = static_cast<std::size_t>(path) - 1;
    return caf(std::span<const Sample>(capture.streams[0]).subspan(start, nw),
               std::span<const Sample>(capture.streams[i]).subspan(start, nw), capture.sample_period_s,
               cfg, k, path);
}

std::vector<double> adaptive_threshold(const CafSpectrum& spectrum, const DetectorConfig& cfg) {
    const std::size_t n = spectrum.size();
    const std::size_t w = cfg.half_train;
    std::vector<double> beta(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j >= w ? j - w : 0;
        const std::size_t hi = std::min(n - 1, j + w);
        double sum = 0.0;
        for (std::size_t q = lo; q <= hi; ++q) {
            sum += spectrum.magnitude[q];
        }
        beta[j] = cfg.gamma * sum / static_cast<double>(hi - lo + 1);
    }
    return beta;
}

std::vector<std::size_t> passing_bins(const CafSpectrum& spectrum, const DetectorConfig& cfg) {
    const std::vector<double> beta = adaptive_threshold(spectrum, cfg);
    std::vector<std::size_t> passing;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        if (cfg.max_abs_mddoa_hz > 0.0 && std::abs(spectrum.frequency(j)) > cfg.max_abs_mddoa_hz) {
            continue;
        }
        if (spectrum.magnitude[j] > 0.0 && spectrum.magnitude[j] >= beta[j]) {
            passing.push_back(j);
        }
    }
    return passing;
}

std::optional<double> detect_mddoa(const CafSpectrum& spectrum, const DetectorConfig& cfg) {
    const std::vector<std::size_t> passing = passing_bins(spectrum, cfg);
    if (passing.empty()) {
        return std::nullopt;
    }
    std::size_t best = passing.front();
    for (std::size_t j : passing) {
        if (spectrum.magnitude[j] > spectrum.magnitude[best]) {
            best = j;
        }
    }
    double offset = 0.0;
    if (cfg.parabolic_interpolation && best > 0 && best + 1 < spectrum.size()) {
        const double a = spectrum.magnitude[best - 1];
        const double b = spectrum.magnitude[best];
        const double c = spectrum.magnitude[best + 1];
        const double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
        }
    }
    const double f = spectrum.frequency(best) + offset * spectrum.bin_width_hz;
    return std::round(f * 1e6) / 1e6 + 0.0;  // + 0.0 folds -0 into 0
}

double observe_aoa(const Scene& scene, const Trajectory& traj, std::size_t k, double detection_interval_s,
                   const DetectorConfig& cfg, std::uint64_t seed) {
    (void)scene;
    const double t = static_cast<double>(k) * detection_interval_s;
    double aoa = los_aoa(traj.position(t));
    if (cfg.aoa_noise_std_rad > 0.0) {
        std::mt19937_64 engine(derive_seed(seed, Stream::kAoa, k));
        std::normal_distribution<double> normal(0.0, cfg.aoa_noise_std_rad);
        aoa += normal(engine);
    }
    if (cfg.aoa_quant_step_rad > 0.0) {
        aoa = std::round(aoa / cfg.aoa_quant_step_rad) * cfg.aoa_quant_step_rad;
    }
    return wrap_angle(aoa);
}

std::array<std::optional<double>, 2> detect_interval(std::array<std::span<const Sample>, 3> interval,
                                                     std::size_t k, double sample_period_s,
                                                     const DetectorConfig& cfg,
                                                     const SpectrumObserver& observer) {
    const std::size_t nw = cfg.effective_window(interval[0].size());
    std::array<std::optional<double>, 2> out;
    for (std::size_t i = 0; i < 2; ++i) {
        const Path path = i == 0 ? Path::kWall1 : Path::kWall2;
        const CafSpectrum spectrum =
            caf(interval[0].first(nw), interval[i + 1].first(nw), sample_period_s, cfg, k, path);
        if (observer) {
            observer(spectrum);
        }
        out[i] = detect_mddoa(spectrum, cfg);
    }
    return out;
}

DetectionSeries run_detection(const BasebandCapture& capture, const Scene& scene, const Trajectory& traj,
                              const DetectorConfig& cfg, std::uint64_t aoa_seed,
                              const SpectrumObserver& observer) {
    const std::size_t n0 = capture.samples_per_interval;
    cfg.validate(n0);
    const double td = capture.sample_period_s * static_cast<double>(n0);
    DetectionSeries series;
    series.detection_interval_s = td;
    const std::size_t count = capture.num_detection_instants();
    series.records.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::array<std::span<const Sample>, 3> interval;
        for (std::size_t i = 0; i < 3; ++i) {
            interval[i] = std::span<const Sample>(capture.streams[i]).subspan(k * n0, n0);
        }
        DetectionRecord rec;
        rec.k = k;
        rec.t_s = static_cast<double>(k) * td;
        rec.mddoa_hz = detect_interval(interval, k, capture.sample_period_s, cfg, observer);
        rec.valid = {rec.mddoa_hz[0].has_value(), rec.mddoa_hz[1].has_value()};
        rec.aoa_rad = observe_aoa(scene, traj, k, td, cfg, aoa_seed);
        series.records.push_back(rec);
    }
    return series;
}

}  // namespace mmtrack
