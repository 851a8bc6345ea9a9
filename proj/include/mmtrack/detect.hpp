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

#ifndef MMTRACK_DETECT_HPP
#define MMTRACK_DETECT_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mmtrack/scene.hpp"
#include "mmtrack/synth.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

struct DetectorConfig {
    /// CAF window N_w in samples; 0 selects the full detection interval N_0.
    std::size_t window_len = 0;
    double gamma = 3.0;
    std::size_t half_train = 16;
    std::size_t decimation = 8;
    std::size_t zero_pad_factor = 4;
    /// Peaks are only accepted within +-max_abs_mddoa_hz; 0 searches the whole grid.
    double max_abs_mddoa_hz = 2000.0;
    bool parabolic_interpolation = true;
    double aoa_noise_std_rad = 0.0;
    double aoa_quant_step_rad = 0.0;

    std::size_t effective_window(std::size_t samples_per_interval) const {
        return window_len == 0 ? samples_per_interval : window_len;
    }
    /// Throws ConfigError naming the offending `detector.*` field.
    void validate(std::size_t samples_per_interval) const;
};

/// Cross ambiguity function of one NLoS stream against the LoS stream over one window.
///
/// Bins are ordered by frequency on an integer multiple grid of bin_width_hz starting at grid_start_hz.
struct CafSpectrum {
    std::size_t k = 0;
    Path path = Path::kWall1;
    std::vector<std::complex<double>> bins;
    std::vector<double> magnitude;
    double grid_start_hz = 0.0;
    double bin_width_hz = 0.0;
    /// Doppler resolution 1 / (N_w T_s).
    double resolution_hz = 0.0;

    std::size_t size() const { return magnitude.size(); }
    double frequency(std::size_t j) const;
};

/// CAF from explicit window samples (equal lengths, a multiple of the decimation factor).
CafSpectrum caf(std::span<const Sample> los, std::span<const Sample> nlos, double sample_period_s,
                const DetectorConfig& cfg, std::size_t k = 0, Path path = Path::kWall1);

/// CAF for detection instant k over [k N_0, k N_0 + N_w). Throws std::out_of_range past the capture.
CafSpectrum caf(const BasebandCapture& capture, std::size_t k, Path path, const DetectorConfig& cfg);

/// Cell-averaging threshold; windows are truncated at the grid edges.
std::vector<double> adaptive_threshold(const CafSpectrum& spectrum, const DetectorConfig& cfg);

/// Bins whose magnitude reaches the threshold and lie in the search band.
std::vector<std::size_t> passing_bins(const CafSpectrum& spectrum, const DetectorConfig& cfg);

/// Strongest passing bin, optionally refined by a three-point parabola and reported on a
/// 1 uHz grid. Empty when nothing passes.
std::optional<double> detect_mddoa(const CafSpectrum& spectrum, const DetectorConfig& cfg);

/// Bearing observation: truth plus Gaussian noise, then rounded to the quantization grid.
double observe_aoa(const Scene& scene, const Trajectory& traj, std::size_t k, double detection_interval_s,
                   const DetectorConfig& cfg, std::uint64_t seed);

struct DetectionRecord {
    std::size_t k = 0;
    double t_s = 0.0;
    std::array<std::optional<double>, 2> mddoa_hz;
    std::array<bool, 2> valid{false, false};
    double aoa_rad = 0.0;
};

struct DetectionSeries {
    double detection_interval_s = 0.0;
    std::vector<DetectionRecord> records;

    std::size_t size() const { return records.size(); }
};

/// Receives every CAF computed during detection.
using SpectrumObserver = std::function<void(const CafSpectrum&)>;

/// MDDoA estimates for one detection interval; `interval` holds samples [k N_0, (k+1) N_0).
std::array<std::optional<double>, 2> detect_interval(std::array<std::span<const Sample>, 3> interval,
                                                     std::size_t k, double sample_period_s,
                                                     const DetectorConfig& cfg,
                                                     const SpectrumObserver& observer = {});

DetectionSeries run_detection(const BasebandCapture& capture, const Scene& scene, const Trajectory& traj,
                              const DetectorConfig& cfg, std::uint64_t aoa_seed,
                              const SpectrumObserver& observer = {});

}  // namespace mmtrack

#endif  // MMTRACK_DETECT_HPP
