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

#ifndef MMTRACK_SYNTH_HPP
#define MMTRACK_SYNTH_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mmtrack/random.hpp"
#include "mmtrack/scene.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

using Sample = std::complex<double>;

/// Common receiver phase process: constant frequency offset plus a Wiener phase walk.
struct CfoModel {
    double offset_hz = 0.0;
    double phase_walk_std = 0.0;  // rad per sqrt(sample)
};

/// Draws a CFO offset uniformly in [-max_offset_hz, max_offset_hz] from `seed`.
CfoModel draw_cfo(std::uint64_t seed, double phase_walk_std, double max_offset_hz = 10e3);

struct RadioConfig {
    double carrier_hz = 60.48e9;
    double sample_period_s = 5e-7;
    double detection_interval_s = 0.05;
    std::array<double, 3> path_gains{1.0, 0.5, 0.5};
    std::array<double, 3> initial_phases_rad{0.0, 0.0, 0.0};
    CfoModel cfo;
    /// Per-path SNR; an empty entry disables noise on that path.
    std::array<std::optional<double>, 3> snr_db{};
    std::uint64_t seed = 1;

    /// N_0 = T_d / T_s. Throws ConfigError unless it is a positive integer.
    std::size_t samples_per_interval() const;
    /// Throws ConfigError naming the offending `radio.*` field.
    void validate() const;
};

/// Three synchronized receive streams (LoS, wall 1, wall 2).
struct BasebandCapture {
    std::array<std::vector<Sample>, 3> streams;
    double sample_period_s = 0.0;
    double carrier_hz = 0.0;
    std::size_t samples_per_interval = 0;
    std::uint64_t seed = 0;

    std::size_t length() const { return streams[0].size(); }
    /// Number of whole detection intervals held by the capture.
    std::size_t num_detection_instants() const {
        return samples_per_interval == 0 ? 0 : length() / samples_per_interval;
    }
};

/// Doppler frequency of each path (LoS first) at time t.
using DopplerProfile = std::function<std::array<double, 3>(double t)>;

DopplerProfile trajectory_doppler(const Scene& scene, const Trajectory& traj);

/// Unit-modulus symbols with uniformly random phases, deterministic per seed.
std::vector<Sample> generate_waveform(std::size_t len, std::uint64_t seed);

/// phi_o[n] = 2 pi f_o n T_s + W[n], W[0] = 0, W[n] - W[n-1] ~ N(0, std^2).
std::vector<double> cfo_phase_process(const CfoModel& model, std::size_t num_samples,
                                      double sample_period_s, std::uint64_t seed);

/// Sequential block generator for a capture.
///
/// y_i[n] = (h_i s[n] exp(j(Phi_i[n] - phi_i0)) + n_i[n]) exp(-j phi_o[n]), where Phi_i is the
/// left Riemann sum of 2 pi f_i T_s. The receiver phase process multiplies noise and signal
/// alike. Block boundaries do not affect the output.
class CaptureSynthesizer {
public:
    CaptureSynthesizer(DopplerProfile doppler, const RadioConfig& cfg, std::uint64_t total_samples);

    /// Writes up to out[0].size() samples per path; returns the count written (0 at the end).
    std::size_t next(std::array<std::span<Sample>, 3> out);

    std::uint64_t position() const { return position_; }
    std::uint64_t total() const { return total_; }
    const RadioConfig& config() const { return cfg_; }

private:
    DopplerProfile doppler_;
    RadioConfig cfg_;
    std::uint64_t total_;
    std::uint64_t position_ = 0;

    IndexedUniform waveform_;
    std::array<IndexedNormal, 3> noise_;
    IndexedNormal walk_noise_;
    std::array<double, 3> noise_std_{};

    // Compensated running sums of the Doppler phase and the CFO walk.
    std::array<double, 3> doppler_phase_{};
    std::array<double, 3> doppler_comp_{};
    double walk_ = 0.0;

    std::vector<double> scratch_;
};

/// Number of samples covering `duration_s` at the configured rate.
std::uint64_t capture_samples(const RadioConfig& cfg, double duration_s);

/// Materializes a capture driven by a scene and trajectory. `duration_s` defaults to the
/// trajectory duration; a longer request throws DurationMismatchError.
BasebandCapture synthesize_capture(const Scene& scene, const Trajectory& traj, const RadioConfig& cfg,
                                   std::optional<double> duration_s = std::nullopt);

/// Materializes a capture from explicit per-path Doppler frequencies.
BasebandCapture synthesize_capture(DopplerProfile doppler, const RadioConfig& cfg, double duration_s);

}  // namespace mmtrack

#endif  // MMTRACK_SYNTH_HPP
