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

#include "mmtrack/synth.hpp"

#include <cmath>
#include <string>

#include "mmtrack/errors.hpp"

namespace mmtrack {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::uint64_t noise_seed(std::uint64_t seed, int path) {
    return derive_seed(seed, Stream::kNoise, static_cast<std::uint64_t>(path));
}

std::uint64_t walk_seed(std::uint64_t seed) { return derive_seed(seed, Stream::kCfoWalk); }

}  // namespace

CfoModel draw_cfo(std::uint64_t seed, double phase_walk_std, double max_offset_hz) {
    std::mt19937_64 engine(derive_seed(seed, Stream::kCfoOffset));
    std::uniform_real_distribution<double> uniform(-max_offset_hz, max_offset_hz);
    return {uniform(engine), phase_walk_std};
}

std::size_t RadioConfig::samples_per_interval() const {
    if (!(sample_period_s > 0.0) || !std::isfinite(sample_period_s)) {
        throw ConfigError("radio.sample_period_s", "must be positive");
    }
    if (!(detection_interval_s > 0.0) || !std::isfinite(detection_interval_s)) {
        throw ConfigError("radio.detection_interval_s", "must be positive");
    }
    const double ratio = detection_interval_s / sample_period_s;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw ConfigError("radio.detection_interval_s", "must be an integer multiple of sample_period_s");
    }
    return static_cast<std::size_t>(rounded);
}

void RadioConfig::validate() const {
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        throw ConfigError("radio.carrier_hz", "must be positive");
    }
    samples_per_interval();
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(path_gains[i] >= 0.0) || !std::isfinite(path_gains[i])) {
            throw ConfigError("radio.path_gains[" + std::to_string(i) + "]", "must be non-negative");
        }
        if (!std::isfinite(initial_phases_rad[i])) {
            throw ConfigError("radio.initial_phases_rad[" + std::to_string(i) + "]", "must be finite");
        }
        if (snr_db[i] && !std::isfinite(*snr_db[i])) {
            throw ConfigError("radio.snr_db[" + std::to_string(i) + "]", "must be finite or null");
        }
    }
    if (path_gains[1] > path_gains[0] || path_gains[2] > path_gains[0]) {
        throw ConfigError("radio.path_gains", "LoS gain must not be below an NLoS gain");
    }
    if (!(cfo.phase_walk_std >= 0.0) || !std::isfinite(cfo.phase_walk_std)) {
        throw ConfigError("radio.cfo.phase_walk_std_rad", "must be non-negative");
    }
    if (!std::isfinite(cfo.offset_hz)) {
        throw ConfigError("radio.cfo.offset_hz", "must be finite");
    }
}

DopplerProfile trajectory_doppler(const Scene& scene, const Trajectory& traj) {
    return [scene, traj](double t) {
        return std::array<double, 3>{true_doppler(scene, traj, t, Path::kLos),
                                     true_doppler(scene, traj, t, Path::kWall1),
                                     true_doppler(scene, traj, t, Path::kWall2)};
    };
}

std::vector<Sample> generate_waveform(std::size_t len, std::uint64_t seed) {
    std::vector<double> u(len);
    IndexedUniform(seed).fill(0, u);
    std::vector<Sample> s(len);
    for (std::size_t n = 0; n < len; ++n) {
        s[n] = std::polar(1.0, kTwoPi * u[n]);
    }
    return s;
}

std::vector<double> cfo_phase_process(const CfoModel& model, std::size_t num_samples,
                                      double sample_period_s, std::uint64_t seed) {
    std::vector<double> z(num_samples);
    if (model.phase_walk_std > 0.0) {
        IndexedNormal(walk_seed(seed)).fill(0, z);
    }
    std::vector<double> phase(num_samples);
    double walk = 0.0;
    for (std::size_t n = 0; n < num_samples; ++n) {
        if (n > 0) {
            walk += model.phase_walk_std * z[n];
        }
        phase[n] = kTwoPi * model.offset_hz * sample_period_s * static_cast<double>(n) + walk;
    }
    return phase;
}

CaptureSynthesizer::CaptureSynthesizer(DopplerProfile doppler, const RadioConfig& cfg,
                                       std::uint64_t total_samples)
    : doppler_(std::move(doppler)),
      cfg_(cfg),
      total_(total_samples),
      waveform_(cfg.seed),
      noise_{IndexedNormal(noise_seed(cfg.seed, 1)), IndexedNormal(noise_seed(cfg.seed, 2)),
             IndexedNormal(noise_seed(cfg.seed, 3))},
      walk_noise_(walk_seed(cfg.seed)) {
    cfg_.validate();
    for (std::size_t i = 0; i < 3; ++i) {
        if (cfg_.snr_db[i]) {
            // A silent path keeps the noise floor of a unit-gain path.
            const double gain = cfg_.path_gains[i] > 0.0 ? cfg_.path_gains[i] : 1.0;
            const double noise_power = gain * gain * std::pow(10.0, -*cfg_.snr_db[i] / 10.0);
            noise_std_[i] = std::sqrt(noise_power / 2.0);
        }
    }
}

std::size_t CaptureSynthesizer::next(std::array<std::span<Sample>, 3> out) {
    const std::uint64_t remaining = total_ - position_;
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, out[0].size()));
    if (count == 0) {
        return 0;
    }
    const double ts = cfg_.sample_period_s;

    // scratch layout: waveform phase | walk increments | 3 x (re, im) noise
    scratch_.resize(count * 8);
    std::span<double> wave(scratch_.data(), count);
    std::span<double> walk(scratch_.data() + count, count);
    waveform_.fill(position_, wave);
    if (cfg_.cfo.phase_walk_std > 0.0) {
        walk_noise_.fill(position_, walk);
    }
    std::array<std::span<double>, 3> noise;
    for (std::size_t i = 0; i < 3; ++i) {
        noise[i] = std::span<double>(scratch_.data() + count * (2 + 2 * i), 2 * count);
        if (cfg_.snr_db[i]) {
            noise_[i].fill(2 * position_, noise[i]);
        }
    }

    for (std::size_t j = 0; j < count; ++j) {
        const std::uint64_t n = position_ + j;
        if (n > 0) {
            walk_ += cfg_.cfo.phase_walk_std * walk[j];
        }
        const double cfo_phase =
            kTwoPi * cfg_.cfo.offset_hz * ts * static_cast<double>(n) + walk_;
        const Sample rx_rotation = std::polar(1.0, -cfo_phase);
        const Sample s = std::polar(1.0, kTwoPi * wave[j]);
        const std::array<double, 3> f = doppler_(static_cast<double>(n) * ts);

        for (std::size_t i = 0; i < 3; ++i) {
            const double phi = doppler_phase_[i] + doppler_comp_[i];
            const Sample clean = cfg_.path_gains[i] * s * std::polar(1.0, phi - cfg_.initial_phases_rad[i]);
            Sample y = clean;
            if (cfg_.snr_db[i]) {
                y += Sample(noise_std_[i] * noise[i][2 * j], noise_std_[i] * noise[i][2 * j + 1]);
            }
            out[i][j] = y * rx_rotation;

            // Neumaier-compensated accumulation of Phi_i[n + 1].
            const double inc = kTwoPi * f[i] * ts;
            const double sum = doppler_phase_[i] + inc;
            if (std::abs(doppler_phase_[i]) >= std::abs(inc)) {
                doppler_comp_[i] += (doppler_phase_[i] - sum) + inc;
            } else {
                doppler_comp_[i] += (inc - sum) + doppler_phase_[i];
            }
            doppler_phase_[i] = sum;
        }
    }
    position_ += count;
    return count;
}

std::uint64_t capture_samples(const RadioConfig& cfg, double duration_s) {
    const double n = std::floor(duration_s / cfg.sample_period_s + 1e-9);
    if (!(n >= 1.0)) {
        throw DurationMismatchError("capture duration shorter than one sample");
    }
    return static_cast<std::uint64_t>(n);
}

BasebandCapture synthesize_capture(DopplerProfile doppler, const RadioConfig& cfg, double duration_s) {
    cfg.validate();
    const std::uint64_t total = capture_samples(cfg, duration_s);
    CaptureSynthesizer synth(std::move(doppler), cfg, total);
    BasebandCapture capture;
    capture.sample_period_s = cfg.sample_period_s;
    capture.carrier_hz = cfg.carrier_hz;
    capture.samples_per_interval = cfg.samples_per_interval();
    capture.seed = cfg.seed;
    for (auto& s : capture.streams) {
        s.resize(total);
    }
    synth.next({std::span<Sample>(capture.streams[0]), std::span<Sample>(capture.streams[1]),
                std::span<Sample>(capture.streams[2])});
    return capture;
}

BasebandCapture synthesize_capture(const Scene& scene, const Trajectory& traj, const RadioConfig& cfg,
                                   std::optional<double> duration_s) {
    const double duration = duration_s.value_or(traj.duration());
    if (duration > traj.duration()) {
        throw DurationMismatchError("trajectory is shorter than the requested capture");
    }
    return synthesize_capture(trajectory_doppler(scene, traj), cfg, duration);
}

}  // namespace mmtrack
