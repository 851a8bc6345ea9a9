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

#ifndef MMTRACK_SCENARIO_HPP
#define MMTRACK_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmtrack/detect.hpp"
#include "mmtrack/scene.hpp"
#include "mmtrack/smooth.hpp"
#include "mmtrack/synth.hpp"
#include "mmtrack/track.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

/// Scene as written in a scenario file: the BS may sit anywhere.
struct SceneSpec {
    Point2 bs_m;
    std::array<Wall, 2> walls;
    double carrier_hz = 60.48e9;
};

/// Everything needed for one end-to-end run.
///
/// Positions in the file are in the user's frame. scene() and trajectory() return the frame
/// with the BS at the origin; add `scene_spec.bs_m` to map results back.
struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";

    SceneSpec scene_spec;
    std::vector<Waypoint> waypoints;
    Interpolation interpolation = Interpolation::kPiecewiseLinear;
    /// Capture length; defaults to the trajectory duration.
    std::optional<double> duration_s;

    RadioConfig radio;
    /// Fixed CFO offset; empty draws one from the seed.
    std::optional<double> cfo_offset_hz = 0.0;
    double max_cfo_offset_hz = 10e3;

    DetectorConfig detector;
    SmootherConfig smoother;
    SolverConfig solver;
    /// Residual normalizers; empty selects the CAF resolution and the AoA noise level.
    std::optional<double> doppler_unit_hz;
    std::optional<double> aoa_unit_rad;
    TrackMode track_mode = TrackMode::kSequential;
    unsigned workers = 0;

    bool write_capture = false;
    bool write_spectrogram = true;

    Scene scene() const;
    Trajectory trajectory() const;
    double capture_duration_s() const;
    /// Whole detection intervals covered by the capture.
    std::size_t num_instants() const;

    /// Propagates the seed, draws a random CFO when requested and fills automatic units.
    void resolve();
    /// Throws ConfigError with the offending field path.
    void validate() const;
};

/// Parses and resolves a scenario document. Unknown keys are rejected.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& file);
nlohmann::json load_json(const std::filesystem::path& file);

/// Resolved configuration in the scenario file format (re-parsable).
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Replaces the seed and re-resolves seed-dependent values.
Scenario with_seed(Scenario scenario, std::uint64_t seed);

/// Sets a dotted path such as "radio.snr_db" or "detector.gamma" inside a scenario document.
/// Missing intermediate objects are created; ConfigError when one exists but is not an object.
/// A number assigned onto an array overwrites every element.
void set_json_path(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

}  // namespace mmtrack

#endif  // MMTRACK_SCENARIO_HPP
