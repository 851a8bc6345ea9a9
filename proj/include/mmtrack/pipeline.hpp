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

#ifndef MMTRACK_PIPELINE_HPP
#define MMTRACK_PIPELINE_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmtrack/detect.hpp"
#include "mmtrack/metrics.hpp"
#include "mmtrack/scenario.hpp"
#include "mmtrack/track.hpp"

namespace mmtrack {

inline constexpr const char* kVersion = "1.0.0";

/// Fills up to out[0].size() samples per path and returns the count (0 when exhausted).
using SampleSource = std::function<std::size_t(std::array<std::span<Sample>, 3>)>;

/// Progress sink; null silences logging.
struct RunLog {
    std::ostream* out = nullptr;
    void line(const std::string& text) const;
};

/// Streams the synthesized capture of `scenario` through `sink`, one detection interval at a time.
void synthesize_stream(const Scenario& scenario,
                       const std::function<void(std::array<std::span<const Sample>, 3>)>& sink);

/// Synthesizes the capture into `dir` (sample files plus sidecar).
void simulate_to_dir(const Scenario& scenario, const std::filesystem::path& dir, const RunLog& log = {});

/// Detection over a sample source. AoA observations come from the scenario truth.
DetectionSeries detect_source(const Scenario& scenario, const SampleSource& source,
                              const SpectrumObserver& observer = {});

struct TrackOutputs {
    DetectionSeries smoothed;
    TrackEstimate estimate;
    std::vector<double> errors_m;
    ErrorCdf cdf;
};

/// Smoothing, tracking and evaluation against the scenario truth.
TrackOutputs track_series(const Scenario& scenario, const DetectionSeries& raw);

struct RunResult {
    DetectionSeries raw;
    TrackOutputs track;
    std::vector<std::string> artifacts;
    nlohmann::json manifest;
};

/// End-to-end run. With an output directory every artifact and the manifest are written there;
/// without one the run stays in memory. Stage failures surface as PipelineError.
RunResult run_pipeline(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir,
                       const RunLog& log = {});

/// Writes the detection-stage artifacts for `raw` (raw series CSV).
void write_detection_outputs(const DetectionSeries& raw, const std::filesystem::path& out_dir);
/// Writes the smoothed series, track, CDF and quantile CSVs.
std::vector<std::string> write_track_outputs(const Scenario& scenario, const TrackOutputs& outputs,
                                             const std::filesystem::path& out_dir);

/// Versions of the tool and its numerical libraries.
nlohmann::json version_info();

/// Parameter grid: dotted scenario paths mapped to value lists, expanded as a Cartesian product
/// in key order.
struct SweepGrid {
    std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
    std::size_t replicates = 1;

    std::size_t points() const;
    /// Values of grid point `index` (last axis fastest).
    std::vector<nlohmann::json> values(std::size_t index) const;
};

/// {"parameters": {"radio.snr_db": [0, 20]}, "replicates": 20}. Unknown keys are rejected.
SweepGrid parse_grid(const nlohmann::json& doc);

struct SweepRow {
    std::size_t point = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::vector<nlohmann::json> values;
    bool ok = false;
    std::string error;
    double valid_rate = 0.0;
    double init_err_m = 0.0;
    std::array<double, 3> quantiles{};
};

struct SweepSummaryRow {
    std::size_t point = 0;
    std::vector<nlohmann::json> values;
    std::size_t runs = 0;
    std::size_t failures = 0;
    /// Medians over successful replicates.
    double valid_rate = 0.0;
    double init_err_m = 0.0;
    std::array<double, 3> quantiles{};
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepSummaryRow> summary;
};

/// Seed of replicate r: the base seed for r = 0, otherwise derived from it.
std::uint64_t replicate_seed(std::uint64_t base, std::size_t replicate);

/// One in-memory pipeline run per grid point and replicate on `workers` threads. Failures are
/// recorded per row. With an output directory, sweep.csv and sweep_summary.csv are written.
SweepResult run_sweep(const nlohmann::json& scenario_doc, const SweepGrid& grid, unsigned workers,
                      const std::optional<std::filesystem::path>& out_dir, const RunLog& log = {});

}  // namespace mmtrack

#endif  // MMTRACK_PIPELINE_HPP
