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

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mmtrack/capture_io.hpp"
#include "mmtrack/errors.hpp"
#include "mmtrack/pipeline.hpp"
#include "mmtrack/scenario.hpp"
#include "mmtrack/series_io.hpp"

namespace {

using namespace mmtrack;

constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Override the scenario seed");
    cmd->add_option("--out-dir", c.out_dir, "Override the scenario output directory");
    cmd->add_flag("--quiet", c.quiet, "Suppress progress output");
}

Scenario load(const Common& c) {
    Scenario s = load_scenario(c.config);
    if (c.seed) {
        s = with_seed(std::move(s), *c.seed);
    }
    if (!c.out_dir.empty()) {
        s.output_dir = c.out_dir;
    }
    return s;
}

RunLog logger(const Common& c) { return RunLog{c.quiet ? nullptr : &std::cerr}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmtrack: uplink mmWave trajectory tracking from multi-path Doppler differences"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;

    auto* simulate = app.add_subcommand("simulate", "Synthesize the three-path capture to disk");
    add_common(simulate, common);

    auto* detect = app.add_subcommand("detect", "Detect Doppler differences from a stored capture");
    add_common(detect, common);
    std::string capture_dir;
    detect->add_option("--capture-dir", capture_dir, "Capture directory (default <out-dir>/capture)");
    bool detect_spectrogram = true;
    detect->add_flag("!--no-spectrogram", detect_spectrogram, "Skip the spectrogram CSVs");

    auto* track = app.add_subcommand("track", "Smooth a detection series, track and evaluate");
    add_common(track, common);
    std::string detections;
    track->add_option("--detections", detections, "Raw detection CSV (default <out-dir>/detections_raw.csv)");

    auto* pipeline = app.add_subcommand("pipeline", "Run synthesis, detection, tracking and evaluation");
    add_common(pipeline, common);
    bool write_capture = false;
    pipeline->add_flag("--write-capture", write_capture, "Also store the capture samples");

    auto* sweep = app.add_subcommand("sweep", "Run the pipeline over a parameter grid");
    add_common(sweep, common);
    std::string grid_file;
    unsigned workers = 0;
    sweep->add_option("--grid", grid_file, "Grid JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");

    auto* validate = app.add_subcommand("validate-config", "Check a scenario and print its resolved form");
    add_common(validate, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const RunLog log = logger(common);
        if (*validate) {
            const Scenario s = load(common);
            std::cout << scenario_to_json(s).dump(2) << '\n';
            return 0;
        }
        if (*sweep) {
            nlohmann::json doc = load_json(common.config);
            if (common.seed) {
                doc["seed"] = *common.seed;
            }
            const Scenario base = parse_scenario(doc);
            const std::filesystem::path out = common.out_dir.empty() ? base.output_dir : std::filesystem::path(common.out_dir);
            const SweepGrid grid = parse_grid(load_json(grid_file));
            const SweepResult result = run_sweep(doc, grid, workers, out, log);
            std::size_t failures = 0;
            for (const auto& row : result.rows) {
                failures += row.ok ? 0 : 1;
            }
            log.line(fmt::format("sweep: {} runs, {} failed -> {}", result.rows.size(), failures, out.string()));
            return 0;
        }

        const Scenario scenario = load(common);
        const std::filesystem::path out = scenario.output_dir;
        if (*simulate) {
            simulate_to_dir(scenario, out / "capture", log);
            return 0;
        }
        if (*detect) {
            const std::filesystem::path dir = capture_dir.empty() ? out / "capture" : std::filesystem::path(capture_dir);
            std::optional<CaptureReader> reader;
            try {
                reader.emplace(dir);
            } catch (const Error& e) {
                throw PipelineError("detect", e.what());
            }
            const CaptureSidecar& sc = reader->sidecar();
            if (sc.samples_per_interval != scenario.radio.samples_per_interval() ||
                sc.sample_period_s != scenario.radio.sample_period_s) {
                throw PipelineError("detect", "capture sampling does not match the scenario");
            }
            std::array<std::optional<SpectrogramWriter>, 2> spectrograms;
            if (detect_spectrogram && scenario.write_spectrogram) {
                for (std::size_t i = 0; i < 2; ++i) {
                    spectrograms[i].emplace(out / fmt::format("spectrogram_path{}.csv", i + 2), scenario.detector,
                                            scenario.radio.detection_interval_s);
                }
            }
            DetectionSeries raw;
            try {
                raw = detect_source(
                    scenario, [&](std::array<std::span<Sample>, 3> block) { return reader->read(block); },
                    [&](const CafSpectrum& s) {
                        if (auto& w = spectrograms[s.path == Path::kWall1 ? 0 : 1]) {
                            w->add(s);
                        }
                    });
                for (auto& w : spectrograms) {
                    if (w) {
                        w->close();
                    }
                }
                write_detection_outputs(raw, out);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw PipelineError("detect", e.what());
            }
            log.line(fmt::format("detect: {} instants -> {}", raw.size(), (out / "detections_raw.csv").string()));
            return 0;
        }
        if (*track) {
            const std::filesystem::path file =
                detections.empty() ? out / "detections_raw.csv" : std::filesystem::path(detections);
            DetectionSeries raw;
            try {
                raw = read_detection_csv(file);
            } catch (const Error& e) {
                throw PipelineError("track", e.what());
            }
            const TrackOutputs outputs = track_series(scenario, raw);
            try {
                write_track_outputs(scenario, outputs, out);
            } catch (const std::exception& e) {
                throw PipelineError("write", e.what());
            }
            log.line(fmt::format("track: {} instants, p90 error {:.4f} m -> {}", outputs.estimate.entries.size(),
                                 outputs.cdf.quantile(0.9), out.string()));
            return 0;
        }
        if (*pipeline) {
            Scenario s = scenario;
            s.write_capture = s.write_capture || write_capture;
            run_pipeline(s, out, log);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error in stage " << e.what() << '\n';
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << '\n';
        return kExitPipeline;
    }
    return 0;
}
