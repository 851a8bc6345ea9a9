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

#include "mmtrack/pipeline.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmtrack/capture_io.hpp"
#include "mmtrack/errors.hpp"
#include "mmtrack/random.hpp"
#include "mmtrack/series_io.hpp"
#include "mmtrack/smooth.hpp"

namespace mmtrack {

namespace {

using nlohmann::json;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') {
            quoted += "\"\"";
        } else if (c == '\n') {
            quoted += ' ';
        } else {
            quoted += c;
        }
    }
    return quoted + "\"";
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

double median(std::vector<double> v) {
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs `body`, turning library failures into PipelineError tagged with `stage`.
template <typename F>
auto staged(const std::string& stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const ConfigError&) {
        throw;
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

}  // namespace

void RunLog::line(const std::string& text) const {
    if (out != nullptr) {
        *out << text << '\n';
    }
}

nlohmann::json version_info() {
    return {{"mmtrack", kVersion},
            {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
            {"fftw", std::string(fftw_version)},
            {"fmt", FMT_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                          NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
}

void synthesize_stream(const Scenario& scenario,
                       const std::function<void(std::array<std::span<const Sample>, 3>)>& sink) {
    const Scene scene = scenario.scene();
    const Trajectory traj = scenario.trajectory();
    const std::uint64_t total = capture_samples(scenario.radio, scenario.capture_duration_s());
    CaptureSynthesizer synth(trajectory_doppler(scene, traj), scenario.radio, total);
    const std::size_t n0 = scenario.radio.samples_per_interval();
    std::array<std::vector<Sample>, 3> buffers;
    for (auto& b : buffers) {
        b.resize(n0);
    }
    for (;;) {
        const std::size_t n = synth.next({std::span<Sample>(buffers[0]), std::span<Sample>(buffers[1]),
                                          std::span<Sample>(buffers[2])});
        if (n == 0) {
            break;
        }
        sink({std::span<const Sample>(buffers[0]).first(n), std::span<const Sample>(buffers[1]).first(n),
              std::span<const Sample>(buffers[2]).first(n)});
    }
}

void simulate_to_dir(const Scenario& scenario, const std::filesystem::path& dir, const RunLog& log) {
    CaptureSidecar sidecar;
    sidecar.sample_period_s = scenario.radio.sample_period_s;
    sidecar.carrier_hz = scenario.radio.carrier_hz;
    sidecar.seed = scenario.seed;
    sidecar.samples_per_interval = scenario.radio.samples_per_interval();
    CaptureWriter writer(dir, sidecar);
    synthesize_stream(scenario, [&](std::array<std::span<const Sample>, 3> block) { writer.write(block); });
    writer.close();
    log.line(fmt::format("capture: {} samples per path -> {}", writer.written(), dir.string()));
}

DetectionSeries detect_source(const Scenario& scenario, const SampleSource& source,
                              const SpectrumObserver& observer) {
    const Scene scene = scenario.scene();
    const Trajectory traj = scenario.trajectory();
    const std::size_t n0 = scenario.radio.samples_per_interval();
    const double ts = scenario.radio.sample_period_s;
    const double td = scenario.radio.detection_interval_s;
    scenario.detector.validate(n0);

    DetectionSeries series;
    series.detection_interval_s = td;
    std::array<std::vector<Sample>, 3> buffers;
    for (auto& b : buffers) {
        b.resize(n0);
    }
    for (std::size_t k = 0;; ++k) {
        std::size_t filled = 0;
        while (filled < n0) {
            const std::size_t n = source({std::span<Sample>(buffers[0]).subspan(filled),
                                          std::span<Sample>(buffers[1]).subspan(filled),
                                          std::span<Sample>(buffers[2]).subspan(filled)});
            if (n == 0) {
                break;
            }
            filled += n;
        }
        if (filled < n0) {
            break;
        }
        DetectionRecord rec;
        rec.k = k;
        rec.t_s = static_cast<double>(k) * td;
        rec.mddoa_hz = detect_interval({std::span<const Sample>(buffers[0]), std::span<const Sample>(buffers[1]),
                                        std::span<const Sample>(buffers[2])},
                                       k, ts, scenario.detector, observer);
        rec.valid = {rec.mddoa_hz[0].has_value(), rec.mddoa_hz[1].has_value()};
        rec.aoa_rad = observe_aoa(scene, traj, k, td, scenario.detector, scenario.seed);
        series.records.push_back(rec);
    }
    return series;
}

TrackOutputs track_series(const Scenario& scenario, const DetectionSeries& raw) {
    TrackOutputs out;
    const Scene scene = scenario.scene();
    const Trajectory traj = scenario.trajectory();
    out.smoothed = staged("smooth", [&] { return smooth_series(raw, scenario.smoother); });
    out.estimate = staged("track", [&] {
        return track_trajectory(out.smoothed, scene, scenario.solver, scenario.track_mode, scenario.workers);
    });
    staged("evaluate", [&] {
        out.errors_m = position_errors(out.estimate, traj);
        out.cdf = error_cdf(out.errors_m);
    });
    return out;
}

void write_detection_outputs(const DetectionSeries& raw, const std::filesystem::path& out_dir) {
    write_detection_csv(out_dir / "detections_raw.csv", raw);
}

std::vector<std::string> write_track_outputs(const Scenario& scenario, const TrackOutputs& outputs,
                                             const std::filesystem::path& out_dir) {
    write_detection_csv(out_dir / "detections_smoothed.csv", outputs.smoothed);
    std::ostringstream track;
    write_track_csv(track, outputs.estimate, scenario.trajectory(), scenario.scene_spec.bs_m);
    write_text_file(out_dir / "track.csv", track.str());
    std::ostringstream cdf;
    write_cdf_csv(cdf, outputs.cdf);
    write_text_file(out_dir / "error_cdf.csv", cdf.str());
    std::ostringstream quantiles;
    write_quantile_csv(quantiles, outputs.cdf);
    write_text_file(out_dir / "error_quantiles.csv", quantiles.str());
    return {"detections_smoothed.csv", "track.csv", "error_cdf.csv", "error_quantiles.csv"};
}

RunResult run_pipeline(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir,
                       const RunLog& log) {
    RunResult result;
    staged("config", [&] { scenario.validate(); });
    const bool to_disk = out_dir.has_value();
    if (to_disk) {
        staged("write", [&] { std::filesystem::create_directories(*out_dir); });
    }

    std::optional<CaptureWriter> capture_writer;
    CaptureSidecar sidecar;
    sidecar.sample_period_s = scenario.radio.sample_period_s;
    sidecar.carrier_hz = scenario.radio.carrier_hz;
    sidecar.seed = scenario.seed;
    sidecar.samples_per_interval = scenario.radio.samples_per_interval();
    sidecar.stream_length = capture_samples(scenario.radio, scenario.capture_duration_s());
    sidecar.samples_stored = to_disk && scenario.write_capture;
    if (sidecar.samples_stored) {
        capture_writer.emplace(*out_dir / "capture", sidecar);
    }

    std::array<std::optional<SpectrogramWriter>, 2> spectrograms;
    if (to_disk && scenario.write_spectrogram) {
        for (std::size_t i = 0; i < 2; ++i) {
            spectrograms[i].emplace(*out_dir / fmt::format("spectrogram_path{}.csv", i + 2), scenario.detector,
                                    scenario.radio.detection_interval_s);
        }
    }
    const SpectrumObserver observer = [&](const CafSpectrum& s) {
        auto& writer = spectrograms[s.path == Path::kWall1 ? 0 : 1];
        if (writer) {
            writer->add(s);
        }
    };

    // Synthesis is pulled block by block by the detector so the capture never sits in memory.
    const Scene scene = scenario.scene();
    const Trajectory traj = scenario.trajectory();
    std::optional<CaptureSynthesizer> synth;
    staged("synth", [&] {
        synth.emplace(trajectory_doppler(scene, traj), scenario.radio, sidecar.stream_length);
    });
    const SampleSource source = [&](std::array<std::span<Sample>, 3> out) {
        const std::size_t n = staged("synth", [&] { return synth->next(out); });
        if (capture_writer && n > 0) {
            staged("write", [&] {
                capture_writer->write({std::span<const Sample>(out[0]).first(n),
                                       std::span<const Sample>(out[1]).first(n),
                                       std::span<const Sample>(out[2]).first(n)});
            });
        }
        return n;
    };
    result.raw = staged("detect", [&] { return detect_source(scenario, source, observer); });
    log.line(fmt::format("detect: {} instants", result.raw.size()));

    if (to_disk) {
        staged("write", [&] {
            if (capture_writer) {
                // Trailing samples past the last whole interval still belong to the capture.
                std::array<std::vector<Sample>, 3> rest;
                for (auto& r : rest) {
                    r.resize(static_cast<std::size_t>(sidecar.stream_length - capture_writer->written()));
                }
                if (!rest[0].empty()) {
                    synth->next({std::span<Sample>(rest[0]), std::span<Sample>(rest[1]), std::span<Sample>(rest[2])});
                    capture_writer->write({rest[0], rest[1], rest[2]});
                }
                capture_writer->close();
            } else {
                std::filesystem::create_directories(*out_dir / "capture");
                write_sidecar(*out_dir / "capture", sidecar);
            }
            result.artifacts.push_back("capture/capture.json");
            if (capture_writer) {
                for (const auto& f : sidecar.files) {
                    result.artifacts.push_back("capture/" + f);
                }
            }
            for (std::size_t i = 0; i < 2; ++i) {
                if (spectrograms[i]) {
                    spectrograms[i]->close();
                    result.artifacts.push_back(fmt::format("spectrogram_path{}.csv", i + 2));
                }
            }
            write_detection_outputs(result.raw, *out_dir);
            result.artifacts.push_back("detections_raw.csv");
        });
    }

    result.track = track_series(scenario, result.raw);
    const TrackEstimate& est = result.track.estimate;
    log.line(fmt::format("track: p0_hat = ({:.4f}, {:.4f}) m, p90 error {:.4f} m", est.p0_hat.x + scenario.scene_spec.bs_m.x,
                         est.p0_hat.y + scenario.scene_spec.bs_m.y, result.track.cdf.quantile(0.9)));

    std::size_t valid[2] = {0, 0};
    for (const auto& r : result.raw.records) {
        valid[0] += r.valid[0] ? 1 : 0;
        valid[1] += r.valid[1] ? 1 : 0;
    }
    std::size_t converged = 0;
    for (const auto& e : est.entries) {
        converged += e.diagnostics.converged ? 1 : 0;
    }
    const Point2 origin = scenario.scene_spec.bs_m;
    json quantiles = json::array();
    for (const auto& q : result.track.cdf.quantiles) {
        quantiles.push_back({{"p", q.p}, {"err_m", q.err_m}});
    }

    if (to_disk) {
        staged("write", [&] {
            const auto names = write_track_outputs(scenario, result.track, *out_dir);
            result.artifacts.insert(result.artifacts.end(), names.begin(), names.end());
        });
        result.artifacts.push_back("manifest.json");
    }
    result.manifest = {
        {"tool", "mmtrack"},
        {"versions", version_info()},
        {"seed", scenario.seed},
        {"scenario", scenario_to_json(scenario)},
        {"frame", {{"origin_m", point_json(origin)}}},
        {"detection", {{"instants", result.raw.size()}, {"valid_path2", valid[0]}, {"valid_path3", valid[1]}}},
        {"initialization",
         {{"p0_hat_m", point_json(est.p0_hat + origin)},
          {"p1_hat_m", point_json(est.p1_hat + origin)},
          {"converged", est.init.converged},
          {"iterations", est.init.iterations},
          {"objective", est.init.objective}}},
        {"tracking", {{"instants", est.entries.size()}, {"converged_instants", converged}}},
        {"quantiles", quantiles},
        {"artifacts", result.artifacts}};
    if (to_disk) {
        staged("write", [&] { write_text_file(*out_dir / "manifest.json", result.manifest.dump(2) + "\n"); });
        log.line("artifacts written to " + out_dir->string());
    }
    return result;
}

std::size_t SweepGrid::points() const {
    std::size_t n = 1;
    for (const auto& axis : axes) {
        n *= axis.second.size();
    }
    return n;
}

std::vector<json> SweepGrid::values(std::size_t index) const {
    std::vector<json> out(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& list = axes[a].second;
        out[a] = list[index % list.size()];
        index /= list.size();
    }
    return out;
}

SweepGrid parse_grid(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("<grid>", "must be an object");
    }
    SweepGrid grid;
    for (const auto& item : doc.items()) {
        if (item.key() != "parameters" && item.key() != "replicates") {
            throw ConfigError(item.key(), "unknown field");
        }
    }
    const auto params = doc.find("parameters");
    if (params == doc.end() || !params->is_object()) {
        throw ConfigError("parameters", "must map dotted scenario paths to value lists");
    }
    for (const auto& item : params->items()) {
        const std::string field = "parameters." + item.key();
        if (!item.value().is_array() || item.value().empty()) {
            throw ConfigError(field, "must be a non-empty array");
        }
        for (const auto& v : item.value()) {
            if (!v.is_number() && !v.is_null()) {
                throw ConfigError(field, "values must be numbers or null");
            }
        }
        grid.axes.emplace_back(item.key(), std::vector<json>(item.value().begin(), item.value().end()));
    }
    if (const auto reps = doc.find("replicates"); reps != doc.end()) {
        if (!reps->is_number_unsigned() || reps->get<std::size_t>() == 0) {
            throw ConfigError("replicates", "must be a positive integer");
        }
        grid.replicates = reps->get<std::size_t>();
    }
    return grid;
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t replicate) {
    return replicate == 0 ? base : derive_seed(base, Stream::kSweep, replicate);
}

SweepResult run_sweep(const json& scenario_doc, const SweepGrid& grid, unsigned workers,
                      const std::optional<std::filesystem::path>& out_dir, const RunLog& log) {
    const std::uint64_t base_seed = parse_scenario(scenario_doc).seed;
    const std::size_t tasks = grid.points() * grid.replicates;
    SweepResult result;
    result.rows.resize(tasks);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto work = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            SweepRow& row = result.rows[t];
            row.point = t / grid.replicates;
            row.replicate = t % grid.replicates;
            row.seed = replicate_seed(base_seed, row.replicate);
            row.values = grid.values(row.point);
            try {
                json doc = scenario_doc;
                for (std::size_t a = 0; a < grid.axes.size(); ++a) {
                    set_json_path(doc, grid.axes[a].first, row.values[a]);
                }
                doc["seed"] = row.seed;
                const Scenario scenario = parse_scenario(doc);
                const RunResult run = run_pipeline(scenario, std::nullopt);
                std::size_t valid = 0;
                for (const auto& r : run.raw.records) {
                    valid += (r.valid[0] ? 1 : 0) + (r.valid[1] ? 1 : 0);
                }
                row.valid_rate = static_cast<double>(valid) / static_cast<double>(2 * run.raw.size());
                row.init_err_m = run.track.errors_m.front();
                for (std::size_t q = 0; q < 3; ++q) {
                    row.quantiles[q] = run.track.cdf.quantile(kReportedQuantiles[q]);
                }
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
            std::lock_guard lock(log_mutex);
            log.line(fmt::format("sweep point {} replicate {}: {}", row.point, row.replicate,
                                 row.ok ? fmt::format("p90 {:.4f} m", row.quantiles[1]) : "failed: " + row.error));
        }
    };
    const unsigned width = std::max(1u, workers > 0 ? workers : std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < width && w < tasks; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }

    for (std::size_t p = 0; p < grid.points(); ++p) {
        SweepSummaryRow s;
        s.point = p;
        s.values = grid.values(p);
        std::vector<double> valid;
        std::vector<double> init;
        std::array<std::vector<double>, 3> quantiles;
        for (std::size_t r = 0; r < grid.replicates; ++r) {
            const SweepRow& row = result.rows[p * grid.replicates + r];
            ++s.runs;
            if (!row.ok) {
                ++s.failures;
                continue;
            }
            valid.push_back(row.valid_rate);
            init.push_back(row.init_err_m);
            for (std::size_t q = 0; q < 3; ++q) {
                quantiles[q].push_back(row.quantiles[q]);
            }
        }
        s.valid_rate = median(valid);
        s.init_err_m = median(init);
        for (std::size_t q = 0; q < 3; ++q) {
            s.quantiles[q] = median(quantiles[q]);
        }
        result.summary.push_back(std::move(s));
    }

    if (out_dir) {
        std::string axes_header;
        for (const auto& axis : grid.axes) {
            axes_header += "," + csv_field(axis.first);
        }
        std::ostringstream rows;
        rows << "point,replicate,seed" << axes_header << ",ok,valid_rate,init_err_m,p50_m,p90_m,p95_m,error\n";
        for (const SweepRow& row : result.rows) {
            rows << row.point << ',' << row.replicate << ',' << row.seed;
            for (const auto& v : row.values) {
                rows << ',' << csv_field(value_text(v));
            }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            rows << ',' << (row.ok ? 1 : 0) << ',' << format_number(row.ok ? row.valid_rate : nan) << ','
                 << format_number(row.ok ? row.init_err_m : nan);
            for (double q : row.quantiles) {
                rows << ',' << format_number(row.ok ? q : nan);
            }
            rows << ',' << csv_field(row.error) << '\n';
        }
        write_text_file(*out_dir / "sweep.csv", rows.str());

        std::ostringstream summary;
        summary << "point" << axes_header << ",runs,failures,valid_rate,init_err_m,p50_m,p90_m,p95_m\n";
        for (const SweepSummaryRow& s : result.summary) {
            summary << s.point;
            for (const auto& v : s.values) {
                summary << ',' << csv_field(value_text(v));
            }
            summary << ',' << s.runs << ',' << s.failures << ',' << format_number(s.valid_rate) << ','
                    << format_number(s.init_err_m);
            for (double q : s.quantiles) {
                summary << ',' << format_number(q);
            }
            summary << '\n';
        }
        write_text_file(*out_dir / "sweep_summary.csv", summary.str());
    }
    return result;
}

}  // namespace mmtrack
