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

#include "mmtrack/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mmtrack/errors.hpp"

namespace mmtrack {

namespace {

using nlohmann::json;

// Object reader that records consumed keys so leftovers can be reported.
class Fields {
public:
    Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
        }
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, at(key)) : fallback;
    }

    std::optional<double> nullable_number(const std::string& key, std::optional<double> fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (v->is_null()) {
            return std::nullopt;
        }
        return as_number(*v, at(key));
    }

    double required_number(const std::string& key) {
        const json* v = find(key);
        if (!v) {
            throw ConfigError(at(key), "is required");
        }
        return as_number(*v, at(key));
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
            throw ConfigError(at(key), "must be a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_boolean()) {
            throw ConfigError(at(key), "must be true or false");
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_string()) {
            throw ConfigError(at(key), "must be a string");
        }
        return v->get<std::string>();
    }

    Point2 point(const std::string& key) {
        const json* v = find(key);
        if (!v) {
            throw ConfigError(at(key), "is required");
        }
        return as_point(*v, at(key));
    }

    Fields object(const std::string& key) {
        static const json empty = json::object();
        const json* v = find(key);
        return Fields(v ? *v : empty, at(key));
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(at(item.key()), "unknown field");
            }
        }
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) {
            throw ConfigError(path, "must be a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw ConfigError(path, "must be finite");
        }
        return x;
    }

    static Point2 as_point(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) {
            throw ConfigError(path, "must be a two-element array [x, y]");
        }
        return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <std::size_t N>
std::array<double, N> number_array(Fields& f, const std::string& key, std::array<double, N> fallback) {
    const json* v = f.find(key);
    if (!v) {
        return fallback;
    }
    if (v->is_number()) {
        fallback.fill(Fields::as_number(*v, f.at(key)));
        return fallback;
    }
    if (!v->is_array() || v->size() != N) {
        throw ConfigError(f.at(key), "must be a number or an array of " + std::to_string(N) + " numbers");
    }
    for (std::size_t i = 0; i < N; ++i) {
        fallback[i] = Fields::as_number((*v)[i], f.at(key) + "[" + std::to_string(i) + "]");
    }
    return fallback;
}

std::array<std::optional<double>, 3> snr_array(Fields& f, const std::string& key) {
    std::array<std::optional<double>, 3> out{};
    const json* v = f.find(key);
    if (!v || v->is_null()) {
        return out;
    }
    if (v->is_number()) {
        out.fill(Fields::as_number(*v, f.at(key)));
        return out;
    }
    if (!v->is_array() || v->size() != 3) {
        throw ConfigError(f.at(key), "must be null, a number, or an array of 3 numbers or nulls");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(*v)[i].is_null()) {
            out[i] = Fields::as_number((*v)[i], f.at(key) + "[" + std::to_string(i) + "]");
        }
    }
    return out;
}

std::size_t size_field(Fields& f, const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(f.count(key, fallback));
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Scene Scenario::scene() const {
    return Scene::canonical(scene_spec.bs_m, scene_spec.walls, scene_spec.carrier_hz);
}

Trajectory Scenario::trajectory() const {
    return Trajectory(waypoints, interpolation).translated(Point2{} - scene_spec.bs_m);
}

double Scenario::capture_duration_s() const {
    return duration_s.value_or(waypoints.empty() ? 0.0 : waypoints.back().t_s);
}

std::size_t Scenario::num_instants() const {
    const std::size_t n0 = radio.samples_per_interval();
    return static_cast<std::size_t>(capture_samples(radio, capture_duration_s()) / n0);
}

void Scenario::resolve() {
    radio.seed = seed;
    radio.carrier_hz = scene_spec.carrier_hz;
    radio.cfo.offset_hz = cfo_offset_hz ? *cfo_offset_hz
                                        : draw_cfo(seed, radio.cfo.phase_walk_std, max_cfo_offset_hz).offset_hz;
    const std::size_t n0 = radio.samples_per_interval();
    const double window_s = static_cast<double>(detector.effective_window(n0)) * radio.sample_period_s;
    solver.doppler_unit_hz = doppler_unit_hz.value_or(1.0 / window_s);
    if (aoa_unit_rad) {
        solver.aoa_unit_rad = *aoa_unit_rad;
    } else {
        const double q = detector.aoa_quant_step_rad;
        const double level = std::sqrt(detector.aoa_noise_std_rad * detector.aoa_noise_std_rad + q * q / 12.0);
        solver.aoa_unit_rad = level > 0.0 ? level : kPi / 180.0;
    }
}

void Scenario::validate() const {
    if (!(scene_spec.carrier_hz > 0.0)) {
        throw ConfigError("scene.carrier_hz", "must be positive");
    }
    try {
        (void)scene();
    } catch (const InvalidWallError& e) {
        throw ConfigError("scene.walls", e.what());
    } catch (const DegenerateGeometryError& e) {
        throw ConfigError("scene.walls", e.what());
    }
    Trajectory traj = [&] {
        try {
            return trajectory();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("trajectory.waypoints", e.what());
        }
    }();
    if (duration_s && !(*duration_s > 0.0 && *duration_s <= traj.duration())) {
        throw ConfigError("radio.duration_s", "must be positive and not exceed the trajectory duration");
    }
    radio.validate();
    const std::size_t n0 = radio.samples_per_interval();
    detector.validate(n0);
    smoother.validate();
    solver.validate();
    if (!(max_cfo_offset_hz >= 0.0)) {
        throw ConfigError("radio.cfo.max_offset_hz", "must be non-negative");
    }
    if (doppler_unit_hz && !(*doppler_unit_hz > 0.0)) {
        throw ConfigError("solver.doppler_unit_hz", "must be positive or null");
    }
    if (aoa_unit_rad && !(*aoa_unit_rad > 0.0)) {
        throw ConfigError("solver.aoa_unit_rad", "must be positive or null");
    }
    if (num_instants() < 2) {
        throw ConfigError("radio.duration_s", "must cover at least two detection intervals");
    }
    for (const Waypoint& w : traj.waypoints()) {
        if (w.p.norm() < 1e-9) {
            throw ConfigError("trajectory.waypoints", "the transmitter must not pass through the BS");
        }
    }
}

Scenario parse_scenario(const json& doc) {
    Scenario s;
    Fields root(doc, "");
    s.name = root.string("name", s.name);
    s.seed = root.count("seed", s.seed);
    s.output_dir = root.string("output_dir", s.output_dir.string());

    {
        Fields f = root.object("scene");
        if (f.has("bs_m")) {
            s.scene_spec.bs_m = f.point("bs_m");
        }
        s.scene_spec.carrier_hz = f.number("carrier_hz", s.scene_spec.carrier_hz);
        const json* walls = f.find("walls");
        if (!walls || !walls->is_array() || walls->size() != 2) {
            throw ConfigError("scene.walls", "must list exactly two walls");
        }
        for (std::size_t i = 0; i < 2; ++i) {
            Fields w((*walls)[i], "scene.walls[" + std::to_string(i) + "]");
            s.scene_spec.walls[i].anchor = w.point("anchor_m");
            s.scene_spec.walls[i].normal = w.point("normal");
            w.finish();
        }
        f.finish();
    }
    {
        Fields f = root.object("trajectory");
        const std::string interp = f.string("interpolation", "linear");
        if (interp == "linear") {
            s.interpolation = Interpolation::kPiecewiseLinear;
        } else if (interp == "cubic") {
            s.interpolation = Interpolation::kCubic;
        } else {
            throw ConfigError(f.at("interpolation"), "must be \"linear\" or \"cubic\"");
        }
        const json* wps = f.find("waypoints");
        if (!wps || !wps->is_array()) {
            throw ConfigError("trajectory.waypoints", "must be an array of {t_s, p_m}");
        }
        for (std::size_t i = 0; i < wps->size(); ++i) {
            Fields w((*wps)[i], "trajectory.waypoints[" + std::to_string(i) + "]");
            Waypoint wp;
            wp.t_s = w.required_number("t_s");
            wp.p = w.point("p_m");
            w.finish();
            s.waypoints.push_back(wp);
        }
        f.finish();
    }
    {
        Fields f = root.object("radio");
        s.radio.sample_period_s = f.number("sample_period_s", s.radio.sample_period_s);
        s.radio.detection_interval_s = f.number("detection_interval_s", s.radio.detection_interval_s);
        s.duration_s = f.nullable_number("duration_s", std::nullopt);
        s.radio.path_gains = number_array<3>(f, "path_gains", s.radio.path_gains);
        s.radio.initial_phases_rad = number_array<3>(f, "initial_phases_rad", s.radio.initial_phases_rad);
        s.radio.snr_db = snr_array(f, "snr_db");
        Fields cfo = f.object("cfo");
        if (const json* off = cfo.find("offset_hz")) {
            if (off->is_string() && off->get<std::string>() == "random") {
                s.cfo_offset_hz.reset();
            } else {
                s.cfo_offset_hz = Fields::as_number(*off, cfo.at("offset_hz"));
            }
        }
        s.max_cfo_offset_hz = cfo.number("max_offset_hz", s.max_cfo_offset_hz);
        s.radio.cfo.phase_walk_std = cfo.number("phase_walk_std_rad", 0.0);
        cfo.finish();
        f.finish();
    }
    {
        Fields f = root.object("detector");
        DetectorConfig& d = s.detector;
        d.window_len = size_field(f, "window_len", d.window_len);
        d.gamma = f.number("gamma", d.gamma);
        d.half_train = size_field(f, "half_train", d.half_train);
        d.decimation = size_field(f, "decimation", d.decimation);
        d.zero_pad_factor = size_field(f, "zero_pad_factor", d.zero_pad_factor);
        d.max_abs_mddoa_hz = f.number("max_abs_mddoa_hz", d.max_abs_mddoa_hz);
        d.parabolic_interpolation = f.boolean("parabolic_interpolation", d.parabolic_interpolation);
        d.aoa_noise_std_rad = f.number("aoa_noise_std_rad", d.aoa_noise_std_rad);
        d.aoa_quant_step_rad = f.number("aoa_quant_step_rad", d.aoa_quant_step_rad);
        f.finish();
    }
    {
        Fields f = root.object("smoother");
        s.smoother.window = size_field(f, "window", s.smoother.window);
        s.smoother.order = size_field(f, "order", s.smoother.order);
        s.smoother.fill_gaps = f.boolean("fill_gaps", s.smoother.fill_gaps);
        f.finish();
    }
    {
        Fields f = root.object("solver");
        SolverConfig& c = s.solver;
        c.weights_init = number_array<4>(f, "weights_init", c.weights_init);
        c.weights_track = number_array<3>(f, "weights_track", c.weights_track);
        s.doppler_unit_hz = f.nullable_number("doppler_unit_hz", std::nullopt);
        s.aoa_unit_rad = f.nullable_number("aoa_unit_rad", std::nullopt);
        c.grad_tol = f.number("grad_tol", c.grad_tol);
        c.max_iters = size_field(f, "max_iters", c.max_iters);
        c.damping0 = f.number("damping0", c.damping0);
        c.init_range_m = f.number("init_range_m", c.init_range_m);
        c.multistart = size_field(f, "multistart", c.multistart);
        const std::string mode = f.string("mode", "sequential");
        if (mode == "sequential") {
            s.track_mode = TrackMode::kSequential;
        } else if (mode == "parallel") {
            s.track_mode = TrackMode::kParallel;
        } else {
            throw ConfigError(f.at("mode"), "must be \"sequential\" or \"parallel\"");
        }
        s.workers = static_cast<unsigned>(f.count("workers", 0));
        f.finish();
    }
    {
        Fields f = root.object("output");
        s.write_capture = f.boolean("write_capture", s.write_capture);
        s.write_spectrogram = f.boolean("write_spectrogram", s.write_spectrogram);
        f.finish();
    }
    root.finish();

    s.validate();
    s.resolve();
    return s;
}

json load_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("<file>", "cannot read " + file.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& file) { return parse_scenario(load_json(file)); }

json scenario_to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["seed"] = s.seed;
    doc["output_dir"] = s.output_dir.generic_string();
    json walls = json::array();
    for (const Wall& w : s.scene_spec.walls) {
        walls.push_back({{"anchor_m", point_json(w.anchor)}, {"normal", point_json(w.normal)}});
    }
    doc["scene"] = {{"bs_m", point_json(s.scene_spec.bs_m)}, {"carrier_hz", s.scene_spec.carrier_hz}, {"walls", walls}};
    json wps = json::array();
    for (const Waypoint& w : s.waypoints) {
        wps.push_back({{"t_s", w.t_s}, {"p_m", point_json(w.p)}});
    }
    doc["trajectory"] = {{"interpolation", s.interpolation == Interpolation::kCubic ? "cubic" : "linear"},
                         {"waypoints", wps}};
    json snr = json::array();
    for (const auto& v : s.radio.snr_db) {
        snr.push_back(optional_json(v));
    }
    doc["radio"] = {{"sample_period_s", s.radio.sample_period_s},
                    {"detection_interval_s", s.radio.detection_interval_s},
                    {"duration_s", optional_json(s.duration_s)},
                    {"path_gains", s.radio.path_gains},
                    {"initial_phases_rad", s.radio.initial_phases_rad},
                    {"snr_db", snr},
                    {"cfo",
                     {{"offset_hz", s.radio.cfo.offset_hz},
                      {"max_offset_hz", s.max_cfo_offset_hz},
                      {"phase_walk_std_rad", s.radio.cfo.phase_walk_std}}}};
    const DetectorConfig& d = s.detector;
    doc["detector"] = {{"window_len", d.window_len},
                       {"gamma", d.gamma},
                       {"half_train", d.half_train},
                       {"decimation", d.decimation},
                       {"zero_pad_factor", d.zero_pad_factor},
                       {"max_abs_mddoa_hz", d.max_abs_mddoa_hz},
                       {"parabolic_interpolation", d.parabolic_interpolation},
                       {"aoa_noise_std_rad", d.aoa_noise_std_rad},
                       {"aoa_quant_step_rad", d.aoa_quant_step_rad}};
    doc["smoother"] = {{"window", s.smoother.window}, {"order", s.smoother.order}, {"fill_gaps", s.smoother.fill_gaps}};
    const SolverConfig& c = s.solver;
    doc["solver"] = {{"weights_init", c.weights_init},
                     {"weights_track", c.weights_track},
                     {"doppler_unit_hz", c.doppler_unit_hz},
                     {"aoa_unit_rad", c.aoa_unit_rad},
                     {"grad_tol", c.grad_tol},
                     {"max_iters", c.max_iters},
                     {"damping0", c.damping0},
                     {"init_range_m", c.init_range_m},
                     {"multistart", c.multistart},
                     {"mode", s.track_mode == TrackMode::kParallel ? "parallel" : "sequential"},
                     {"workers", s.workers}};
    doc["output"] = {{"write_capture", s.write_capture}, {"write_spectrogram", s.write_spectrogram}};
    return doc;
}

Scenario with_seed(Scenario scenario, std::uint64_t seed) {
    scenario.seed = seed;
    scenario.resolve();
    return scenario;
}

void set_json_path(json& doc, const std::string& dotted, const json& value) {
    json* node = &doc;
    std::string walked;
    std::istringstream parts(dotted);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(parts, key, '.')) {
        keys.push_back(key);
    }
    if (keys.empty()) {
        throw ConfigError("<grid>", "empty parameter path");
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        walked += (walked.empty() ? "" : ".") + keys[i];
        json& next = (*node)[keys[i]];
        if (next.is_null()) {
            next = json::object();
        }
        if (!next.is_object()) {
            throw ConfigError(walked, "is not an object");
        }
        node = &next;
    }
    json& target = (*node)[keys.back()];
    if (target.is_array() && value.is_number()) {
        for (auto& element : target) {
            element = value;
        }
    } else {
        target = value;
    }
}

}  // namespace mmtrack
