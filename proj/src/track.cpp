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

#include "mmtrack/track.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <cmath>
#include <string>
#include <thread>

namespace mmtrack {

namespace {

constexpr double kMaxDamping = 1e16;

Eigen::Vector2d aoa_gradient(Point2 p) {
    const double r2 = p.x * p.x + p.y * p.y;
    if (r2 == 0.0) {
        throw DegenerateGeometryError("bearing of the origin is undefined");
    }
    return {-p.y / r2, p.x / r2};
}

Eigen::Vector2d as_vector(Point2 p) { return {p.x, p.y}; }

double wavelength_interval(const Scene& scene, double detection_interval_s) {
    if (!(detection_interval_s > 0.0)) {
        throw std::invalid_argument("detection interval must be positive");
    }
    return scene.wavelength_m() * detection_interval_s;
}

// Damped Gauss-Newton on sum_i w_i (s_i e_i)^2 where `model` yields raw residuals e and
// their Jacobian. Steps that hit degenerate geometry are treated as failed steps.
template <int N, int M, typename Model>
std::pair<Eigen::Matrix<double, N, 1>, SolveDiagnostics> damped_newton(
    const Eigen::Matrix<double, N, 1>& start, const Eigen::Matrix<double, M, 1>& scale,
    const Eigen::Matrix<double, M, 1>& weights, const SolverConfig& cfg, Model&& model) {
    using VecN = Eigen::Matrix<double, N, 1>;
    using VecM = Eigen::Matrix<double, M, 1>;
    using MatMN = Eigen::Matrix<double, M, N>;
    using MatNN = Eigen::Matrix<double, N, N>;

    struct Eval {
        VecM r;
        MatMN j;
        double g;
        VecN grad;
    };
    auto evaluate = [&](const VecN& x) {
        Eval ev;
        MatMN jac;
        VecM e = model(x, jac);
        ev.r = scale.cwiseProduct(e);
        ev.j = scale.asDiagonal() * jac;
        ev.g = ev.r.dot(weights.cwiseProduct(ev.r));
        ev.grad = 2.0 * ev.j.transpose() * weights.cwiseProduct(ev.r);
        return ev;
    };

    VecN x = start;
    Eval cur = evaluate(x);
    SolveDiagnostics diag;
    diag.objective_history.push_back(cur.g);
    double mu = cfg.damping0;

    while (diag.iterations < cfg.max_iters && !(cur.grad.norm() < cfg.grad_tol)) {
        const MatNN h = 2.0 * cur.j.transpose() * weights.asDiagonal() * cur.j;
        bool accepted = false;
        while (mu <= kMaxDamping) {
            const MatNN damped = h + mu * MatNN::Identity();
            const Eigen::LDLT<MatNN> ldlt(damped);
            const VecN step = ldlt.solve(cur.grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                mu *= 3.0;
                if (mu > kMaxDamping) {
                    throw NumericalError("damped Newton system stayed singular");
                }
                continue;
            }
            const VecN candidate = x - step;
            try {
                Eval next = evaluate(candidate);
                if (next.g < cur.g) {
                    x = candidate;
                    cur = std::move(next);
                    mu *= 0.3;
                    accepted = true;
                    break;
                }
            } catch (const DegenerateGeometryError&) {
            }
            mu *= 3.0;
        }
        if (!accepted) {
            break;  // no descent direction left at machine precision
        }
        ++diag.iterations;
        diag.objective_history.push_back(cur.g);
    }
    diag.final_grad_norm = cur.grad.norm();
    diag.objective = cur.g;
    diag.converged = diag.final_grad_norm < cfg.grad_tol;
    return {x, diag};
}

Eigen::Vector4d init_scale(const SolverConfig& cfg) {
    return {1.0 / cfg.doppler_unit_hz, 1.0 / cfg.doppler_unit_hz, 1.0 / cfg.aoa_unit_rad,
            1.0 / cfg.aoa_unit_rad};
}

Eigen::Vector3d track_scale(const SolverConfig& cfg) {
    return {1.0 / cfg.doppler_unit_hz, 1.0 / cfg.doppler_unit_hz, 1.0 / cfg.aoa_unit_rad};
}

Eigen::Vector4d init_weights(const SolverConfig& cfg) {
    return Eigen::Map<const Eigen::Vector4d>(cfg.weights_init.data());
}

Eigen::Vector3d track_weights(const SolverConfig& cfg) {
    return Eigen::Map<const Eigen::Vector3d>(cfg.weights_track.data());
}

// Better of two solutions: converged beats unconverged, then lower objective.
// Ranks candidate solutions: converged inside the room, then converged anywhere, then by objective.
bool better(const SolveDiagnostics& a, bool a_in_room, const SolveDiagnostics& b, bool b_in_room) {
    const bool a_good = a.converged && a_in_room;
    const bool b_good = b.converged && b_in_room;
    if (a_good != b_good) {
        return a_good;
    }
    if (a.converged != b.converged) {
        return a.converged;
    }
    return a.objective < b.objective;
}

std::vector<double> start_ranges(double base, std::size_t count) {
    std::vector<double> ranges;
    const int first = count > 1 ? -1 : 0;
    for (std::size_t j = 0; j < count; ++j) {
        ranges.push_back(base * std::ldexp(1.0, first + static_cast<int>(j)));
    }
    return ranges;
}

TrackMeasurements track_measurements(std::size_t k, const DetectionSeries& series, Point2 p0_hat) {
    if (k >= series.size()) {
        throw std::out_of_range("instant " + std::to_string(k) + " beyond the detection series");
    }
    TrackMeasurements meas;
    meas.cumsum_hz = accumulate_mddoa(series, k);
    meas.aoa_rad = series.records[k].aoa_rad;
    meas.p0_hat = p0_hat;
    meas.detection_interval_s = series.detection_interval_s;
    return meas;
}

TrackStepResult best_ray_start(const TrackMeasurements& meas, const Scene& scene, const SolverConfig& cfg,
                               const std::vector<double>& ranges) {
    TrackStepResult best;
    bool have = false;
    for (double r : ranges) {
        const Point2 start{r * std::cos(meas.aoa_rad), r * std::sin(meas.aoa_rad)};
        try {
            TrackStepResult res = track_step_from(start, meas, scene, cfg);
            if (!have || better(res.diagnostics, scene.in_room(res.p), best.diagnostics, scene.in_room(best.p))) {
                best = std::move(res);
                have = true;
            }
        } catch (const DegenerateGeometryError&) {
        }
    }
    if (!have) {
        throw DegenerateGeometryError("every bearing-ray start is degenerate");
    }
    return best;
}

}  // namespace

void SolverConfig::validate() const {
    auto check_weights = [](const auto& w, const char* field) {
        bool positive = false;
        for (double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ConfigError(field, "weights must be non-negative");
            }
            positive = positive || v > 0.0;
        }
        if (!positive) {
            throw ConfigError(field, "at least one weight must be positive");
        }
    };
    check_weights(weights_init, "solver.weights_init");
    check_weights(weights_track, "solver.weights_track");
    if (!(doppler_unit_hz > 0.0) || !std::isfinite(doppler_unit_hz)) {
        throw ConfigError("solver.doppler_unit_hz", "must be positive");
    }
    if (!(aoa_unit_rad > 0.0) || !std::isfinite(aoa_unit_rad)) {
        throw ConfigError("solver.aoa_unit_rad", "must be positive");
    }
    if (!(grad_tol > 0.0)) {
        throw ConfigError("solver.grad_tol", "must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("solver.max_iters", "must be at least 1");
    }
    if (!(damping0 > 0.0)) {
        throw ConfigError("solver.damping0", "must be positive");
    }
    if (!(init_range_m > 0.0)) {
        throw ConfigError("solver.init_range_m", "must be positive");
    }
    if (multistart < 1) {
        throw ConfigError("solver.multistart", "must be at least 1");
    }
}

Eigen::Vector4d init_error_vector(const InitState& p, const InitMeasurements& meas, const Scene& scene) {
    const double lt = wavelength_interval(scene, meas.detection_interval_s);
    const Point2 p0{p(0), p(1)};
    const Point2 p1{p(2), p(3)};
    Eigen::Vector4d e;
    e(0) = (distance_difference(scene, p0, Path::kWall1) - distance_difference(scene, p1, Path::kWall1)) / lt -
           meas.mddoa2_hz;
    e(1) = (distance_difference(scene, p0, Path::kWall2) - distance_difference(scene, p1, Path::kWall2)) / lt -
           meas.mddoa3_hz;
    e(2) = wrap_angle(los_aoa(p0) - meas.aoa0_rad);
    e(3) = wrap_angle(los_aoa(p1) - meas.aoa1_rad);
    return e;
}

Eigen::Matrix4d init_jacobian(const InitState& p, const InitMeasurements& meas, const Scene& scene) {
    const double lt = wavelength_interval(scene, meas.detection_interval_s);
    const Point2 p0{p(0), p(1)};
    const Point2 p1{p(2), p(3)};
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    for (int row = 0; row < 2; ++row) {
        const Path path = row == 0 ? Path::kWall1 : Path::kWall2;
        j.block<1, 2>(row, 0) = as_vector(distance_difference_gradient(scene, p0, path)).transpose() / lt;
        j.block<1, 2>(row, 2) = -as_vector(distance_difference_gradient(scene, p1, path)).transpose() / lt;
    }
    j.block<1, 2>(2, 0) = aoa_gradient(p0).transpose();
    j.block<1, 2>(3, 2) = aoa_gradient(p1).transpose();
    return j;
}

double init_objective(const InitState& p, const InitMeasurements& meas, const Scene& scene,
                      const SolverConfig& cfg) {
    const Eigen::Vector4d r = init_scale(cfg).cwiseProduct(init_error_vector(p, meas, scene));
    return r.dot(init_weights(cfg).cwiseProduct(r));
}

Eigen::Vector4d init_gradient(const InitState& p, const InitMeasurements& meas, const Scene& scene,
                              const SolverConfig& cfg) {
    const Eigen::Vector4d s = init_scale(cfg);
    const Eigen::Vector4d r = s.cwiseProduct(init_error_vector(p, meas, scene));
    const Eigen::Matrix4d j = s.asDiagonal() * init_jacobian(p, meas, scene);
    return 2.0 * j.transpose() * init_weights(cfg).cwiseProduct(r);
}

InitialSolution solve_initial_from(const InitState& start, const InitMeasurements& meas, const Scene& scene,
                                   const SolverConfig& cfg) {
    cfg.validate();
    auto [x, diag] = damped_newton<4, 4>(start, init_scale(cfg), init_weights(cfg), cfg,
                                         [&](const Eigen::Vector4d& p, Eigen::Matrix4d& jac) {
                                             jac = init_jacobian(p, meas, scene);
                                             return init_error_vector(p, meas, scene);
                                         });
    return {{x(0), x(1)}, {x(2), x(3)}, std::move(diag)};
}

InitialSolution solve_initial(const InitMeasurements& meas, const Scene& scene, const SolverConfig& cfg) {
    cfg.validate();
    InitialSolution best;
    bool have = false;
    for (double r : start_ranges(cfg.init_range_m, cfg.multistart)) {
        const double x = r * std::cos(meas.aoa0_rad);
        const double y = r * std::sin(meas.aoa0_rad);
        try {
            InitialSolution sol = solve_initial_from(InitState(x, y, x, y), meas, scene, cfg);
            auto in_room = [&](const InitialSolution& c) { return scene.in_room(c.p0) && scene.in_room(c.p1); };
            if (!have || better(sol.diagnostics, in_room(sol), best.diagnostics, in_room(best))) {
                best = std::move(sol);
                have = true;
            }
        } catch (const DegenerateGeometryError&) {
        }
    }
    if (!have) {
        throw DegenerateGeometryError("every initialization start is degenerate");
    }
    if (!best.diagnostics.converged) {
        throw NonConvergenceError("initial position solve did not converge from any start", best);
    }
    return best;
}

std::array<double, 2> accumulate_mddoa(const DetectionSeries& series, std::size_t k) {
    if (k > series.size()) {
        throw std::out_of_range("accumulation beyond the detection series");
    }
    std::array<double, 2> sum{0.0, 0.0};
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& v = series.records[m].mddoa_hz[i];
            if (!v) {
                throw InsufficientDataError("Doppler difference missing at instant " + std::to_string(m) +
                                            " for path " + std::to_string(i + 2));
            }
            sum[i] += *v;
        }
    }
    return sum;
}

Eigen::Vector3d track_error_vector(Point2 pk, const TrackMeasurements& meas, const Scene& scene) {
    const double lt = wavelength_interval(scene, meas.detection_interval_s);
    Eigen::Vector3d n;
    for (int i = 0; i < 2; ++i) {
        const Path path = i == 0 ? Path::kWall1 : Path::kWall2;
        const double d0 = distance_difference(scene, meas.p0_hat, path);
        n(i) = (d0 - distance_difference(scene, pk, path)) / lt - meas.cumsum_hz[static_cast<std::size_t>(i)];
    }
    n(2) = wrap_angle(los_aoa(pk) - meas.aoa_rad);
    return n;
}

Eigen::Matrix<double, 3, 2> track_jacobian(Point2 pk, const TrackMeasurements& meas, const Scene& scene) {
    const double lt = wavelength_interval(scene, meas.detection_interval_s);
    Eigen::Matrix<double, 3, 2> j;
    j.row(0) = -as_vector(distance_difference_gradient(scene, pk, Path::kWall1)).transpose() / lt;
    j.row(1) = -as_vector(distance_difference_gradient(scene, pk, Path::kWall2)).transpose() / lt;
    j.row(2) = aoa_gradient(pk).transpose();
    return j;
}

double track_objective(Point2 pk, const TrackMeasurements& meas, const Scene& scene, const SolverConfig& cfg) {
    const Eigen::Vector3d r = track_scale(cfg).cwiseProduct(track_error_vector(pk, meas, scene));
    return r.dot(track_weights(cfg).cwiseProduct(r));
}

Eigen::Vector2d track_gradient(Point2 pk, const TrackMeasurements& meas, const Scene& scene,
                               const SolverConfig& cfg) {
    const Eigen::Vector3d s = track_scale(cfg);
    const Eigen::Vector3d r = s.cwiseProduct(track_error_vector(pk, meas, scene));
    const Eigen::Matrix<double, 3, 2> j = s.asDiagonal() * track_jacobian(pk, meas, scene);
    return 2.0 * j.transpose() * track_weights(cfg).cwiseProduct(r);
}

TrackStepResult track_step_from(Point2 start, const TrackMeasurements& meas, const Scene& scene,
                                const SolverConfig& cfg) {
    auto [x, diag] = damped_newton<2, 3>(Eigen::Vector2d(start.x, start.y), track_scale(cfg), track_weights(cfg),
                                         cfg, [&](const Eigen::Vector2d& p, Eigen::Matrix<double, 3, 2>& jac) {
                                             const Point2 pk{p(0), p(1)};
                                             jac = track_jacobian(pk, meas, scene);
                                             return track_error_vector(pk, meas, scene);
                                         });
    return {{x(0), x(1)}, std::move(diag)};
}

TrackStepResult track_step(std::size_t k, const DetectionSeries& series, Point2 p0_hat, Point2 warm_start,
                           const Scene& scene, const SolverConfig& cfg) {
    if (k == 0) {
        throw std::invalid_argument("instant 0 is the initialization estimate");
    }
    const TrackMeasurements meas = track_measurements(k, series, p0_hat);
    std::optional<TrackStepResult> warm;
    try {
        warm = track_step_from(warm_start, meas, scene, cfg);
        if (warm->diagnostics.converged && scene.in_room(warm->p)) {
            return *warm;
        }
    } catch (const DegenerateGeometryError&) {
    }
    const double range = std::max(warm_start.norm(), 1e-3);
    TrackStepResult retry = best_ray_start(meas, scene, cfg, {range});
    if (warm && !better(retry.diagnostics, scene.in_room(retry.p), warm->diagnostics, scene.in_room(warm->p))) {
        return *warm;
    }
    return retry;
}

TrackEstimate track_trajectory(const DetectionSeries& smoothed, const Scene& scene, const SolverConfig& cfg,
                               TrackMode mode, unsigned workers) {
    cfg.validate();
    const std::size_t count = smoothed.size();
    if (count < 2) {
        throw InsufficientDataError("tracking needs at least two detection instants");
    }
    const auto& r0 = smoothed.records[0];
    if (!r0.mddoa_hz[0] || !r0.mddoa_hz[1]) {
        throw InsufficientDataError("Doppler differences missing at instant 0");
    }
    InitMeasurements init;
    init.mddoa2_hz = *r0.mddoa_hz[0];
    init.mddoa3_hz = *r0.mddoa_hz[1];
    init.aoa0_rad = r0.aoa_rad;
    init.aoa1_rad = smoothed.records[1].aoa_rad;
    init.detection_interval_s = smoothed.detection_interval_s;
    const InitialSolution start = solve_initial(init, scene, cfg);

    TrackEstimate est;
    est.p0_hat = start.p0;
    est.p1_hat = start.p1;
    est.init = start.diagnostics;
    est.entries.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        est.entries[k].k = k;
        est.entries[k].t_s = static_cast<double>(k) * smoothed.detection_interval_s;
    }
    est.entries[0].p_hat = start.p0;
    est.entries[0].diagnostics = start.diagnostics;

    if (mode == TrackMode::kSequential) {
        Point2 previous = start.p0;
        for (std::size_t k = 1; k < count; ++k) {
            TrackStepResult res = track_step(k, smoothed, est.p0_hat, previous, scene, cfg);
            est.entries[k].p_hat = res.p;
            est.entries[k].diagnostics = std::move(res.diagnostics);
            previous = res.p;
        }
        return est;
    }

    std::vector<double> ranges = start_ranges(cfg.init_range_m, cfg.multistart);
    ranges.push_back(std::max(est.p0_hat.norm(), 1e-3));
    std::atomic<std::size_t> next{1};
    std::vector<std::exception_ptr> failures(count);
    auto work = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                TrackStepResult res =
                    best_ray_start(track_measurements(k, smoothed, est.p0_hat), scene, cfg, ranges);
                est.entries[k].p_hat = res.p;
                est.entries[k].diagnostics = std::move(res.diagnostics);
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    const unsigned width = workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w + 1 < width; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return est;
}

TrackEstimate track_trajectory(const DetectionSeries& raw, const Scene& scene, const SmootherConfig& smoother,
                               const SolverConfig& cfg, TrackMode mode, unsigned workers) {
    return track_trajectory(smooth_series(raw, smoother), scene, cfg, mode, workers);
}

}  // namespace mmtrack
