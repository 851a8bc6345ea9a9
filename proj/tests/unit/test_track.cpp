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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmtrack/track.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {
namespace {

constexpr double kTd = 0.05;

// Virtual BSs at (-4, 0) and (0, -6).
Scene near_scene() { return Scene({Wall{{-2.0, 0.0}, {1.0, 0.0}}, Wall{{0.0, -3.0}, {0.0, 1.0}}}, 60.48e9); }

// Virtual BSs at (9, 0) and (0, 12).
Scene room_scene() { return Scene({Wall{{4.5, 0.0}, {-1.0, 0.0}}, Wall{{0.0, 6.0}, {0.0, -1.0}}}, 60.48e9); }

SolverConfig unit_config() {
    SolverConfig cfg;
    cfg.doppler_unit_hz = 20.0;
    cfg.aoa_unit_rad = 0.01;
    return cfg;
}

double path_mddoa(const Scene& scene, Point2 a, Point2 b, Path path) {
    return (distance_difference(scene, a, path) - distance_difference(scene, b, path)) /
           (scene.wavelength_m() * kTd);
}

InitMeasurements exact_init(const Scene& scene, Point2 p0, Point2 p1) {
    return {path_mddoa(scene, p0, p1, Path::kWall1), path_mddoa(scene, p0, p1, Path::kWall2), los_aoa(p0),
            los_aoa(p1), kTd};
}

// Series whose per-interval Doppler differences are exact position differences, so every
// accumulated sum matches the trajectory without discretization error.
DetectionSeries exact_series(const Scene& scene, const Trajectory& traj, std::size_t count) {
    DetectionSeries s;
    s.detection_interval_s = kTd;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) * kTd;
        const Point2 a = traj.position(t);
        const Point2 b = traj.position(std::min(traj.duration(), t + kTd));
        DetectionRecord r;
        r.k = k;
        r.t_s = t;
        r.mddoa_hz = {path_mddoa(scene, a, b, Path::kWall1), path_mddoa(scene, a, b, Path::kWall2)};
        r.valid = {true, true};
        r.aoa_rad = los_aoa(a);
        s.records.push_back(r);
    }
    return s;
}

Point2 random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.5, 4.0);
    return {u(rng), u(rng)};
}

template <typename F>
Eigen::MatrixXd central_difference(F&& f, const Eigen::VectorXd& x, double h) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd j(f0.size(), x.size());
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(c) += h;
        xm(c) -= h;
        j.col(c) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return j;
}

double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
    return (analytic - numeric).cwiseAbs().maxCoeff() / std::max(1e-12, numeric.cwiseAbs().maxCoeff());
}

TEST(SolverConfig, Validation) {
    EXPECT_NO_THROW(SolverConfig{}.validate());
    SolverConfig cfg;
    cfg.weights_init = {0.0, 0.0, 0.0, 0.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.weights_track = {1.0, -1.0, 1.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.grad_tol = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.max_iters = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.multistart = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(InitErrorVector, ZeroAtTruth) {
    const Scene scene = near_scene();
    const Point2 p0{2.0, 3.0};
    const Point2 p1{2.0, 2.975};
    const InitState p(p0.x, p0.y, p1.x, p1.y);
    EXPECT_LE(init_error_vector(p, exact_init(scene, p0, p1), scene).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(InitErrorVector, NoMotionNoDopplerDifference) {
    const Scene scene = near_scene();
    const InitMeasurements meas{0.0, 0.0, 0.3, 0.3, kTd};
    const Eigen::Vector4d e = init_error_vector(InitState(1.0, 2.0, 1.0, 2.0), meas, scene);
    EXPECT_EQ(e(0), 0.0);
    EXPECT_EQ(e(1), 0.0);
}

TEST(InitErrorVector, AngleResidualIsAdditive) {
    const Scene scene = near_scene();
    InitMeasurements meas = exact_init(scene, {2.0, 3.0}, {2.0, 2.975});
    const InitState p(2.0, 3.0, 2.0, 2.975);
    const Eigen::Vector4d before = init_error_vector(p, meas, scene);
    meas.aoa0_rad += 0.1;
    const Eigen::Vector4d after = init_error_vector(p, meas, scene);
    EXPECT_NEAR(after(2) - before(2), -0.1, 1e-12);
    EXPECT_EQ(after(3), before(3));
}

TEST(InitErrorVector, AngleResidualWrapped) {
    const Scene scene = near_scene();
    const InitMeasurements meas{0.0, 0.0, kPi - 0.01, 0.0, kTd};
    const Point2 p0{-1.0, -0.02};
    const double e = init_error_vector(InitState(p0.x, p0.y, 1.0, 1.0), meas, scene)(2);
    EXPECT_GT(e, -kPi);
    EXPECT_LE(e, kPi);
    EXPECT_NEAR(e, wrap_angle(los_aoa(p0) - meas.aoa0_rad), 1e-15);
    EXPECT_LT(std::abs(e), 0.1);
}

TEST(InitErrorVector, DegenerateGeometryThrows) {
    const Scene scene = near_scene();
    const InitMeasurements meas{0.0, 0.0, 0.0, 0.0, kTd};
    EXPECT_THROW(init_error_vector(InitState(0.0, 0.0, 1.0, 1.0), meas, scene), DegenerateGeometryError);
    EXPECT_THROW(init_jacobian(InitState(1.0, 1.0, -4.0, 0.0), meas, scene), DegenerateGeometryError);
}

TEST(InitObjective, QuadraticForm) {
    const Scene scene = near_scene();
    InitMeasurements meas = exact_init(scene, {2.0, 3.0}, {2.0, 2.975});
    const InitState p(2.0, 3.0, 2.0, 2.975);
    SolverConfig cfg;
    EXPECT_NEAR(init_objective(p, meas, scene, cfg), 0.0, 1e-16);
    meas.mddoa2_hz -= 1.0;
    cfg.weights_init = {2.0, 1.0, 1.0, 1.0};
    EXPECT_NEAR(init_objective(p, meas, scene, cfg), 2.0, 1e-9);
    cfg.weights_init = {4.0, 2.0, 2.0, 2.0};
    EXPECT_NEAR(init_objective(p, meas, scene, cfg), 4.0, 1e-9);
}

TEST(InitJacobian, BlockStructure) {
    const Scene scene = near_scene();
    const InitMeasurements meas{1.0, 2.0, 0.3, 0.4, kTd};
    const Eigen::Matrix4d j = init_jacobian(InitState(1.0, 2.0, 1.5, 2.5), meas, scene);
    EXPECT_EQ(j(2, 2), 0.0);
    EXPECT_EQ(j(2, 3), 0.0);
    EXPECT_EQ(j(3, 0), 0.0);
    EXPECT_EQ(j(3, 1), 0.0);
}

TEST(InitJacobian, MatchesCentralDifferences) {
    std::mt19937_64 rng(21);
    for (const Scene& scene : {near_scene(), room_scene()}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Point2 a = random_point(rng);
            const Point2 b = random_point(rng);
            const InitMeasurements meas{3.0, -4.0, 0.5, 0.7, kTd};
            const InitState x(a.x, a.y, b.x, b.y);
            auto e = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                return init_error_vector(InitState(v), meas, scene);
            };
            EXPECT_LE(relative_error(init_jacobian(x, meas, scene), central_difference(e, x, 1e-6)), 1e-5);
            const SolverConfig cfg = unit_config();
            auto g = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                return Eigen::VectorXd::Constant(1, init_objective(InitState(v), meas, scene, cfg));
            };
            const Eigen::MatrixXd numeric = central_difference(g, x, 1e-6).transpose();
            EXPECT_LE(relative_error(init_gradient(x, meas, scene, cfg), numeric), 1e-5);
        }
    }
}

TEST(SolveInitial, RecoversNoiselessGeometry) {
    const Scene scene = near_scene();
    const Point2 p0{2.0, 3.0};
    const Point2 p1{2.0, 2.975};
    const InitialSolution sol = solve_initial(exact_init(scene, p0, p1), scene, unit_config());
    EXPECT_TRUE(sol.diagnostics.converged);
    EXPECT_LE((sol.p0 - p0).norm(), 1e-4);
    EXPECT_LE((sol.p1 - p1).norm(), 1e-4);
}

TEST(SolveInitial, StartAtTruthStaysPut) {
    const Scene scene = near_scene();
    const Point2 p0{2.0, 3.0};
    const Point2 p1{2.0, 2.975};
    const InitialSolution sol =
        solve_initial_from(InitState(p0.x, p0.y, p1.x, p1.y), exact_init(scene, p0, p1), scene, unit_config());
    EXPECT_LE(sol.diagnostics.iterations, 1u);
    EXPECT_TRUE(sol.diagnostics.converged);
    EXPECT_LE((sol.p0 - p0).norm(), 1e-9);
}

TEST(SolveInitial, BearingOnlyLandsOnRay) {
    const Scene scene = room_scene();
    const InitMeasurements meas{12.0, -7.0, 0.9, 0.95, kTd};
    SolverConfig cfg = unit_config();
    cfg.weights_init = {0.0, 0.0, 1.0, 1.0};
    const InitialSolution sol = solve_initial(meas, scene, cfg);
    EXPECT_NEAR(wrap_angle(los_aoa(sol.p0) - meas.aoa0_rad), 0.0, 1e-9);
    EXPECT_NEAR(wrap_angle(los_aoa(sol.p1) - meas.aoa1_rad), 0.0, 1e-9);
}

TEST(SolveInitial, WeightScaleLeavesArgminUnchanged) {
    const Scene scene = room_scene();
    InitMeasurements meas = exact_init(scene, {2.0, 2.5}, {2.02, 2.51});
    meas.mddoa2_hz += 0.05;
    meas.aoa1_rad += 0.001;
    SolverConfig cfg = unit_config();
    cfg.weights_init = {1.0, 2.0, 0.5, 1.0};
    const InitialSolution a = solve_initial(meas, scene, cfg);
    for (double& w : cfg.weights_init) {
        w *= 7.5;
    }
    const InitialSolution b = solve_initial(meas, scene, cfg);
    EXPECT_LE((a.p0 - b.p0).norm(), 1e-6);
    EXPECT_LE((a.p1 - b.p1).norm(), 1e-6);
}

TEST(SolveInitial, ObjectiveNeverIncreases) {
    const Scene scene = room_scene();
    const InitMeasurements meas = exact_init(scene, {1.5, 2.0}, {1.52, 2.0});
    const InitialSolution sol = solve_initial_from(InitState(3.0, 3.0, 3.0, 3.0), meas, scene, unit_config());
    ASSERT_GE(sol.diagnostics.objective_history.size(), 2u);
    for (std::size_t i = 1; i < sol.diagnostics.objective_history.size(); ++i) {
        EXPECT_LE(sol.diagnostics.objective_history[i], sol.diagnostics.objective_history[i - 1]);
    }
}

TEST(SolveInitial, NonConvergenceCarriesBestIterate) {
    const Scene scene = room_scene();
    const InitMeasurements meas = exact_init(scene, {1.5, 2.0}, {1.52, 2.0});
    SolverConfig cfg = unit_config();
    cfg.max_iters = 1;
    try {
        solve_initial(meas, scene, cfg);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_TRUE(e.best().p0.finite());
        EXPECT_FALSE(e.best().diagnostics.converged);
        EXPECT_GT(e.best().diagnostics.final_grad_norm, cfg.grad_tol);
    }
}

TEST(SolveInitial, RandomNoiselessInversion) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> step(-0.025, 0.025);
    const Scene scene = room_scene();
    int recovered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Point2 p0 = random_point(rng);
        const Point2 p1 = p0 + Point2{step(rng), step(rng)};
        try {
            const InitialSolution sol = solve_initial(exact_init(scene, p0, p1), scene, unit_config());
            recovered += ((sol.p0 - p0).norm() <= 1e-4 && (sol.p1 - p1).norm() <= 1e-4) ? 1 : 0;
        } catch (const NonConvergenceError&) {
        }
    }
    EXPECT_GE(recovered, 99);
}

TEST(AccumulateMddoa, Sums) {
    DetectionSeries s;
    s.detection_interval_s = kTd;
    for (std::size_t k = 0; k < 8; ++k) {
        DetectionRecord r;
        r.k = k;
        r.mddoa_hz = {10.0, -2.5};
        r.valid = {true, true};
        s.records.push_back(r);
    }
    EXPECT_EQ(accumulate_mddoa(s, 0), (std::array<double, 2>{0.0, 0.0}));
    EXPECT_EQ(accumulate_mddoa(s, 5), (std::array<double, 2>{50.0, -12.5}));
    s.records[3].mddoa_hz[1].reset();
    EXPECT_NO_THROW(accumulate_mddoa(s, 3));
    EXPECT_THROW(accumulate_mddoa(s, 4), InsufficientDataError);
    EXPECT_THROW(accumulate_mddoa(s, 9), std::out_of_range);
}

TEST(TrackErrorVector, SelfConsistency) {
    const Scene scene = room_scene();
    const Point2 p0{2.0, 3.0};
    TrackMeasurements meas{{0.0, 0.0}, los_aoa(p0), p0, kTd};
    EXPECT_EQ(track_error_vector(p0, meas, scene), Eigen::Vector3d::Zero());
    const Point2 pk{2.3, 2.6};
    const Eigen::Vector3d before = track_error_vector(pk, meas, scene);
    meas.cumsum_hz = {0.75, -1.25};
    const Eigen::Vector3d after = track_error_vector(pk, meas, scene);
    EXPECT_NEAR(after(0) - before(0), -0.75, 1e-9);
    EXPECT_NEAR(after(1) - before(1), 1.25, 1e-9);
    EXPECT_EQ(after(2), before(2));
}

TEST(TrackErrorVector, ZeroAlongNoiselessPath) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::linear({1.5, 2.0}, {0.3, 0.2}, 5.0);
    const DetectionSeries s = exact_series(scene, traj, 100);
    const double lt = scene.wavelength_m() * kTd;
    for (std::size_t k = 1; k < 100; ++k) {
        const TrackMeasurements meas{accumulate_mddoa(s, k), s.records[k].aoa_rad, traj.position(0.0), kTd};
        const Eigen::Vector3d n = track_error_vector(traj.position(static_cast<double>(k) * kTd), meas, scene);
        EXPECT_LE(std::abs(n(0)) * lt, 1e-9);
        EXPECT_LE(std::abs(n(1)) * lt, 1e-9);
        EXPECT_LE(std::abs(n(2)), 1e-12);
    }
}

TEST(TrackErrorVector, ZeroSetIsHyperbolaBranch) {
    const Scene scene = room_scene();
    const Point2 p0{2.0, 3.0};
    const double lt = scene.wavelength_m() * kTd;
    for (Path path : {Path::kWall1, Path::kWall2}) {
        const std::size_t i = path == Path::kWall1 ? 0 : 1;
        const Point2 v = scene.virtual_bs(path);
        const double focal = v.norm() / 2.0;
        const Point2 axis = (1.0 / v.norm()) * v;
        const Point2 normal{-axis.y, axis.x};
        const Point2 center = 0.5 * v;
        for (double cumsum : {-400.0, -50.0, 120.0, 700.0}) {
            TrackMeasurements meas{{0.0, 0.0}, 0.0, p0, kTd};
            meas.cumsum_hz[i] = cumsum;
            // ||p - v|| - ||p|| = c on the zero set.
            const double c = distance_difference(scene, p0, path) - cumsum * lt;
            const double a = std::abs(c) / 2.0;
            ASSERT_LT(a, focal);
            const double b = std::sqrt(focal * focal - a * a);
            const double side = c > 0 ? -1.0 : 1.0;
            for (double t = -2.0; t <= 2.0; t += 0.25) {
                const Point2 p = center + (side * a * std::cosh(t)) * axis + (b * std::sinh(t)) * normal;
                EXPECT_LE(std::abs(track_error_vector(p, meas, scene)(static_cast<Eigen::Index>(i))) * lt, 1e-9);
            }
        }
    }
}

TEST(TrackJacobian, MatchesCentralDifferences) {
    std::mt19937_64 rng(22);
    const Scene scene = room_scene();
    const SolverConfig cfg = unit_config();
    for (int trial = 0; trial < 100; ++trial) {
        const Point2 p0 = random_point(rng);
        const Point2 pk = random_point(rng);
        const TrackMeasurements meas{{30.0, -20.0}, 0.8, p0, kTd};
        const Eigen::Vector2d x(pk.x, pk.y);
        auto n = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return track_error_vector({v(0), v(1)}, meas, scene);
        };
        EXPECT_LE(relative_error(track_jacobian(pk, meas, scene), central_difference(n, x, 1e-6)), 1e-5);
        auto h = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(1, track_objective({v(0), v(1)}, meas, scene, cfg));
        };
        const Eigen::MatrixXd numeric = central_difference(h, x, 1e-6).transpose();
        EXPECT_LE(relative_error(track_gradient(pk, meas, scene, cfg), numeric), 1e-5);
    }
}

TEST(TrackStep, StationaryStaysAtInitialEstimate) {
    const Scene scene = room_scene();
    const Point2 p0{2.0, 3.0};
    DetectionSeries s;
    s.detection_interval_s = kTd;
    for (std::size_t k = 0; k < 5; ++k) {
        DetectionRecord r;
        r.k = k;
        r.t_s = static_cast<double>(k) * kTd;
        r.mddoa_hz = {0.0, 0.0};
        r.valid = {true, true};
        r.aoa_rad = los_aoa(p0);
        s.records.push_back(r);
    }
    const TrackStepResult r = track_step(3, s, p0, p0, scene, unit_config());
    EXPECT_LE((r.p - p0).norm(), 1e-6);
}

TEST(TrackStep, DopplerOnlySolutionSitsOnBothLoci) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::linear({1.5, 2.0}, {0.3, 0.2}, 2.0);
    const DetectionSeries s = exact_series(scene, traj, 40);
    SolverConfig cfg = unit_config();
    cfg.weights_track = {1.0, 1.0, 0.0};
    const Point2 p0 = traj.position(0.0);
    const TrackStepResult r = track_step(30, s, p0, traj.position(1.4), scene, cfg);
    const TrackMeasurements meas{accumulate_mddoa(s, 30), s.records[30].aoa_rad, p0, kTd};
    const Eigen::Vector3d n = track_error_vector(r.p, meas, scene);
    EXPECT_LE(std::abs(n(0)), 1e-6);
    EXPECT_LE(std::abs(n(1)), 1e-6);
}

TEST(TrackStep, WeightScaleLeavesArgminUnchanged) {
    const Scene scene = room_scene();
    const TrackMeasurements meas{{35.0, -12.0}, 0.93, {2.0, 2.5}, kTd};
    SolverConfig cfg = unit_config();
    cfg.weights_track = {1.0, 0.5, 2.0};
    const TrackStepResult a = track_step_from({2.1, 2.4}, meas, scene, cfg);
    for (double& w : cfg.weights_track) {
        w *= 0.01;
    }
    cfg.grad_tol *= 0.01;
    const TrackStepResult b = track_step_from({2.1, 2.4}, meas, scene, cfg);
    EXPECT_LE((a.p - b.p).norm(), 1e-6);
}

TEST(TrackTrajectory, NoiselessLinearPath) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::linear({1.5, 2.0}, {0.12, 0.1}, 10.0);
    const DetectionSeries s = exact_series(scene, traj, 200);
    const TrackEstimate est = track_trajectory(s, scene, unit_config());
    ASSERT_EQ(est.entries.size(), 200u);
    EXPECT_EQ(est.entries[0].p_hat, est.p0_hat);
    for (const TrackEntry& e : est.entries) {
        EXPECT_LE((e.p_hat - traj.position(e.t_s)).norm(), 1e-3) << "k " << e.k;
    }
}

TEST(TrackTrajectory, StationaryNoiselessHoldsPosition) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::stationary({2.0, 3.0}, 10.0);
    const DetectionSeries s = exact_series(scene, traj, 200);
    const TrackEstimate est = track_trajectory(s, scene, unit_config());
    for (const TrackEntry& e : est.entries) {
        EXPECT_LE((e.p_hat - est.p0_hat).norm(), 1e-6);
        EXPECT_NEAR(wrap_angle(los_aoa(e.p_hat) - los_aoa({2.0, 3.0})), 0.0, 1e-9);
    }
}

TEST(TrackTrajectory, ParallelMatchesSequential) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::linear({1.5, 2.0}, {0.2, 0.1}, 5.0);
    DetectionSeries s = exact_series(scene, traj, 100);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 0.5);
    for (auto& r : s.records) {
        *r.mddoa_hz[0] += g(rng);
        *r.mddoa_hz[1] += g(rng);
        r.aoa_rad += 0.01 * g(rng);
    }
    const TrackEstimate seq = track_trajectory(s, scene, unit_config(), TrackMode::kSequential);
    const TrackEstimate par = track_trajectory(s, scene, unit_config(), TrackMode::kParallel, 4);
    ASSERT_EQ(seq.entries.size(), par.entries.size());
    for (std::size_t k = 0; k < seq.entries.size(); ++k) {
        EXPECT_LE((seq.entries[k].p_hat - par.entries[k].p_hat).norm(), 1e-6) << "k " << k;
    }
}

TEST(TrackTrajectory, TruncationKeepsInteriorPrefix) {
    const Scene scene = room_scene();
    const Trajectory traj = Trajectory::linear({1.5, 2.0}, {0.2, 0.1}, 5.0);
    DetectionSeries s = exact_series(scene, traj, 100);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 0.5);
    for (auto& r : s.records) {
        *r.mddoa_hz[0] += g(rng);
        *r.mddoa_hz[1] += g(rng);
        r.aoa_rad += 0.01 * g(rng);
    }
    DetectionSeries half = s;
    half.records.resize(50);
    const SmootherConfig smoother;
    const TrackEstimate full = track_trajectory(s, scene, smoother, unit_config());
    const TrackEstimate part = track_trajectory(half, scene, smoother, unit_config());
    EXPECT_EQ(full.p0_hat, part.p0_hat);
    for (std::size_t k = 0; k + smoother.window / 2 < 50; ++k) {
        EXPECT_EQ(full.entries[k].p_hat, part.entries[k].p_hat) << "k " << k;
    }
}

TEST(TrackTrajectory, RequiresTwoInstants) {
    const Scene scene = room_scene();
    const DetectionSeries s = exact_series(scene, Trajectory::stationary({2.0, 3.0}, 1.0), 1);
    EXPECT_THROW(track_trajectory(s, scene, unit_config()), InsufficientDataError);
}

}  // namespace
}  // namespace mmtrack
