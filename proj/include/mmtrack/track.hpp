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

#ifndef MMTRACK_TRACK_HPP
#define MMTRACK_TRACK_HPP

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "mmtrack/detect.hpp"
#include "mmtrack/errors.hpp"
#include "mmtrack/scene.hpp"
#include "mmtrack/smooth.hpp"

namespace mmtrack {

struct SolverConfig {
    /// Diagonal weights for (e_f2, e_f3, e_a0, e_a1).
    std::array<double, 4> weights_init{1.0, 1.0, 1.0, 1.0};
    /// Diagonal weights for (n_f2, n_f3, n_a).
    std::array<double, 3> weights_track{1.0, 1.0, 1.0};
    /// Doppler residuals are divided by this before weighting (normally the CAF resolution).
    double doppler_unit_hz = 1.0;
    /// Angle residuals are divided by this before weighting (normally the AoA noise level).
    double aoa_unit_rad = 1.0;
    double grad_tol = 1e-9;
    std::size_t max_iters = 100;
    double damping0 = 1e-3;
    double init_range_m = 2.0;
    std::size_t multistart = 5;

    void validate() const;
};

/// Observables consumed by the two-instant initialization.
struct InitMeasurements {
    double mddoa2_hz = 0.0;  // path 2 Doppler difference at k = 0
    double mddoa3_hz = 0.0;  // path 3 Doppler difference at k = 0
    double aoa0_rad = 0.0;
    double aoa1_rad = 0.0;
    double detection_interval_s = 0.0;
};

/// Stacked unknowns (x0, y0, x1, y1).
using InitState = Eigen::Vector4d;

struct SolveDiagnostics {
    std::size_t iterations = 0;
    double final_grad_norm = 0.0;
    double objective = 0.0;
    bool converged = false;
    /// Objective after the start and after every accepted step.
    std::vector<double> objective_history;
};

/// (e_f2, e_f3, e_a0, e_a1) in Hz and radians; angle residuals wrapped to (-pi, pi].
Eigen::Vector4d init_error_vector(const InitState& p, const InitMeasurements& meas, const Scene& scene);

/// Analytic d e / d p, rows as in init_error_vector, columns (x0, y0, x1, y1).
Eigen::Matrix4d init_jacobian(const InitState& p, const InitMeasurements& meas, const Scene& scene);

/// Weighted sum of squared normalized residuals.
double init_objective(const InitState& p, const InitMeasurements& meas, const Scene& scene,
                      const SolverConfig& cfg);

/// Gradient of init_objective.
Eigen::Vector4d init_gradient(const InitState& p, const InitMeasurements& meas, const Scene& scene,
                              const SolverConfig& cfg);

struct InitialSolution {
    Point2 p0;
    Point2 p1;
    SolveDiagnostics diagnostics;
};

/// No start converged; `best()` is the lowest-objective iterate seen.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& message, InitialSolution best)
        : Error(message), best_(std::move(best)) {}
    const InitialSolution& best() const noexcept { return best_; }

private:
    InitialSolution best_;
};

/// Damped Newton from a single start. Never throws for non-convergence; check diagnostics.
InitialSolution solve_initial_from(const InitState& start, const InitMeasurements& meas, const Scene& scene,
                                   const SolverConfig& cfg);

/// Multistart along the measured first bearing at ranges init_range_m * 2^(j-1).
InitialSolution solve_initial(const InitMeasurements& meas, const Scene& scene, const SolverConfig& cfg);

/// Sum of the (smoothed) Doppler differences over instants 0 .. k-1.
std::array<double, 2> accumulate_mddoa(const DetectionSeries& series, std::size_t k);

/// Observables for instant k of the tracking stage.
struct TrackMeasurements {
    std::array<double, 2> cumsum_hz{0.0, 0.0};
    double aoa_rad = 0.0;
    Point2 p0_hat;
    double detection_interval_s = 0.0;
};

/// (n_f2, n_f3, n_a) at candidate p_k.
Eigen::Vector3d track_error_vector(Point2 pk, const TrackMeasurements& meas, const Scene& scene);

/// Analytic d n / d p_k.
Eigen::Matrix<double, 3, 2> track_jacobian(Point2 pk, const TrackMeasurements& meas, const Scene& scene);

double track_objective(Point2 pk, const TrackMeasurements& meas, const Scene& scene, const SolverConfig& cfg);

Eigen::Vector2d track_gradient(Point2 pk, const TrackMeasurements& meas, const Scene& scene,
                               const SolverConfig& cfg);

struct TrackStepResult {
    Point2 p;
    SolveDiagnostics diagnostics;
};

/// Damped Newton on h(p_k) from `start`.
TrackStepResult track_step_from(Point2 start, const TrackMeasurements& meas, const Scene& scene,
                                const SolverConfig& cfg);

/// Position at instant k >= 1 from the smoothed series, warm-started at `warm_start`.
/// A start that fails to converge is retried from the measured bearing.
TrackStepResult track_step(std::size_t k, const DetectionSeries& series, Point2 p0_hat, Point2 warm_start,
                           const Scene& scene, const SolverConfig& cfg);

struct TrackEntry {
    std::size_t k = 0;
    double t_s = 0.0;
    Point2 p_hat;
    SolveDiagnostics diagnostics;
};

struct TrackEstimate {
    Point2 p0_hat;
    Point2 p1_hat;
    SolveDiagnostics init;
    std::vector<TrackEntry> entries;
};

enum class TrackMode {
    kSequential,  // warm start from the previous estimate
    kParallel,    // independent bearing-ray seeds per instant, spread over worker threads
};

/// Initialization on instants 0 and 1, then one solve per instant. Throws NonConvergenceError
/// when initialization fails; later instants that do not converge are flagged.
TrackEstimate track_trajectory(const DetectionSeries& smoothed, const Scene& scene, const SolverConfig& cfg,
                               TrackMode mode = TrackMode::kSequential, unsigned workers = 0);

/// Smooths `raw` first.
TrackEstimate track_trajectory(const DetectionSeries& raw, const Scene& scene, const SmootherConfig& smoother,
                               const SolverConfig& cfg, TrackMode mode = TrackMode::kSequential,
                               unsigned workers = 0);

}  // namespace mmtrack

#endif  // MMTRACK_TRACK_HPP
