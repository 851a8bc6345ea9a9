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

#ifndef MMTRACK_TRAJECTORY_HPP
#define MMTRACK_TRAJECTORY_HPP

#include <vector>

#include "mmtrack/scene.hpp"

namespace mmtrack {

struct Waypoint {
    double t_s = 0.0;
    Point2 p;
};

enum class Interpolation { kPiecewiseLinear, kCubic };

/// Ground-truth transmitter path through timed waypoints.
///
/// Piecewise-linear paths report the right-hand segment velocity at interior knots and the
/// last segment velocity at t = T. Cubic paths use a natural cubic spline per coordinate.
class Trajectory {
public:
    /// Throws std::invalid_argument unless timestamps start at 0 and increase strictly.
    explicit Trajectory(std::vector<Waypoint> waypoints,
                        Interpolation interpolation = Interpolation::kPiecewiseLinear);

    static Trajectory stationary(Point2 p, double duration_s);
    static Trajectory linear(Point2 start, Point2 velocity, double duration_s);

    double duration() const { return waypoints_.back().t_s; }
    Interpolation interpolation() const { return interpolation_; }
    const std::vector<Waypoint>& waypoints() const { return waypoints_; }

    /// Throws DurationMismatchError outside [0, T].
    Point2 position(double t) const;
    Point2 velocity(double t) const;

    Trajectory translated(Point2 offset) const;

private:
    std::size_t segment(double t) const;

    std::vector<Waypoint> waypoints_;
    Interpolation interpolation_;
    // Natural spline second derivatives per knot (cubic only).
    std::vector<Point2> second_;
};

}  // namespace mmtrack

#endif  // MMTRACK_TRAJECTORY_HPP
