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

#include "mmtrack/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

#include "mmtrack/errors.hpp"

namespace mmtrack {

Trajectory::Trajectory(std::vector<Waypoint> waypoints, Interpolation interpolation)
    : waypoints_(std::move(waypoints)), interpolation_(interpolation) {
    if (waypoints_.size() < 2) {
        throw std::invalid_argument("trajectory needs at least two waypoints");
    }
    if (waypoints_.front().t_s != 0.0) {
        throw std::invalid_argument("trajectory must start at t = 0");
    }
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        if (!waypoints_[i].p.finite() || !std::isfinite(waypoints_[i].t_s)) {
            throw std::invalid_argument("trajectory waypoints must be finite");
        }
        if (i > 0 && !(waypoints_[i].t_s > waypoints_[i - 1].t_s)) {
            throw std::invalid_argument("trajectory timestamps must increase strictly");
        }
    }
    if (interpolation_ == Interpolation::kCubic) {
        // Natural spline: tridiagonal system for the knot second derivatives.
        const std::size_t n = waypoints_.size();
        second_.assign(n, Point2{});
        if (n > 2) {
            std::vector<double> diag(n, 0.0), upper(n, 0.0);
            std::vector<Point2> rhs(n);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double h0 = waypoints_[i].t_s - waypoints_[i - 1].t_s;
                const double h1 = waypoints_[i + 1].t_s - waypoints_[i].t_s;
                const Point2 s0 = (1.0 / h0) * (waypoints_[i].p - waypoints_[i - 1].p);
                const Point2 s1 = (1.0 / h1) * (waypoints_[i + 1].p - waypoints_[i].p);
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * (s1 - s0);
                if (i > 1) {
                    const double m = h0 / diag[i - 1];
                    diag[i] -= m * upper[i - 1];
                    rhs[i] = rhs[i] - m * rhs[i - 1];
                }
            }
            for (std::size_t i = n - 2; i >= 1; --i) {
                second_[i] = (1.0 / diag[i]) * (rhs[i] - upper[i] * second_[i + 1]);
            }
        }
    }
}

Trajectory Trajectory::stationary(Point2 p, double duration_s) {
    return Trajectory({{0.0, p}, {duration_s, p}});
}

Trajectory Trajectory::linear(Point2 start, Point2 velocity, double duration_s) {
    return Trajectory({{0.0, start}, {duration_s, start + duration_s * velocity}});
}

std::size_t Trajectory::segment(double t) const {
    if (!(t >= 0.0) || t > duration()) {
        throw DurationMismatchError("time " + std::to_string(t) + " s outside trajectory [0, " +
                                    std::to_string(duration()) + "] s");
    }
    const auto it = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                                     [](double v, const Waypoint& w) { return v < w.t_s; });
    const auto idx = static_cast<std::size_t>(it - waypoints_.begin());
    return std::min(idx, waypoints_.size() - 1) - 1;
}

Point2 Trajectory::position(double t) const {
    const std::size_t i = segment(t);
    const Waypoint& a = waypoints_[i];
    const Waypoint& b = waypoints_[i + 1];
    const double h = b.t_s - a.t_s;
    const double u = (t - a.t_s) / h;
    Point2 p = a.p + u * (b.p - a.p);
    if (interpolation_ == Interpolation::kCubic) {
        const double w = 1.0 - u;
        p = p + (h * h / 6.0) * ((w * w * w - w) * second_[i] + (u * u * u - u) * second_[i + 1]);
    }
    return p;
}

Point2 Trajectory::velocity(double t) const {
    const std::size_t i = segment(t);
    const Waypoint& a = waypoints_[i];
    const Waypoint& b = waypoints_[i + 1];
    const double h = b.t_s - a.t_s;
    Point2 v = (1.0 / h) * (b.p - a.p);
    if (interpolation_ == Interpolation::kCubic) {
        const double u = (t - a.t_s) / h;
        const double w = 1.0 - u;
        v = v + (h / 6.0) * ((1.0 - 3.0 * w * w) * second_[i] + (3.0 * u * u - 1.0) * second_[i + 1]);
    }
    return v;
}

Trajectory Trajectory::translated(Point2 offset) const {
    std::vector<Waypoint> moved = waypoints_;
    for (auto& w : moved) {
        w.p = w.p + offset;
    }
    return Trajectory(std::move(moved), interpolation_);
}

}  // namespace mmtrack
