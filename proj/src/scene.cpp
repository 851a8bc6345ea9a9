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

#include "mmtrack/scene.hpp"

#include <string>

#include "mmtrack/errors.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

namespace {

constexpr double kUnitTolerance = 1e-12;

double ranged(Point2 p, Point2 rx, const char* what) {
    const double r = (p - rx).norm();
    if (r == 0.0) {
        throw DegenerateGeometryError(std::string("point coincides with ") + what);
    }
    return r;
}

int nlos_index(Path path) {
    if (path == Path::kLos) {
        throw std::invalid_argument("LoS path has no virtual BS");
    }
    return static_cast<int>(path) - 2;
}

}  // namespace

Point2 mirror_bs(Point2 bs, const Wall& wall) {
    if (!wall.normal.finite() || !wall.anchor.finite() ||
        std::abs(wall.normal.norm() - 1.0) > kUnitTolerance) {
        throw InvalidWallError("wall normal must be a finite unit vector");
    }
    const double offset = (bs - wall.anchor).dot(wall.normal);
    return bs - (2.0 * offset) * wall.normal;
}

Scene::Scene(const std::array<Wall, 2>& walls, double carrier_hz)
    : walls_(walls), carrier_hz_(carrier_hz), wavelength_m_(kSpeedOfLight / carrier_hz) {
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        throw std::invalid_argument("carrier frequency must be positive");
    }
    for (std::size_t i = 0; i < 2; ++i) {
        virtual_bs_[i] = mirror_bs(bs(), walls_[i]);
        if (virtual_bs_[i] == bs()) {
            throw DegenerateGeometryError("wall " + std::to_string(i + 1) + " passes through the BS");
        }
    }
    if ((virtual_bs_[0] - virtual_bs_[1]).norm() == 0.0) {
        throw DegenerateGeometryError("both walls produce the same virtual BS");
    }
}

Scene Scene::canonical(Point2 bs, std::array<Wall, 2> walls, double carrier_hz) {
    for (auto& w : walls) {
        w.anchor = w.anchor - bs;
    }
    return Scene(walls, carrier_hz);
}

bool Scene::in_room(Point2 p) const {
    for (const Wall& w : walls_) {
        const double bs_side = (bs() - w.anchor).dot(w.normal);
        const double p_side = (p - w.anchor).dot(w.normal);
        if (!(bs_side * p_side > 0.0)) {
            return false;
        }
    }
    return true;
}

Point2 Scene::receiver(Path path) const {
    return path == Path::kLos ? bs() : virtual_bs(path);
}

Point2 Scene::virtual_bs(Path path) const { return virtual_bs_[nlos_index(path)]; }

double distance_difference(const Scene& scene, Point2 p, Path path) {
    const double to_virtual = ranged(p, scene.virtual_bs(path), "virtual BS");
    const double to_bs = ranged(p, scene.bs(), "BS");
    return to_virtual - to_bs;
}

Point2 distance_difference_gradient(const Scene& scene, Point2 p, Path path) {
    const Point2 vbs = scene.virtual_bs(path);
    const double to_virtual = ranged(p, vbs, "virtual BS");
    const double to_bs = ranged(p, scene.bs(), "BS");
    return (1.0 / to_virtual) * (p - vbs) - (1.0 / to_bs) * (p - scene.bs());
}

double los_aoa(Point2 p) {
    if (p.x == 0.0 && p.y == 0.0) {
        throw DegenerateGeometryError("bearing of the origin is undefined");
    }
    return wrap_angle(std::atan2(p.y, p.x));
}

double wrap_angle(double rad) {
    double w = std::remainder(rad, 2.0 * kPi);
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

double true_doppler(const Scene& scene, const Trajectory& traj, double t, Path path) {
    const Point2 p = traj.position(t);
    const Point2 v = traj.velocity(t);
    const Point2 rx = scene.receiver(path);
    const double range = ranged(p, rx, path == Path::kLos ? "BS" : "virtual BS");
    const double range_rate = (p - rx).dot(v) / range;
    return -range_rate / scene.wavelength_m();
}

double true_mddoa(const Scene& scene, const Trajectory& traj, double t, Path path) {
    nlos_index(path);
    return true_doppler(scene, traj, t, path) - true_doppler(scene, traj, t, Path::kLos);
}

}  // namespace mmtrack
