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

#ifndef MMTRACK_SCENE_HPP
#define MMTRACK_SCENE_HPP

#include <array>
#include <cmath>

namespace mmtrack {

class Trajectory;

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Planar point or vector, meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;

    constexpr double dot(Point2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Infinite reflecting line through `anchor` with unit `normal`.
struct Wall {
    Point2 anchor;
    Point2 normal;
};

/// Path index: 1 is the LoS path, 2 and 3 are the reflections off walls[0] and walls[1].
enum class Path : int { kLos = 1, kWall1 = 2, kWall2 = 3 };

/// Mirror image of `bs` across `wall`. Throws InvalidWallError unless the normal is unit length.
Point2 mirror_bs(Point2 bs, const Wall& wall);

/// BS at the origin, two reflecting walls and the derived virtual BSs.
class Scene {
public:
    /// BS fixed at the origin. Throws InvalidWallError or DegenerateGeometryError when a wall
    /// passes through the BS or both walls produce the same virtual BS.
    Scene(const std::array<Wall, 2>& walls, double carrier_hz);

    /// Translates a scene with the BS at `bs` so that the BS lands on the origin.
    static Scene canonical(Point2 bs, std::array<Wall, 2> walls, double carrier_hz);

    Point2 bs() const { return {0.0, 0.0}; }
    const std::array<Wall, 2>& walls() const { return walls_; }
    /// Receiver position for `path`: the BS for the LoS path, otherwise the virtual BS.
    Point2 receiver(Path path) const;
    Point2 virtual_bs(Path path) const;
    double carrier_hz() const { return carrier_hz_; }
    double wavelength_m() const { return wavelength_m_; }
    /// True when p lies strictly on the BS side of both walls, where both reflections exist.
    bool in_room(Point2 p) const;

private:
    std::array<Wall, 2> walls_;
    std::array<Point2, 2> virtual_bs_;
    double carrier_hz_;
    double wavelength_m_;
};

/// ||virtual_bs - p|| - ||bs - p|| for an NLoS path.
double distance_difference(const Scene& scene, Point2 p, Path path);

/// Gradient of distance_difference with respect to p.
Point2 distance_difference_gradient(const Scene& scene, Point2 p, Path path);

/// Bearing of p seen from the BS, in (-pi, pi].
double los_aoa(Point2 p);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

/// Doppler frequency of `path` at time t: -(1/lambda) d/dt ||rx - p_tx(t)||.
double true_doppler(const Scene& scene, const Trajectory& traj, double t, Path path);

/// Doppler difference between an NLoS path and the LoS path at time t.
double true_mddoa(const Scene& scene, const Trajectory& traj, double t, Path path);

}  // namespace mmtrack

#endif  // MMTRACK_SCENE_HPP
