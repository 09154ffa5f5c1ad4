// SPDX-License-Identifier: Apache-2.0
//
// raychan - deterministic image-method channel simulator and MIMO analysis toolkit
// Copyright (C) 2026 the raychan authors
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

#pragma once

#include <cmath>
#include <limits>
#include <optional>

namespace raychan {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m
inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    bool operator==(const Vec3 &o) const = default;
};

inline Vec3 operator*(double s, const Vec3 &v) { return v * s; }

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3 &v) { return std::sqrt(dot(v, v)); }
inline double norm_sq(const Vec3 &v) { return dot(v, v); }

inline Vec3 normalized(const Vec3 &v)
{
    double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }

struct Ray {
    Vec3 origin;
    Vec3 direction; // unit length
};

/// Direction angles: azimuth in (-pi, pi], measured from +x toward +y;
/// elevation in [-pi/2, pi/2], measured from the horizontal plane toward +z.
struct AzEl {
    double az = 0.0;
    double el = 0.0;
};

inline AzEl azel_of(const Vec3 &v)
{
    double h = std::hypot(v.x, v.y);
    return {std::atan2(v.y, v.x), std::atan2(v.z, h)};
}

inline Vec3 unit_from_azel(double az, double el)
{
    double ce = std::cos(el);
    return {ce * std::cos(az), ce * std::sin(az), std::sin(el)};
}

inline Vec3 unit_from_azel(const AzEl &d) { return unit_from_azel(d.az, d.el); }

/// Vertical (theta) polarization unit vector of a propagation direction.
/// Lies in the plane spanned by the direction and global +z, perpendicular
/// to the direction. For a horizontal direction this points straight down.
inline Vec3 vertical_pol_vector(const Vec3 &dir)
{
    // theta_hat = (cos(theta)cos(phi), cos(theta)sin(phi), -sin(theta)) with
    // theta the polar angle from +z. Degenerates for dir parallel to z; pick
    // an arbitrary horizontal vector there (any choice in the tangent plane).
    double h = std::hypot(dir.x, dir.y);
    if (h < 1e-14)
        return {1.0, 0.0, 0.0};
    double ct = dir.z;                   // cos(polar) = z for unit dir
    double st = h;                       // sin(polar)
    return {ct * dir.x / h, ct * dir.y / h, -st};
}

struct Aabb {
    Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    void expand(const Vec3 &p)
    {
        min.x = std::min(min.x, p.x); min.y = std::min(min.y, p.y); min.z = std::min(min.z, p.z);
        max.x = std::max(max.x, p.x); max.y = std::max(max.y, p.y); max.z = std::max(max.z, p.z);
    }

    void expand(const Aabb &b)
    {
        expand(b.min);
        expand(b.max);
    }

    bool contains(const Vec3 &p, double margin = 0.0) const
    {
        return p.x >= min.x + margin && p.x <= max.x - margin &&
               p.y >= min.y + margin && p.y <= max.y - margin &&
               p.z >= min.z + margin && p.z <= max.z - margin;
    }

    Vec3 center() const { return (min + max) * 0.5; }
    Vec3 extent() const { return max - min; }

    /// Slab test; returns the parameter interval clipped to [t0, t1], or
    /// nothing if the ray misses the box.
    std::optional<std::pair<double, double>> clip(const Ray &r, double t0, double t1) const
    {
        for (int axis = 0; axis < 3; ++axis) {
            double o = axis == 0 ? r.origin.x : axis == 1 ? r.origin.y : r.origin.z;
            double d = axis == 0 ? r.direction.x : axis == 1 ? r.direction.y : r.direction.z;
            double lo = axis == 0 ? min.x : axis == 1 ? min.y : min.z;
            double hi = axis == 0 ? max.x : axis == 1 ? max.y : max.z;
            if (std::abs(d) < 1e-300) {
                if (o < lo || o > hi)
                    return std::nullopt;
                continue;
            }
            double inv = 1.0 / d;
            double ta = (lo - o) * inv;
            double tb = (hi - o) * inv;
            if (ta > tb)
                std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1)
                return std::nullopt;
        }
        return std::make_pair(t0, t1);
    }
};

struct TriangleHit {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Moeller-Trumbore ray/triangle test. Accepts hits with t in (t_min, t_max].
/// Barycentric tolerance keeps shared edges watertight.
inline std::optional<TriangleHit> intersect_triangle(const Vec3 &orig, const Vec3 &dir,
                                                     const Vec3 &v0, const Vec3 &v1,
                                                     const Vec3 &v2, double t_min, double t_max,
                                                     double bary_eps = 1e-9)
{
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 p = cross(dir, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-14)
        return std::nullopt; // parallel
    const double inv_det = 1.0 / det;
    const Vec3 s = orig - v0;
    const double u = dot(s, p) * inv_det;
    if (u < -bary_eps || u > 1.0 + bary_eps)
        return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv_det;
    if (v < -bary_eps || u + v > 1.0 + bary_eps)
        return std::nullopt;
    const double t = dot(e2, q) * inv_det;
    if (t <= t_min || t > t_max)
        return std::nullopt;
    return TriangleHit{t, u, v};
}

/// 2D point-in-polygon test (even-odd rule). Polygon given as a flat list of
/// (x, y) vertices; boundary points count as inside.
inline bool point_in_polygon(double px, double py, const double *xy, std::size_t n)
{
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double xi = xy[2 * i], yi = xy[2 * i + 1];
        double xj = xy[2 * j], yj = xy[2 * j + 1];
        // on-edge check
        double cross2 = (xj - xi) * (py - yi) - (yj - yi) * (px - xi);
        if (std::abs(cross2) < 1e-12 && std::min(xi, xj) - 1e-12 <= px && px <= std::max(xi, xj) + 1e-12 &&
            std::min(yi, yj) - 1e-12 <= py && py <= std::max(yi, yj) + 1e-12)
            return true;
        if ((yi > py) != (yj > py)) {
            double x_at = xi + (py - yi) / (yj - yi) * (xj - xi);
            if (px < x_at)
                inside = !inside;
        }
    }
    return inside;
}

} // namespace raychan
