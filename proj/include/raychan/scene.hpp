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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raychan/bvh.hpp"
#include "raychan/geometry.hpp"
#include "raychan/material.hpp"

namespace raychan {

struct Facet {
    Vec3 v0, v1, v2;
    Vec3 normal; // unit, consistent with winding (v1-v0) x (v2-v0)
    int material_id = 0;

    double area() const { return 0.5 * norm(cross(v1 - v0, v2 - v0)); }
    Vec3 centroid() const { return (v0 + v1 + v2) / 3.0; }
};

/// Coplanar facets merged into one reflector for image enumeration.
/// Plane equation: dot(normal, p) = offset; normal points to the front side.
struct PlaneGroup {
    Vec3 normal;
    double offset = 0.0;
    std::vector<int> facets;
};

/// Axis-aligned solid used for obstacle bookkeeping and placement rejection.
struct BoxSolid {
    Vec3 min, max;

    bool contains(const Vec3 &p, double margin = 0.0) const
    {
        return p.x > min.x - margin && p.x < max.x + margin && p.y > min.y - margin &&
               p.y < max.y + margin && p.z > min.z - margin && p.z < max.z + margin;
    }
};

/// Extruded footprint solid (urban buildings).
struct PrismSolid {
    std::vector<std::array<double, 2>> polygon;
    double height = 0.0;

    bool contains(const Vec3 &p) const
    {
        if (p.z < 0.0 || p.z > height)
            return false;
        return point_in_polygon(p.x, p.y, &polygon[0][0], polygon.size());
    }
};

class Scene {
  public:
    std::vector<Facet> facets;
    std::vector<Material> materials;
    Aabb bounds;
    std::vector<BoxSolid> box_solids;
    std::vector<PrismSolid> prism_solids;

    const Material &material_of(int facet_id) const
    {
        return materials[static_cast<std::size_t>(facets[static_cast<std::size_t>(facet_id)].material_id)];
    }

    int material_id(const std::string &name) const
    {
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name)
                return static_cast<int>(i);
        throw std::invalid_argument("scene has no material '" + name + "'");
    }

    const std::vector<PlaneGroup> &planes() const { return planes_; }
    const Bvh &bvh() const { return bvh_; }

    /// True if p lies inside the scene bounds and outside every solid.
    bool contains_free(const Vec3 &p, double bounds_margin = 0.0) const
    {
        if (!bounds.contains(p, bounds_margin))
            return false;
        for (const BoxSolid &b : box_solids)
            if (b.contains(p))
                return false;
        for (const PrismSolid &s : prism_solids)
            if (s.contains(p))
                return false;
        return true;
    }

    /// Freeze geometry: build the acceleration index and the coplanar reflector
    /// groups. Must be called once after all facets are added.
    void finalize()
    {
        std::vector<Vec3> tri;
        tri.reserve(facets.size() * 3);
        for (const Facet &f : facets) {
            tri.push_back(f.v0);
            tri.push_back(f.v1);
            tri.push_back(f.v2);
        }
        bvh_.build(tri);
        group_planes();
    }

  private:
    void group_planes()
    {
        planes_.clear();
        // Quantized plane key so coplanar triangles from one wall land in the
        // same reflector group regardless of triangulation round-off.
        std::map<std::array<std::int64_t, 4>, std::size_t> index;
        auto q = [](double v) { return static_cast<std::int64_t>(std::llround(v * 1e7)); };
        for (std::size_t i = 0; i < facets.size(); ++i) {
            const Facet &f = facets[i];
            const double off = dot(f.normal, f.v0);
            std::array<std::int64_t, 4> key{q(f.normal.x), q(f.normal.y), q(f.normal.z), q(off)};
            auto it = index.find(key);
            if (it == index.end()) {
                PlaneGroup g;
                g.normal = f.normal;
                g.offset = off;
                g.facets.push_back(static_cast<int>(i));
                index.emplace(key, planes_.size());
                planes_.push_back(std::move(g));
            } else {
                planes_[it->second].facets.push_back(static_cast<int>(i));
            }
        }
    }

    Bvh bvh_;
    std::vector<PlaneGroup> planes_;
};

/// Nearest ray/facet hit with distance in (t_min, t_max], or nothing.
inline std::optional<SceneHit> intersect(const Scene &scene, const Ray &ray, double t_min,
                                         double t_max)
{
    if (t_min < 0.0 || t_max <= t_min)
        throw std::invalid_argument("intersect: need 0 <= t_min < t_max");
    return scene.bvh().nearest(ray, t_min, t_max);
}

namespace detail {

inline void add_triangle(Scene &scene, const Vec3 &a, const Vec3 &b, const Vec3 &c, int material_id)
{
    Facet f;
    f.v0 = a;
    f.v1 = b;
    f.v2 = c;
    const Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len < 1e-12)
        throw std::invalid_argument("degenerate facet (zero area)");
    f.normal = n / len;
    f.material_id = material_id;
    scene.facets.push_back(f);
}

/// Adds the two triangles of a rectangle (p0 p1 p2 p3 in order) wound so the
/// facet normal equals `want_normal`.
inline void add_rect(Scene &scene, const Vec3 &p0, const Vec3 &p1, const Vec3 &p2, const Vec3 &p3,
                     const Vec3 &want_normal, int material_id)
{
    const Vec3 n = normalized(cross(p1 - p0, p2 - p0));
    if (dot(n, want_normal) > 0.0) {
        add_triangle(scene, p0, p1, p2, material_id);
        add_triangle(scene, p0, p2, p3, material_id);
    } else {
        add_triangle(scene, p0, p2, p1, material_id);
        add_triangle(scene, p0, p3, p2, material_id);
    }
}

/// 12 triangles of an axis-aligned box. Normals face outward when
/// `outward` is true (obstacles), inward otherwise (room shell).
inline void add_box(Scene &scene, const Vec3 &lo, const Vec3 &hi, bool outward, int mat_xy_walls,
                    int mat_floor, int mat_ceiling)
{
    const double s = outward ? 1.0 : -1.0;
    // -x / +x
    add_rect(scene, {lo.x, lo.y, lo.z}, {lo.x, hi.y, lo.z}, {lo.x, hi.y, hi.z}, {lo.x, lo.y, hi.z},
             {-s, 0, 0}, mat_xy_walls);
    add_rect(scene, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {hi.x, lo.y, hi.z},
             {s, 0, 0}, mat_xy_walls);
    // -y / +y
    add_rect(scene, {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, lo.y, hi.z}, {lo.x, lo.y, hi.z},
             {0, -s, 0}, mat_xy_walls);
    add_rect(scene, {lo.x, hi.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
             {0, s, 0}, mat_xy_walls);
    // -z / +z
    add_rect(scene, {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
             {0, 0, -s}, mat_floor);
    add_rect(scene, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
             {0, 0, s}, mat_ceiling);
}

inline bool segments_intersect_2d(const std::array<double, 2> &a, const std::array<double, 2> &b,
                                  const std::array<double, 2> &c, const std::array<double, 2> &d)
{
    auto orient = [](const std::array<double, 2> &p, const std::array<double, 2> &q,
                     const std::array<double, 2> &r) {
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

inline bool polygon_is_simple(const std::vector<std::array<double, 2>> &poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (shared vertex)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j)
                continue;
            if (segments_intersect_2d(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

inline double polygon_signed_area(const std::vector<std::array<double, 2>> &poly)
{
    double a = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const auto &p = poly[i];
        const auto &q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

/// Ear clipping for a simple CCW polygon; returns index triples.
inline std::vector<std::array<std::size_t, 3>>
triangulate_polygon(std::vector<std::array<double, 2>> poly)
{
    std::vector<std::size_t> idx(poly.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (polygon_signed_area(poly) < 0.0)
        std::reverse(idx.begin(), idx.end());
    std::vector<std::array<std::size_t, 3>> tris;
    auto cross2 = [&](std::size_t a, std::size_t b, std::size_t c) {
        return (poly[b][0] - poly[a][0]) * (poly[c][1] - poly[a][1]) -
               (poly[b][1] - poly[a][1]) * (poly[c][0] - poly[a][0]);
    };
    std::size_t guard = 0;
    while (idx.size() > 3) {
        if (++guard > 10000)
            throw std::invalid_argument("polygon triangulation failed (degenerate polygon?)");
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const std::size_t a = idx[(i + idx.size() - 1) % idx.size()];
            const std::size_t b = idx[i];
            const std::size_t c = idx[(i + 1) % idx.size()];
            if (cross2(a, b, c) <= 1e-12)
                continue; // reflex or collinear
            bool contains_other = false;
            for (std::size_t j : idx) {
                if (j == a || j == b || j == c)
                    continue;
                if (cross2(a, b, j) >= -1e-12 && cross2(b, c, j) >= -1e-12 &&
                    cross2(c, a, j) >= -1e-12) {
                    contains_other = true;
                    break;
                }
            }
            if (contains_other)
                continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped)
            throw std::invalid_argument("polygon triangulation failed (not a simple polygon?)");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

} // namespace detail

struct ObstacleBox {
    Vec3 min, max;
    std::string material = "wood";
};

struct IndoorOptions {
    std::string wall_material = "plasterboard";
    std::string floor_material = "concrete";
    std::string ceiling_material = "plywood";
};

/// Closed rectangular room (x in [0, dx], y in [0, dy], z in [0, dz]) with
/// inward wall normals, plus axis-aligned obstacle boxes with outward normals.
inline Scene build_indoor_scene(const Vec3 &dimensions, const std::vector<ObstacleBox> &obstacles,
                                const IndoorOptions &opts = {},
                                std::vector<Material> materials = builtin_materials())
{
    if (!(dimensions.x > 0.0 && dimensions.y > 0.0 && dimensions.z > 0.0))
        throw std::invalid_argument("build_indoor_scene: dimensions must be strictly positive");
    Scene scene;
    scene.materials = std::move(materials);
    for (const Material &m : scene.materials)
        m.validate();
    const int wall = scene.material_id(opts.wall_material);
    const int floor = scene.material_id(opts.floor_material);
    const int ceiling = scene.material_id(opts.ceiling_material);
    detail::add_box(scene, {0, 0, 0}, dimensions, /*outward=*/false, wall, floor, ceiling);
    for (const ObstacleBox &ob : obstacles) {
        if (!(ob.min.x < ob.max.x && ob.min.y < ob.max.y && ob.min.z < ob.max.z))
            throw std::invalid_argument("build_indoor_scene: obstacle box has non-positive extent");
        const bool inside = ob.min.x > 0.0 && ob.min.y > 0.0 && ob.min.z > 0.0 &&
                            ob.max.x < dimensions.x && ob.max.y < dimensions.y &&
                            ob.max.z < dimensions.z;
        if (!inside)
            throw std::invalid_argument(
                "build_indoor_scene: obstacle must lie strictly inside the room");
        const int m = scene.material_id(ob.material);
        detail::add_box(scene, ob.min, ob.max, /*outward=*/true, m, m, m);
        scene.box_solids.push_back({ob.min, ob.max});
    }
    scene.bounds.expand({0, 0, 0});
    scene.bounds.expand(dimensions);
    scene.finalize();
    return scene;
}

struct Footprint {
    std::vector<std::array<double, 2>> polygon; // simple, in meters
    double height = 10.0;
    std::string wall_material = "brick";
    std::string roof_material = "concrete";
};

struct UrbanOptions {
    double extent_x = 300.0; // scene spans [-extent/2, extent/2]
    double extent_y = 300.0;
    std::string ground_material = "concrete";
    double air_height = 50.0; // z headroom included in scene bounds
};

/// Ground plane at z = 0 covering the extent, plus extruded walls and a roof
/// for each footprint. Wall normals face outward, roof normals up.
inline Scene build_urban_scene(const std::vector<Footprint> &footprints,
                               const UrbanOptions &opts = {},
                               std::vector<Material> materials = builtin_materials())
{
    Scene scene;
    scene.materials = std::move(materials);
    for (const Material &m : scene.materials)
        m.validate();
    const double hx = opts.extent_x / 2.0, hy = opts.extent_y / 2.0;
    const int ground = scene.material_id(opts.ground_material);
    detail::add_rect(scene, {-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0}, {0, 0, 1},
                     ground);
    double max_h = 0.0;
    for (const Footprint &fp : footprints) {
        if (fp.polygon.size() < 3)
            throw std::invalid_argument("build_urban_scene: footprint needs >= 3 vertices");
        if (!(fp.height > 0.0))
            throw std::invalid_argument("build_urban_scene: footprint height must be > 0");
        if (!detail::polygon_is_simple(fp.polygon))
            throw std::invalid_argument("build_urban_scene: footprint polygon self-intersects");
        for (const auto &v : fp.polygon)
            if (std::abs(v[0]) > hx || std::abs(v[1]) > hy)
                throw std::invalid_argument("build_urban_scene: footprint outside scene extent");
        max_h = std::max(max_h, fp.height);
        const int wall = scene.material_id(fp.wall_material);
        const int roof = scene.material_id(fp.roof_material);
        // walls: outward normal = CCW edge rotated -90 deg
        std::vector<std::array<double, 2>> poly = fp.polygon;
        if (detail::polygon_signed_area(poly) < 0.0)
            std::reverse(poly.begin(), poly.end());
        for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
            const auto &p = poly[i];
            const auto &q = poly[(i + 1) % n];
            const Vec3 a{p[0], p[1], 0.0}, b{q[0], q[1], 0.0};
            const Vec3 at{p[0], p[1], fp.height}, bt{q[0], q[1], fp.height};
            const Vec3 out = normalized(Vec3{q[1] - p[1], -(q[0] - p[0]), 0.0});
            detail::add_rect(scene, a, b, bt, at, out, wall);
        }
        for (const auto &tri : detail::triangulate_polygon(poly))
            detail::add_triangle(scene, {poly[tri[0]][0], poly[tri[0]][1], fp.height},
                                 {poly[tri[1]][0], poly[tri[1]][1], fp.height},
                                 {poly[tri[2]][0], poly[tri[2]][1], fp.height}, roof);
        scene.prism_solids.push_back({poly, fp.height});
    }
    scene.bounds.expand({-hx, -hy, 0.0});
    scene.bounds.expand({hx, hy, std::max(opts.air_height, max_h)});
    scene.finalize();
    return scene;
}

/// Facet-free scene (free-space propagation) over the given domain box.
inline Scene build_free_space_scene(const Aabb &bounds)
{
    Scene scene;
    scene.materials = builtin_materials();
    scene.bounds = bounds;
    scene.finalize();
    return scene;
}

/// Regular grid of rectangular buildings, centered on the origin.
/// Heights and materials cycle deterministically so the skyline varies.
inline std::vector<Footprint> grid_footprints(int rows, int cols, double block, double street,
                                              const std::vector<double> &heights = {12.0, 24.0,
                                                                                    36.0, 18.0},
                                              const std::vector<std::string> &wall_materials = {
                                                  "brick", "concrete", "marble"})
{
    if (rows < 1 || cols < 1 || block <= 0.0 || street < 0.0)
        throw std::invalid_argument("grid_footprints: invalid grid parameters");
    const double pitch = block + street;
    const double x0 = -0.5 * (cols * block + (cols - 1) * street);
    const double y0 = -0.5 * (rows * block + (rows - 1) * street);
    std::vector<Footprint> fps;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double x = x0 + c * pitch;
            const double y = y0 + r * pitch;
            Footprint fp;
            fp.polygon = {{x, y}, {x + block, y}, {x + block, y + block}, {x, y + block}};
            const int k = r * cols + c;
            fp.height = heights[static_cast<std::size_t>(k) % heights.size()];
            fp.wall_material = wall_materials[static_cast<std::size_t>(k) % wall_materials.size()];
            fps.push_back(std::move(fp));
        }
    }
    return fps;
}

} // namespace raychan
