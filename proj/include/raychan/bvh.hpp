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
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "raychan/geometry.hpp"

namespace raychan {

struct SceneHit {
    int facet = -1;
    double t = 0.0;
    Vec3 point;
};

/// Median-split bounding volume hierarchy over triangles. Construction is
/// deterministic; traversal gives the same nearest hit as a linear scan.
class Bvh {
  public:
    Bvh() = default;

    /// vertices: per triangle i, v0 v1 v2 at tris[3i..3i+2].
    void build(const std::vector<Vec3> &tri_vertices)
    {
        verts_ = tri_vertices;
        const std::size_t n = verts_.size() / 3;
        nodes_.clear();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0);
        if (n == 0)
            return;
        std::vector<Vec3> centroids(n);
        std::vector<Aabb> boxes(n);
        for (std::size_t i = 0; i < n; ++i) {
            Aabb b;
            b.expand(verts_[3 * i]);
            b.expand(verts_[3 * i + 1]);
            b.expand(verts_[3 * i + 2]);
            boxes[i] = b;
            centroids[i] = (verts_[3 * i] + verts_[3 * i + 1] + verts_[3 * i + 2]) / 3.0;
        }
        nodes_.reserve(2 * n);
        build_node(0, n, centroids, boxes);
    }

    bool empty() const { return nodes_.empty(); }

    /// Nearest hit with t in (t_min, t_max], or nothing.
    std::optional<SceneHit> nearest(const Ray &ray, double t_min, double t_max) const
    {
        SceneHit best;
        best.t = t_max;
        bool found = false;
        walk(ray, t_min, [&](std::size_t tri, double tmin, double tmax_node) {
            (void)tmax_node;
            auto h = intersect_triangle(ray.origin, ray.direction, verts_[3 * tri],
                                        verts_[3 * tri + 1], verts_[3 * tri + 2], tmin, best.t);
            if (h) {
                best.t = h->t;
                best.facet = static_cast<int>(tri);
                found = true;
            }
            return false; // keep searching for closer hits
        }, [&] { return best.t; });
        if (!found)
            return std::nullopt;
        best.point = ray.origin + ray.direction * best.t;
        return best;
    }

    /// True if any triangle intersects the ray with t in (t_min, t_max],
    /// optionally ignoring up to two triangle indices (segment endpoints).
    bool any_hit(const Ray &ray, double t_min, double t_max, int skip_a = -1, int skip_b = -1) const
    {
        bool hit = false;
        walk(ray, t_min, [&](std::size_t tri, double tmin, double) {
            if (static_cast<int>(tri) == skip_a || static_cast<int>(tri) == skip_b)
                return false;
            auto h = intersect_triangle(ray.origin, ray.direction, verts_[3 * tri],
                                        verts_[3 * tri + 1], verts_[3 * tri + 2], tmin, t_max);
            if (h) {
                hit = true;
                return true; // early out
            }
            return false;
        }, [&] { return t_max; });
        return hit;
    }

  private:
    struct Node {
        Aabb box;
        std::uint32_t left = 0;   // index of left child; right = left + ... stored explicitly
        std::uint32_t right = 0;
        std::uint32_t first = 0;  // leaf: first triangle in order_
        std::uint32_t count = 0;  // leaf: triangle count; 0 for interior
    };

    std::uint32_t build_node(std::size_t begin, std::size_t end, const std::vector<Vec3> &centroids,
                             const std::vector<Aabb> &boxes)
    {
        Node node;
        for (std::size_t i = begin; i < end; ++i)
            node.box.expand(boxes[order_[i]]);
        const std::size_t count = end - begin;
        const std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(node);
        if (count <= 2) {
            nodes_[idx].first = static_cast<std::uint32_t>(begin);
            nodes_[idx].count = static_cast<std::uint32_t>(count);
            return idx;
        }
        Aabb cbox;
        for (std::size_t i = begin; i < end; ++i)
            cbox.expand(centroids[order_[i]]);
        const Vec3 ext = cbox.extent();
        int axis = 0;
        if (ext.y > ext.x)
            axis = 1;
        if (ext.z > (axis == 0 ? ext.x : ext.y))
            axis = 2;
        auto key = [&](std::size_t tri) {
            const Vec3 &c = centroids[tri];
            return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
        };
        const std::size_t mid = begin + count / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             double ka = key(a), kb = key(b);
                             return ka < kb || (ka == kb && a < b);
                         });
        const std::uint32_t l = build_node(begin, mid, centroids, boxes);
        const std::uint32_t r = build_node(mid, end, centroids, boxes);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    template <typename Visit, typename MaxT>
    void walk(const Ray &ray, double t_min, Visit &&visit, MaxT &&current_max) const
    {
        if (nodes_.empty())
            return;
        std::uint32_t stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const Node &node = nodes_[stack[--sp]];
            auto clipped = node.box.clip(ray, t_min, current_max());
            if (!clipped)
                continue;
            if (node.count > 0) {
                for (std::uint32_t i = 0; i < node.count; ++i)
                    if (visit(order_[node.first + i], t_min, current_max()))
                        return;
            } else {
                stack[sp++] = node.left;
                stack[sp++] = node.right;
            }
        }
    }

    std::vector<Vec3> verts_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

} // namespace raychan
