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
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "raychan/material.hpp"
#include "raychan/rng.hpp"
#include "raychan/scene.hpp"

namespace raychan {

enum class PathKind { LoS, Specular, Diffuse };

struct Path {
    PathKind kind = PathKind::LoS;
    double delay = 0.0;  // seconds, always length / c
    double length = 0.0; // meters
    cplx gain;           // field amplitude referenced to isotropic antennas
    AzEl aod;            // departure look direction (tx toward first point)
    AzEl aoa;            // arrival look direction (rx toward last point)
    std::vector<int> interactions; // facet ids, in propagation order

    int order() const { return static_cast<int>(interactions.size()); }
};

struct TraceConfig {
    int max_reflection_order = 5;
    double dynamic_range_db = 40.0; // infinity disables the cut
    bool enable_diffuse = false;
    int diffuse_samples_per_facet = 16;
    double diffuse_lambert_exponent = 1.0;
    double frequency = 3.5e9; // Hz
    std::uint64_t seed = 0;   // diffuse sample stream
};

inline constexpr double kNoDynamicRange = std::numeric_limits<double>::infinity();

/// Offset applied when re-launching rays from a surface point, so the
/// bounding facet does not occlude its own segment.
inline constexpr double kSurfaceOffset = 1e-6; // meters

/// True iff any facet crosses the open segment (a, b).
inline bool los_blocked(const Scene &scene, const Vec3 &a, const Vec3 &b)
{
    const double d = distance(a, b);
    if (d <= 0.0)
        throw std::invalid_argument("los_blocked: endpoints coincide");
    const Vec3 dir = (b - a) / d;
    return scene.bvh().any_hit({a, dir}, kSurfaceOffset, d - kSurfaceOffset);
}

/// Keeps path i iff its power is within dynamic_range_db of the strongest
/// path (inclusive); the strongest path always survives.
inline std::vector<Path> dynamic_range_filter(std::vector<Path> paths, double dynamic_range_db)
{
    if (paths.empty())
        throw std::invalid_argument("dynamic_range_filter: empty path list");
    if (!std::isfinite(dynamic_range_db))
        return paths;
    double max_p = 0.0;
    for (const Path &p : paths)
        max_p = std::max(max_p, std::norm(p.gain));
    std::vector<Path> kept;
    kept.reserve(paths.size());
    for (Path &p : paths) {
        const double rel_db = 10.0 * std::log10(max_p / std::norm(p.gain));
        if (rel_db <= dynamic_range_db * (1.0 + 1e-12) + 1e-12)
            kept.push_back(std::move(p));
    }
    return kept;
}

namespace detail {

/// Geometry of one validated path, independent of frequency.
struct PathGeometry {
    PathKind kind = PathKind::LoS;
    double length = 0.0;
    std::vector<Vec3> points;          // tx, hit_1..hit_k, rx
    std::vector<int> facets;           // hit facet per interaction
    std::vector<double> cos_incidence; // per interaction
    std::vector<double> te_weight;     // vertical-pol TE power fraction per interaction
    double diffuse_patch_term = 0.0;   // diffuse only: S^2 dA cos_i cos_s weighting
};

inline double signed_distance(const PlaneGroup &g, const Vec3 &p)
{
    return dot(g.normal, p) - g.offset;
}

inline Vec3 mirror(const PlaneGroup &g, const Vec3 &p)
{
    return p - g.normal * (2.0 * signed_distance(g, p));
}

/// Checks the open segment (a, b) for blockage, ignoring the facets the
/// endpoints lie on (reflection points sit exactly on geometry).
inline bool segment_blocked(const Scene &scene, const Vec3 &a, const Vec3 &b, int skip_a,
                            int skip_b)
{
    const double d = distance(a, b);
    if (d <= 2.0 * kSurfaceOffset)
        return true; // degenerate hop
    const Vec3 dir = (b - a) / d;
    return scene.bvh().any_hit({a, dir}, kSurfaceOffset, d - kSurfaceOffset, skip_a, skip_b);
}

/// Finds which facet of the plane group contains `p` (within tolerance).
inline int facet_containing(const Scene &scene, const PlaneGroup &g, const Vec3 &p)
{
    for (int fid : g.facets) {
        const Facet &f = scene.facets[static_cast<std::size_t>(fid)];
        // Barycentric containment in the facet plane.
        const Vec3 e1 = f.v1 - f.v0, e2 = f.v2 - f.v0, s = p - f.v0;
        const double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
        const double s1 = dot(s, e1), s2 = dot(s, e2);
        const double det = d11 * d22 - d12 * d12;
        if (det <= 0.0)
            continue;
        const double u = (d22 * s1 - d12 * s2) / det;
        const double v = (d11 * s2 - d12 * s1) / det;
        if (u >= -1e-9 && v >= -1e-9 && u + v <= 1.0 + 1e-9)
            return fid;
    }
    return -1;
}

} // namespace detail

/// Image-method path enumerator bound to one (scene, tx) pair. The mirrored
/// image tree depends only on geometry, so it is built once and reused for
/// every receiver and carrier frequency.
class ImageTracer {
  public:
    ImageTracer(const Scene &scene, const Vec3 &tx, int max_reflection_order)
        : scene_(&scene), tx_(tx), max_order_(max_reflection_order)
    {
        if (max_reflection_order < 0)
            throw std::invalid_argument("ImageTracer: max_reflection_order must be >= 0");
        if (!scene.bounds.contains(tx))
            throw std::invalid_argument("ImageTracer: tx outside scene bounds");
        if (!scene.contains_free(tx))
            throw std::invalid_argument("ImageTracer: tx embedded in geometry");
        build_tree();
    }

    const Scene &scene() const { return *scene_; }
    const Vec3 &tx() const { return tx_; }
    int max_order() const { return max_order_; }

    /// Frequency-independent pass: enumerate and validate path geometries.
    std::vector<detail::PathGeometry> trace_geometry(const Vec3 &rx) const
    {
        if (distance(tx_, rx) <= 0.0)
            throw std::invalid_argument("trace: tx and rx coincide");
        if (!scene_->bounds.contains(rx))
            throw std::invalid_argument("trace: rx outside scene bounds");
        if (!scene_->contains_free(rx))
            throw std::invalid_argument("trace: rx embedded in geometry");

        std::vector<detail::PathGeometry> geoms;
        // LoS
        if (scene_->facets.empty() || !los_blocked(*scene_, tx_, rx)) {
            detail::PathGeometry g;
            g.kind = PathKind::LoS;
            g.length = distance(tx_, rx);
            g.points = {tx_, rx};
            geoms.push_back(std::move(g));
        }
        // Specular, walking the image tree
        for (std::size_t node = 0; node < nodes_.size(); ++node)
            if (auto g = validate_node(node, rx))
                geoms.push_back(std::move(*g));
        return geoms;
    }

    /// Evaluate per-path complex gain at frequency f and assemble paths.
    std::vector<Path> evaluate(const std::vector<detail::PathGeometry> &geoms,
                               const TraceConfig &cfg) const
    {
        const double f = cfg.frequency;
        const double lambda = kSpeedOfLight / f;
        std::vector<Path> paths;
        paths.reserve(geoms.size());
        for (const auto &g : geoms) {
            Path p;
            p.kind = g.kind;
            p.length = g.length;
            p.delay = g.length / kSpeedOfLight;
            p.interactions = g.facets;
            p.aod = azel_of(normalized(g.points[1] - g.points[0]));
            p.aoa = azel_of(normalized(g.points[g.points.size() - 2] - g.points.back()));
            cplx amp;
            if (g.kind == PathKind::Diffuse) {
                // Lambertian single-bounce patch contribution.
                const double r_i = distance(g.points[0], g.points[1]);
                const double r_s = distance(g.points[1], g.points[2]);
                const double alpha = cfg.diffuse_lambert_exponent;
                const double lobe = (alpha + 1.0) / (2.0 * kPi);
                amp = (lambda / (4.0 * kPi)) *
                      std::sqrt(g.diffuse_patch_term * lobe / (r_i * r_i * r_s * r_s));
            } else {
                amp = lambda / (4.0 * kPi * g.length);
                for (std::size_t i = 0; i < g.facets.size(); ++i) {
                    const Material &mat = scene_->material_of(g.facets[i]);
                    const cplx eps = complex_permittivity(mat, f);
                    const double theta = std::acos(std::clamp(g.cos_incidence[i], 0.0, 1.0));
                    const cplx gamma_te = fresnel_reflection(eps, theta, Polarization::TE);
                    const cplx gamma_tm = fresnel_reflection(eps, theta, Polarization::TM);
                    cplx gamma = g.te_weight[i] * gamma_te + (1.0 - g.te_weight[i]) * gamma_tm;
                    if (cfg.enable_diffuse && mat.scattering > 0.0) {
                        // Rough-surface attenuation of the specular term; roughness
                        // chosen so the normal-incidence power loss equals S^2.
                        const double k0 = 2.0 * kPi / lambda;
                        const double s2 = std::min(mat.scattering * mat.scattering, 1.0 - 1e-12);
                        const double sigma_h = std::sqrt(-std::log(1.0 - s2)) / (2.0 * k0);
                        const double kc = k0 * sigma_h * g.cos_incidence[i];
                        gamma *= std::exp(-2.0 * kc * kc);
                    }
                    amp *= gamma;
                }
            }
            const double phase = -2.0 * kPi * f * g.length / kSpeedOfLight;
            p.gain = amp * std::polar(1.0, phase);
            if (std::norm(p.gain) > 0.0 && std::isfinite(std::norm(p.gain)))
                paths.push_back(std::move(p));
        }
        return paths;
    }

    std::vector<Path> trace(const Vec3 &rx, const TraceConfig &cfg) const
    {
        auto geoms = trace_geometry(rx);
        if (cfg.enable_diffuse)
            append_diffuse_geometry(rx, cfg, geoms);
        auto paths = evaluate(geoms, cfg);
        if (paths.empty())
            return paths;
        paths = dynamic_range_filter(std::move(paths), cfg.dynamic_range_db);
        std::sort(paths.begin(), paths.end(), [](const Path &a, const Path &b) {
            if (a.delay != b.delay)
                return a.delay < b.delay;
            if (a.order() != b.order())
                return a.order() < b.order();
            return a.interactions < b.interactions;
        });
        return paths;
    }

  private:
    struct Node {
        int plane = -1;
        int parent = -1; // index into nodes_, -1 for first-order
        int depth = 1;
        Vec3 image; // tx mirrored through the plane chain
    };

    void build_tree()
    {
        nodes_.clear();
        if (max_order_ == 0)
            return;
        const auto &planes = scene_->planes();
        // breadth-first: deterministic order by (depth, plane chain)
        std::vector<std::size_t> frontier;
        for (std::size_t pi = 0; pi < planes.size(); ++pi) {
            if (detail::signed_distance(planes[pi], tx_) <= 0.0)
                continue; // tx behind or on the reflector
            nodes_.push_back({static_cast<int>(pi), -1, 1, detail::mirror(planes[pi], tx_)});
            frontier.push_back(nodes_.size() - 1);
        }
        for (int depth = 2; depth <= max_order_; ++depth) {
            std::vector<std::size_t> next;
            for (std::size_t ni : frontier) {
                const Node parent = nodes_[ni];
                for (std::size_t pi = 0; pi < planes.size(); ++pi) {
                    if (static_cast<int>(pi) == parent.plane)
                        continue; // no consecutive identical reflector
                    if (detail::signed_distance(planes[pi], parent.image) <= 0.0)
                        continue; // previous image not in front of this plane
                    nodes_.push_back({static_cast<int>(pi), static_cast<int>(ni), depth,
                                      detail::mirror(planes[pi], parent.image)});
                    next.push_back(nodes_.size() - 1);
                }
            }
            frontier = std::move(next);
        }
    }

    std::optional<detail::PathGeometry> validate_node(std::size_t node_idx, const Vec3 &rx) const
    {
        const auto &planes = scene_->planes();
        const Node &leaf = nodes_[node_idx];
        const int k = leaf.depth;

        // Backward pass: from rx toward the mirrored images, pinning each
        // reflection point onto its reflector.
        std::vector<Vec3> pts(static_cast<std::size_t>(k) + 2);
        std::vector<int> plane_seq(static_cast<std::size_t>(k));
        std::vector<int> facet_seq(static_cast<std::size_t>(k));
        pts.back() = rx;
        int ni = static_cast<int>(node_idx);
        Vec3 q = rx;
        for (int j = k; j >= 1; --j) {
            const Node &n = nodes_[static_cast<std::size_t>(ni)];
            const PlaneGroup &g = planes[static_cast<std::size_t>(n.plane)];
            const double dq = detail::signed_distance(g, q);
            const double di = detail::signed_distance(g, n.image);
            if (dq <= 0.0 || di >= 0.0)
                return std::nullopt; // q must face the front, image the back
            const double t = dq / (dq - di);
            const Vec3 hit = q + (n.image - q) * t;
            const int fid = detail::facet_containing(*scene_, g, hit);
            if (fid < 0)
                return std::nullopt;
            plane_seq[static_cast<std::size_t>(j - 1)] = n.plane;
            facet_seq[static_cast<std::size_t>(j - 1)] = fid;
            pts[static_cast<std::size_t>(j)] = hit;
            q = hit;
            ni = n.parent;
        }
        pts.front() = tx_;

        // Obstruction along every hop, skipping the facets the endpoints sit on.
        for (int j = 0; j <= k; ++j) {
            const int skip_a = j > 0 ? facet_seq[static_cast<std::size_t>(j - 1)] : -1;
            const int skip_b = j < k ? facet_seq[static_cast<std::size_t>(j)] : -1;
            if (detail::segment_blocked(*scene_, pts[static_cast<std::size_t>(j)],
                                        pts[static_cast<std::size_t>(j + 1)], skip_a, skip_b))
                return std::nullopt;
        }

        detail::PathGeometry geo;
        geo.kind = PathKind::Specular;
        geo.length = distance(nodes_[node_idx].image, rx); // unfolded distance
        geo.points = std::move(pts);
        geo.facets = std::move(facet_seq);
        geo.cos_incidence.resize(static_cast<std::size_t>(k));
        geo.te_weight.resize(static_cast<std::size_t>(k));
        for (int j = 1; j <= k; ++j) {
            const Vec3 dir = normalized(geo.points[static_cast<std::size_t>(j)] -
                                        geo.points[static_cast<std::size_t>(j - 1)]);
            const Vec3 n = planes[static_cast<std::size_t>(plane_seq[static_cast<std::size_t>(j - 1)])].normal;
            geo.cos_incidence[static_cast<std::size_t>(j - 1)] = std::min(1.0, -dot(dir, n));
            // Vertical launch decomposed into TE/TM about the incidence plane.
            const Vec3 te_axis = cross(dir, n);
            const double te_len = norm(te_axis);
            double w_te = 0.5; // normal incidence: decomposition degenerate, split is moot
            if (te_len > 1e-9) {
                const Vec3 te = te_axis / te_len;
                const double c = dot(vertical_pol_vector(dir), te);
                w_te = std::clamp(c * c, 0.0, 1.0);
            }
            geo.te_weight[static_cast<std::size_t>(j - 1)] = w_te;
        }
        return geo;
    }

    /// Single-bounce diffuse contributions from deterministic facet samples.
    void append_diffuse_geometry(const Vec3 &rx, const TraceConfig &cfg,
                                 std::vector<detail::PathGeometry> &out) const
    {
        const int samples = std::max(1, cfg.diffuse_samples_per_facet);
        for (std::size_t fi = 0; fi < scene_->facets.size(); ++fi) {
            const Facet &f = scene_->facets[fi];
            const Material &mat = scene_->materials[static_cast<std::size_t>(f.material_id)];
            if (mat.scattering <= 0.0)
                continue;
            const double area = f.area();
            const double patch_area = area / samples;
            for (int s = 0; s < samples; ++s) {
                Rng rng(derive_seed(cfg.seed, {0x5cA77E2ULL, fi, static_cast<std::uint64_t>(s)}));
                double u = rng.uniform01(), v = rng.uniform01();
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                const Vec3 p = f.v0 + (f.v1 - f.v0) * u + (f.v2 - f.v0) * v;
                const Vec3 to_p = p - tx_;
                const Vec3 to_rx = rx - p;
                const double r_i = norm(to_p), r_s = norm(to_rx);
                if (r_i < kSurfaceOffset || r_s < kSurfaceOffset)
                    continue;
                const double cos_i = -dot(to_p, f.normal) / r_i;
                const double cos_s = dot(to_rx, f.normal) / r_s;
                if (cos_i <= 1e-9 || cos_s <= 1e-9)
                    continue; // facet not illuminated from both sides
                const int fid = static_cast<int>(fi);
                if (detail::segment_blocked(*scene_, tx_, p, -1, fid) ||
                    detail::segment_blocked(*scene_, p, rx, fid, -1))
                    continue;
                detail::PathGeometry g;
                g.kind = PathKind::Diffuse;
                g.length = r_i + r_s;
                g.points = {tx_, p, rx};
                g.facets = {fid};
                g.cos_incidence = {cos_i};
                g.te_weight = {0.5};
                const double alpha = cfg.diffuse_lambert_exponent;
                g.diffuse_patch_term = mat.scattering * mat.scattering * patch_area * cos_i *
                                       std::pow(cos_s, alpha);
                out.push_back(std::move(g));
            }
        }
    }

    const Scene *scene_;
    Vec3 tx_;
    int max_order_;
    std::vector<Node> nodes_;
};

/// One-shot trace. For sweeps over many receivers or frequencies, construct
/// an ImageTracer once instead.
inline std::vector<Path> trace(const Scene &scene, const Vec3 &tx, const Vec3 &rx,
                               const TraceConfig &cfg)
{
    return ImageTracer(scene, tx, cfg.max_reflection_order).trace(rx, cfg);
}

} // namespace raychan
