// SPDX-License-Identifier: Apache-2.0
//
// losray - deterministic 2.5D radio-channel ray tracing engine
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

#include "losray/types.hpp"

#include <algorithm>
#include <optional>

namespace losray {

/// Signed area of a simple polygon (positive for counter-clockwise order).
inline double polygon_signed_area(const std::vector<Vec2> &poly)
{
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 &p = poly[i];
        const Vec2 &q = poly[(i + 1) % n];
        s += cross2(p, q);
    }
    return 0.5 * s;
}

/// Shortest distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0)
        return (p - a).norm();
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

/// Crossing-parity point-in-polygon test. Points exactly on the boundary are
/// resolved by the half-open edge convention; use point_in_polygon_strict when
/// boundary points must count as outside.
inline bool point_in_polygon(const Vec2 &p, const std::vector<Vec2> &poly)
{
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

/// True only when p lies in the open interior: boundary points (within
/// kEpsGeo of any edge) report false.
inline bool point_in_polygon_strict(const Vec2 &p, const std::vector<Vec2> &poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= kEpsGeo)
            return false;
    }
    return point_in_polygon(p, poly);
}

/// Intersection of the open segment (p, q) with the closed segment [a, b].
/// Grazing contacts at the endpoints of [a, b] count as hits; contacts at the
/// endpoints of (p, q) do not. Collinear overlap of positive length counts as
/// a hit. Returns the parameter t along p->q when hit.
inline bool open_segment_hits_closed(const Vec2 &p, const Vec2 &q, const Vec2 &a, const Vec2 &b,
                                     double *t_hit = nullptr)
{
    const Vec2 d = q - p;
    const Vec2 e = b - a;
    const double denom = cross2(d, e);
    const double len_d = d.norm();
    const double len_e = e.norm();
    const double scale = len_d * len_e;
    if (std::abs(denom) <= kEpsGeo * std::max(1.0, scale)) {
        // Parallel. Blocks only when collinear and overlapping over a
        // positive length (conservative grazing convention).
        if (std::abs(cross2(a - p, d)) > kEpsGeo * std::max(1.0, len_d * (a - p).norm()))
            return false;
        if (len_d <= kEpsGeo)
            return false;
        const double inv = 1.0 / d.squaredNorm();
        double ta = (a - p).dot(d) * inv;
        double tb = (b - p).dot(d) * inv;
        if (ta > tb)
            std::swap(ta, tb);
        const double lo = std::max(ta, 0.0);
        const double hi = std::min(tb, 1.0);
        const double rel = kEpsGeo / std::max(len_d, kEpsGeo);
        if (hi - lo > rel) {
            if (t_hit)
                *t_hit = std::max(lo, rel);
            return true;
        }
        return false;
    }
    const Vec2 ap = a - p;
    const double t = cross2(ap, e) / denom;
    const double s = cross2(ap, d) / denom;
    // Relative tolerances: t strictly inside (0,1), s within closed [0,1].
    const double tol_t = kEpsGeo / std::max(len_d, kEpsGeo);
    const double tol_s = kEpsGeo / std::max(len_e, kEpsGeo);
    if (t > tol_t && t < 1.0 - tol_t && s >= -tol_s && s <= 1.0 + tol_s) {
        if (t_hit)
            *t_hit = t;
        return true;
    }
    return false;
}

/// Intersection of the ray origin + t*dir (t > 0) with the closed segment
/// [a, b]. Edges parallel to the ray never intersect. Returns (t, s) with s
/// the parameter along the segment.
inline bool ray_hits_segment(const Vec2 &origin, const Vec2 &dir, const Vec2 &a, const Vec2 &b,
                             double *t_out, double *s_out = nullptr)
{
    const Vec2 e = b - a;
    const double denom = cross2(dir, e);
    if (std::abs(denom) <= kEpsGeo * std::max(1.0, dir.norm() * e.norm()))
        return false;
    const Vec2 ao = a - origin;
    const double t = cross2(ao, e) / denom;
    const double s = cross2(ao, dir) / denom;
    const double tol_s = kEpsGeo / std::max(e.norm(), kEpsGeo);
    if (s < -tol_s || s > 1.0 + tol_s)
        return false;
    if (t_out)
        *t_out = t;
    if (s_out)
        *s_out = s;
    return true;
}

/// Largest parameter t >= 0 at which origin + t*dir is still inside the
/// rectangle [0,w] x [0,h]; empty when the ray never enters it.
inline std::optional<double> ray_rectangle_exit(const Vec2 &origin, const Vec2 &dir, double w, double h)
{
    double t_lo = 0.0;
    double t_hi = std::numeric_limits<double>::infinity();
    const double o[2] = {origin.x(), origin.y()};
    const double d[2] = {dir.x(), dir.y()};
    const double box[2] = {w, h};
    for (int k = 0; k < 2; ++k) {
        if (std::abs(d[k]) < 1e-300) {
            if (o[k] < 0.0 || o[k] > box[k])
                return std::nullopt;
            continue;
        }
        double t0 = (0.0 - o[k]) / d[k];
        double t1 = (box[k] - o[k]) / d[k];
        if (t0 > t1)
            std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
    }
    if (t_hi < t_lo)
        return std::nullopt;
    return t_hi;
}

/// Mirror of point p across the infinite line through (a, b).
inline Vec2 mirror_point(const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
    const Vec2 e = (b - a).normalized();
    const Vec2 ap = p - a;
    const Vec2 foot = a + ap.dot(e) * e;
    return 2.0 * foot - p;
}

} // namespace losray
