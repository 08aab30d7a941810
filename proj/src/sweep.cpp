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

#include "losray/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace losray {

namespace {

// Oriented sweep segment: the CCW angular span runs from angle(a) to
// angle(b) about tx, always narrower than pi.
struct SweepSegment {
    Vec2 a;
    Vec2 b;
    double angle_a = 0.0;
    double angle_b = 0.0;
    bool grid_boundary = false;
};

struct SweepState {
    Vec2 tx;
    Vec2 dir; // current sweep ray direction (unit)
    const std::vector<SweepSegment> *segments = nullptr;

    /// Intersection distance of segment s with the current ray.
    double hit_distance(const SweepSegment &s) const
    {
        const Vec2 e = s.b - s.a;
        const double denom = cross2(dir, e);
        if (std::abs(denom) < 1e-300)
            return std::min((s.a - tx).norm(), (s.b - tx).norm());
        return cross2(s.a - tx, e) / denom;
    }
};

// Orders active segments by distance along the current sweep ray. Two
// non-crossing segments keep a fixed relative order while both are active,
// so lazily evaluated comparisons stay consistent. Ties (shared point on the
// ray) are broken by which segment stays nearer just after the current
// angle; the derivative of the hit distance with respect to the sweep angle
// is r0 * dot(d, u :) / cross(d, u) for a segment leaving the common point in
// direction u.
struct ActiveCmp {
    const SweepState *state;

    bool operator()(int lhs, int rhs) const
    {
        if (lhs == rhs)
            return false;
        const SweepSegment &s1 = (*state->segments)[lhs];
        const SweepSegment &s2 = (*state->segments)[rhs];
        const double t1 = state->hit_distance(s1);
        const double t2 = state->hit_distance(s2);
        const double tol = 1e-9 * std::max({1.0, t1, t2});
        if (std::abs(t1 - t2) > tol)
            return t1 < t2;

        const Vec2 x = state->tx + 0.5 * (t1 + t2) * state->dir;
        const double g1 = future_slope(s1, x);
        const double g2 = future_slope(s2, x);
        if (std::abs(g1 - g2) > 1e-12 * std::max({1.0, std::abs(g1), std::abs(g2)}))
            return g1 < g2;
        return lhs < rhs;
    }

    double future_slope(const SweepSegment &s, const Vec2 &x) const
    {
        // Endpoint on the CCW (future) side of the current ray.
        const Vec2 &f = cross2(state->dir, s.b - state->tx) > 0.0 ? s.b : s.a;
        const Vec2 u = f - x;
        const double cr = cross2(state->dir, u);
        if (cr <= 1e-300)
            return std::numeric_limits<double>::infinity();
        return state->dir.dot(u) / cr;
    }
};

struct SweepEvent {
    double angle;
    int type; // 0 = end, 1 = start
    int seg;
    double vertex_dist;

    bool operator<(const SweepEvent &o) const
    {
        if (angle != o.angle)
            return angle < o.angle;
        if (type != o.type)
            return type < o.type;
        if (vertex_dist != o.vertex_dist)
            return vertex_dist < o.vertex_dist;
        return seg < o.seg;
    }
};

std::vector<SweepSegment> build_sweep_segments(const Vec2 &tx, const SceneModel &scene)
{
    std::vector<SweepSegment> segs;
    segs.reserve(scene.edges.size() + 4);

    auto add = [&](Vec2 a, Vec2 b, bool boundary) {
        const Vec2 va = a - tx;
        const Vec2 vb = b - tx;
        const double c = cross2(va, vb);
        if (std::abs(c) <= kEpsGeo * std::max(1.0, va.norm() * vb.norm()))
            return; // radially collinear, zero angular extent
        SweepSegment s;
        if (c > 0.0) {
            s.a = a;
            s.b = b;
        } else {
            s.a = b;
            s.b = a;
        }
        s.angle_a = angle_of(s.a - tx);
        s.angle_b = angle_of(s.b - tx);
        s.grid_boundary = boundary;
        segs.push_back(s);
    };

    for (const Edge &e : scene.edges)
        add(e.a, e.b, false);

    // Virtual enclosure: inflated grid rectangle so that every sweep
    // direction terminates on some segment, even for tx on the grid edge.
    const double m = 2.0 * std::max(scene.resolution, 1.0);
    const double w = scene.width_m(), h = scene.height_m();
    const Vec2 c0(-m, -m), c1(w + m, -m), c2(w + m, h + m), c3(-m, h + m);
    add(c0, c1, true);
    add(c1, c2, true);
    add(c2, c3, true);
    add(c3, c0, true);
    return segs;
}

} // namespace

VisibilityPolygon sweep_visibility_polygon(const Vec2 &tx, const SceneModel &scene)
{
    if (scene.building_containing(tx) >= 0)
        throw GeometryError("transmitter lies inside a building footprint");

    VisibilityPolygon poly;
    poly.tx = tx;

    const std::vector<SweepSegment> segs = build_sweep_segments(tx, scene);
    std::vector<SweepEvent> events;
    events.reserve(2 * segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const SweepSegment &s = segs[i];
        events.push_back({s.angle_a, 1, static_cast<int>(i), (s.a - tx).norm()});
        events.push_back({s.angle_b, 0, static_cast<int>(i), (s.b - tx).norm()});
    }
    std::sort(events.begin(), events.end());

    SweepState state{tx, Vec2(1.0, 0.0), &segs};
    ActiveCmp cmp{&state};
    std::multiset<int, ActiveCmp> active(cmp);
    std::vector<std::multiset<int, ActiveCmp>::iterator> handles(segs.size());
    std::vector<char> in_set(segs.size(), 0);

    // Segments whose span wraps across angle 0 are active at the start.
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const SweepSegment &s = segs[i];
        if (s.angle_a > s.angle_b && s.angle_b > 0.0) {
            handles[i] = active.insert(static_cast<int>(i));
            in_set[i] = 1;
        }
    }

    int last_nearest = -1;
    auto record_piece = [&](double angle) {
        if (active.empty())
            return; // cannot happen: the enclosure spans all angles
        const int nearest = *active.begin();
        if (nearest == last_nearest && !poly.pieces.empty())
            return; // unchanged occluder, previous piece extends
        const SweepSegment &near = segs[nearest];
        poly.pieces.push_back({angle, near.a, near.b, near.grid_boundary});
        last_nearest = nearest;
    };

    record_piece(0.0);

    std::size_t i = 0;
    while (i < events.size()) {
        const double angle = events[i].angle;
        state.dir = Vec2(std::cos(angle), std::sin(angle));
        while (i < events.size() && events[i].angle == angle) {
            const SweepEvent &ev = events[i];
            if (ev.type == 0) {
                if (in_set[ev.seg]) {
                    active.erase(handles[ev.seg]);
                    in_set[ev.seg] = 0;
                }
            } else {
                handles[ev.seg] = active.insert(ev.seg);
                in_set[ev.seg] = 1;
            }
            ++i;
        }
        record_piece(angle);
    }
    return poly;
}

double VisibilityPolygon::occluder_distance(double angle) const
{
    if (pieces.empty())
        return std::numeric_limits<double>::infinity();
    // Last piece with start angle <= angle (pieces[0].angle == 0).
    auto it = std::upper_bound(pieces.begin(), pieces.end(), angle,
                               [](double a, const Piece &p) { return a < p.angle; });
    const Piece &p = (it == pieces.begin()) ? pieces.back() : *(it - 1);
    if (p.grid_boundary)
        return std::numeric_limits<double>::infinity();
    const Vec2 dir(std::cos(angle), std::sin(angle));
    const Vec2 e = p.b - p.a;
    const double denom = cross2(dir, e);
    if (std::abs(denom) < 1e-300)
        return std::min((p.a - tx).norm(), (p.b - tx).norm());
    return cross2(p.a - tx, e) / denom;
}

bool VisibilityPolygon::contains(const Vec2 &p) const
{
    const Vec2 d = p - tx;
    const double len = d.norm();
    if (len <= kEpsGeo)
        return true; // self-visibility
    const double r = occluder_distance(angle_of(d));
    return len <= r * (1.0 + 1e-12) + kEpsGeo;
}

VertexAttributes exact_vertex_attributes(const Vec2 &tx, const SceneModel &scene)
{
    if (scene.building_containing(tx) >= 0)
        throw GeometryError("transmitter lies inside a building footprint");

    VertexAttributes attrs;
    attrs.tx = tx;
    attrs.records.resize(scene.vertices.size());
    for (std::size_t i = 0; i < scene.vertices.size(); ++i) {
        const SceneVertex &v = scene.vertices[i];
        VertexAttributeRecord &rec = attrs.records[i];
        rec.vertex_id = static_cast<int>(i);
        rec.position = v.position;
        rec.visible = !segment_hits_building(tx, v.position, scene);
        rec.projection = v.position;
        rec.open_boundary = false;
        if (!rec.visible)
            continue;
        const std::unordered_set<int> ignore{v.edge_prev, v.edge_next};
        if (auto hit = ray_first_edge_hit(tx, v.position, scene, 1.0, ignore)) {
            rec.projection = hit->point;
        } else {
            const Vec2 d = v.position - tx;
            if (auto t_exit = ray_rectangle_exit(tx, d, scene.width_m(), scene.height_m())) {
                rec.projection = tx + std::max(*t_exit, 1.0) * d;
                rec.open_boundary = true;
            }
        }
    }
    return attrs;
}

LosMap exact_los_map(const Vec2 &tx, const SceneModel &scene)
{
    const VisibilityPolygon poly = sweep_visibility_polygon(tx, scene);
    LosMap map;
    map.tx = tx;
    map.grid.resize(scene.grid_height, scene.grid_width);
    for (int row = 0; row < scene.grid_height; ++row) {
        for (int col = 0; col < scene.grid_width; ++col) {
            const Vec2 c((col + 0.5) * scene.resolution, (row + 0.5) * scene.resolution);
            map.grid(row, col) = (!scene.pixel_in_any_footprint(c) && poly.contains(c)) ? 1 : 0;
        }
    }
    return map;
}

VisibilityAdjacency vertex_adjacency(const SceneModel &scene)
{
    const std::size_t n = scene.vertices.size();
    VisibilityAdjacency adj(n);
    parallel_for(n, [&](std::size_t u) {
        const SceneVertex &vu = scene.vertices[u];
        for (std::size_t v = u + 1; v < n; ++v) {
            const SceneVertex &vv = scene.vertices[v];
            if ((vu.position - vv.position).norm() <= kEpsGeo)
                continue; // irreflexive on coincident points
            const std::unordered_set<int> ignore{vu.edge_prev, vu.edge_next, vv.edge_prev, vv.edge_next};
            if (!segment_hits_building(vu.position, vv.position, scene, ignore))
                adj.set(u, v, true);
        }
    });
    return adj;
}

void write_vertex_attributes(std::ostream &os, const VertexAttributes &attrs)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "tx %.17g %.17g\n", attrs.tx.x(), attrs.tx.y());
    os << buf;
    for (const VertexAttributeRecord &r : attrs.records) {
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %d %.17g %.17g %d\n", r.vertex_id, r.position.x(),
                      r.position.y(), r.visible ? 1 : 0, r.projection.x(), r.projection.y(),
                      r.open_boundary ? 1 : 0);
        os << buf;
    }
}

void save_vertex_attributes(const std::string &path, const VertexAttributes &attrs)
{
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    write_vertex_attributes(os, attrs);
}

} // namespace losray
