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

#include "losray/refine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace losray {

VertexAttributes load_predictions(const std::string &path, const SceneModel &scene)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open prediction file: " + path);
    std::string tag;
    VertexAttributes attrs;
    if (!(is >> tag >> attrs.tx.x() >> attrs.tx.y()) || tag != "tx")
        throw ParseError("prediction file must start with 'tx x y': " + path);

    const std::size_t n = scene.vertex_count();
    attrs.records.assign(n, VertexAttributeRecord{});
    std::vector<char> seen(n, 0);

    VertexAttributeRecord rec;
    int visible = 0, open = 0;
    std::size_t count = 0;
    while (is >> rec.vertex_id >> rec.position.x() >> rec.position.y() >> visible >> rec.projection.x() >>
           rec.projection.y() >> open) {
        if (rec.vertex_id < 0 || rec.vertex_id >= static_cast<int>(n))
            throw ParseError("prediction file: vertex id out of range");
        if (seen[rec.vertex_id])
            throw ParseError("prediction file: duplicate vertex id " + std::to_string(rec.vertex_id));
        const double w = scene.width_m(), h = scene.height_m();
        auto inside = [&](const Vec2 &p) {
            return p.x() >= -kEpsGeo && p.x() <= w + kEpsGeo && p.y() >= -kEpsGeo && p.y() <= h + kEpsGeo;
        };
        if (!inside(rec.position) || !inside(rec.projection))
            throw ParseError("prediction file: coordinates outside grid extent");
        rec.visible = visible != 0;
        rec.open_boundary = open != 0;
        seen[rec.vertex_id] = 1;
        attrs.records[rec.vertex_id] = rec;
        ++count;
    }
    if (count != n)
        throw ParseError("prediction file lists " + std::to_string(count) + " vertices, scene has " +
                         std::to_string(n));
    return attrs;
}

VertexAttributes perturb_attributes(const VertexAttributes &attrs, double noise_radius, double flip_rate,
                                    std::uint64_t rng_seed)
{
    if (noise_radius < 0.0 || flip_rate < 0.0 || flip_rate > 1.0)
        throw ConfigError("perturb_attributes: invalid noise parameters");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    VertexAttributes out;
    out.tx = attrs.tx;
    out.records.reserve(attrs.records.size());
    for (const VertexAttributeRecord &r : attrs.records) {
        VertexAttributeRecord p = r;
        if (flip_rate > 0.0 && uni(rng) < flip_rate)
            p.visible = !p.visible;
        if (!p.visible) {
            p.projection = p.position;
            p.open_boundary = false;
        } else {
            // Flipped-to-visible vertices have no stored projection; start
            // from the vertex itself. Open-boundary flags of surviving
            // records are untouched: the perturbation models coordinate
            // regression error only.
            Vec2 base = r.projection;
            if (!r.visible) {
                base = p.position;
                p.open_boundary = false;
            }
            if (noise_radius > 0.0) {
                const double rad = noise_radius * std::sqrt(uni(rng));
                const double ang = kTwoPi * uni(rng);
                base += rad * Vec2(std::cos(ang), std::sin(ang));
            }
            p.projection = base;
        }
        out.records.push_back(p);
    }
    return out;
}

namespace {

/// Side classification of a point about the anchor sight ray.
int ray_side(const Vec2 &tx, const Vec2 &dir, const Vec2 &p)
{
    const double c = cross2(dir, p - tx);
    if (std::abs(c) <= kEpsGeo * std::max(1.0, dir.norm() * (p - tx).norm()))
        return 0;
    return c > 0.0 ? 1 : -1;
}

/// Exact ray re-cast used both for clearance-repair and as a final
/// projection fallback.
void recast_projection(const Vec2 &tx, const SceneVertex &v, const SceneModel &scene, Vec2 &term,
                       bool &open)
{
    const std::unordered_set<int> ignore{v.edge_prev, v.edge_next};
    if (auto hit = ray_first_edge_hit(tx, v.position, scene, 1.0, ignore)) {
        term = hit->point;
        open = false;
        return;
    }
    const Vec2 d = v.position - tx;
    if (auto t_exit = ray_rectangle_exit(tx, d, scene.width_m(), scene.height_m())) {
        term = tx + std::max(*t_exit, 1.0) * d;
        open = true;
    } else {
        term = v.position;
        open = false;
    }
}

} // namespace

LosBoundary snap_and_refine(const VertexAttributes &attrs, const SceneModel &scene, double search_radius)
{
    const Vec2 tx = attrs.tx;
    if (scene.building_containing(tx) >= 0)
        throw GeometryError("transmitter lies inside a building footprint");

    LosBoundary boundary;
    boundary.tx = tx;

    std::vector<int> disk_candidates;
    for (const VertexAttributeRecord &rec : attrs.records) {
        if (!rec.visible)
            continue;
        if (rec.vertex_id < 0 || rec.vertex_id >= static_cast<int>(scene.vertex_count()))
            continue;
        const SceneVertex &v = scene.vertices[rec.vertex_id];
        const Vec2 d = v.position - tx;
        if (d.norm() <= kEpsGeo)
            continue;

        // Silhouette classification from the incident edges: a vertex only
        // terminates a boundary jump when the footprint lies entirely on one
        // side of the sight ray. Straddling vertices are bends: the boundary
        // passes through them without a radial discontinuity.
        const Vec2 prev_other = scene.edges[v.edge_prev].a;
        const Vec2 next_other = scene.edges[v.edge_next].b;
        const int s1 = ray_side(tx, d, prev_other);
        const int s2 = ray_side(tx, d, next_other);

        BoundarySegment seg;
        seg.vertex_id = rec.vertex_id;
        seg.anchor = v.position;
        seg.angle = angle_of(d);

        if (s1 == 0 && s2 == 0)
            continue;
        if (s1 * s2 < 0) {
            seg.kind = BoundaryKind::bend;
            seg.terminator = v.position;
            boundary.segments.push_back(seg);
            continue;
        }
        seg.kind = (s1 + s2 > 0) ? BoundaryKind::descending : BoundaryKind::ascending;

        // Step 1: nearest candidate edge around the predicted projection.
        Vec2 term = rec.projection;
        bool open = rec.open_boundary;
        int term_edge = -1;
        if (search_radius > 0.0 && !scene.edges.empty()) {
            scene.edge_index.collect_disk(rec.projection, search_radius, disk_candidates);
            int best = -1;
            double best_dist = search_radius;
            for (int id : disk_candidates) {
                if (id == v.edge_prev || id == v.edge_next)
                    continue;
                const Edge &e = scene.edges[id];
                const double dist = point_segment_distance(rec.projection, e.a, e.b);
                if (dist < best_dist || (dist == best_dist && best >= 0 && id < best)) {
                    best_dist = dist;
                    best = id;
                }
            }
            // Step 2: ray-edge intersection on the snapped edge.
            if (best >= 0) {
                const Edge &e = scene.edges[best];
                const Vec2 ba = e.b - e.a;
                const double denom = cross2(d, ba);
                if (std::abs(denom) > kEpsGeo * std::max(1.0, d.norm() * ba.norm())) {
                    const double t_star = cross2(e.a - tx, ba) / denom;
                    if (t_star > 1.0 + kEpsGeo / d.norm()) {
                        const Vec2 x = tx + t_star * d;
                        const double s = (x - e.a).dot(ba) / ba.squaredNorm();
                        const double tol_s = kEpsGeo / std::max(ba.norm(), kEpsGeo);
                        if (s >= -tol_s && s <= 1.0 + tol_s) {
                            term = x;
                            term_edge = best;
                            open = false;
                        }
                    }
                }
            }
        }

        // Global clearance check; on failure re-cast the exact ray.
        std::unordered_set<int> ignore{v.edge_prev, v.edge_next};
        if (term_edge >= 0)
            ignore.insert(term_edge);
        if ((term - v.position).norm() > kEpsGeo &&
            segment_hits_building(v.position, term, scene, ignore)) {
            recast_projection(tx, v, scene, term, open);
        }

        seg.terminator = term;
        seg.open_boundary = open;
        // V_bnd requires a terminator distinct from (and farther than) the
        // anchor; anything else cannot express a jump.
        if ((seg.terminator - seg.anchor).norm() <= kEpsGeo)
            continue;
        if ((seg.terminator - tx).norm() <= (seg.anchor - tx).norm())
            continue;
        boundary.segments.push_back(seg);
    }

    std::sort(boundary.segments.begin(), boundary.segments.end(),
              [&tx](const BoundarySegment &a, const BoundarySegment &b) {
                  if (a.angle != b.angle)
                      return a.angle < b.angle;
                  const double da = (a.anchor - tx).squaredNorm();
                  const double db = (b.anchor - tx).squaredNorm();
                  if (da != db)
                      return da < db;
                  return a.vertex_id < b.vertex_id;
              });
    for (const BoundarySegment &s : boundary.segments)
        if (s.kind != BoundaryKind::bend)
            ++boundary.boundary_vertex_count;
    return boundary;
}

LosMap rasterize_boundary(const LosBoundary &boundary, const SceneModel &scene)
{
    const Vec2 tx = boundary.tx;
    LosMap map;
    map.tx = tx;
    map.grid.resize(scene.grid_height, scene.grid_width);

    // Occluder pieces between consecutive boundary vertices: the chord from
    // the post-jump point of segment i to the pre-jump point of segment i+1.
    // Sectors whose chord endpoints both sit on the grid boundary are open.
    struct SectorPiece {
        double angle;
        Vec2 a, b;
        bool open;
    };
    const std::size_t n = boundary.segments.size();
    std::vector<SectorPiece> pieces;
    pieces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BoundarySegment &cur = boundary.segments[i];
        const BoundarySegment &nxt = boundary.segments[(i + 1) % n];
        SectorPiece p;
        p.angle = cur.angle;
        bool a_open = false, b_open = false;
        switch (cur.kind) {
        case BoundaryKind::ascending:
            p.a = cur.terminator;
            a_open = cur.open_boundary;
            break;
        case BoundaryKind::descending:
        case BoundaryKind::bend:
            p.a = cur.anchor;
            break;
        }
        switch (nxt.kind) {
        case BoundaryKind::descending:
            p.b = nxt.terminator;
            b_open = nxt.open_boundary;
            break;
        case BoundaryKind::ascending:
        case BoundaryKind::bend:
            p.b = nxt.anchor;
            break;
        }
        p.open = a_open && b_open;
        pieces.push_back(p);
    }

    auto occluder_dist = [&](double angle) -> double {
        if (pieces.empty())
            return std::numeric_limits<double>::infinity();
        auto it = std::upper_bound(pieces.begin(), pieces.end(), angle,
                                   [](double a, const SectorPiece &s) { return a < s.angle; });
        const SectorPiece &p = (it == pieces.begin()) ? pieces.back() : *(it - 1);
        if (p.open)
            return std::numeric_limits<double>::infinity();
        const Vec2 dir(std::cos(angle), std::sin(angle));
        const Vec2 e = p.b - p.a;
        const double denom = cross2(dir, e);
        if (std::abs(denom) >= kEpsGeo * std::max(1.0, e.norm())) {
            const double t = cross2(p.a - tx, e) / denom;
            const double s = cross2(p.a - tx, dir) / denom;
            if (s >= 0.0 && s <= 1.0 && t > 0.0)
                return t;
        }
        // Malformed sector (noisy boundaries): fall back to the nearer
        // chord endpoint, which keeps the raster deterministic.
        return std::min((p.a - tx).norm(), (p.b - tx).norm());
    };

    for (int row = 0; row < scene.grid_height; ++row) {
        for (int col = 0; col < scene.grid_width; ++col) {
            const Vec2 c((col + 0.5) * scene.resolution, (row + 0.5) * scene.resolution);
            if (scene.pixel_in_any_footprint(c)) {
                map.grid(row, col) = 0;
                continue;
            }
            const Vec2 d = c - tx;
            const double len = d.norm();
            if (len <= kEpsGeo) {
                map.grid(row, col) = 1;
                continue;
            }
            const double r = occluder_dist(angle_of(d));
            map.grid(row, col) = (len <= r * (1.0 + 1e-12) + kEpsGeo) ? 1 : 0;
        }
    }
    return map;
}

LosMap reconstruct_los(const VertexAttributes &attrs, const SceneModel &scene, double search_radius)
{
    return rasterize_boundary(snap_and_refine(attrs, scene, search_radius), scene);
}

} // namespace losray
