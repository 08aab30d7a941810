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

#include "losray/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace losray {

namespace {

/// Mirror chain closure: recovers the reflection points of one specular run
/// from the image of its source. Fails when a point leaves its edge segment,
/// a face is hit from behind, or the geometry degenerates.
std::optional<std::vector<Vec2>> resolve_run(const Vec2 &source, const std::vector<int> &run_edges,
                                             const Vec2 &target, const SceneModel &scene)
{
    std::vector<Vec2> points;
    if (run_edges.empty())
        return points;

    std::vector<Vec2> images(run_edges.size() + 1);
    images[0] = source;
    for (std::size_t i = 0; i < run_edges.size(); ++i) {
        const Edge &e = scene.edges[run_edges[i]];
        images[i + 1] = mirror_point(images[i], e.a, e.b);
    }
    // The true source must illuminate the front of the first face.
    {
        const Edge &e0 = scene.edges[run_edges.front()];
        if ((source - e0.a).dot(e0.outward_normal()) <= kEpsGeo)
            return std::nullopt;
    }

    points.assign(run_edges.size(), Vec2::Zero());
    Vec2 p = target;
    for (std::size_t i = run_edges.size(); i-- > 0;) {
        const Edge &e = scene.edges[run_edges[i]];
        if ((p - e.a).dot(e.outward_normal()) <= kEpsGeo)
            return std::nullopt; // next point behind the face
        const Vec2 &img = images[i + 1];
        const Vec2 seg = p - img;
        const Vec2 ed = e.b - e.a;
        const double denom = cross2(seg, ed);
        if (std::abs(denom) <= kEpsGeo * std::max(1.0, seg.norm() * ed.norm()))
            return std::nullopt;
        const double u = cross2(e.a - img, ed) / denom;
        const double s = cross2(e.a - img, seg) / denom;
        const double tol_u = kEpsGeo / std::max(seg.norm(), kEpsGeo);
        const double tol_s = kEpsGeo / std::max(ed.norm(), kEpsGeo);
        if (u <= tol_u || u >= 1.0 - tol_u)
            return std::nullopt;
        if (s <= tol_s || s >= 1.0 - tol_s)
            return std::nullopt; // outside the edge segment (or at a corner)
        p = img + u * seg;
        points[i] = p;
    }
    return points;
}

struct Candidate {
    std::vector<InteractionNode> nodes;
    std::vector<Vec2> resolved_points; ///< 2D points for nodes before the trailing run
    Vec2 last_anchor;                  ///< tx or the last diffraction vertex
    double resolved_len = 0.0;         ///< 2D polyline length tx -> last anchor
    std::vector<int> trailing_edges;   ///< reflection run after the last anchor
    Vec2 image;                        ///< last_anchor mirrored across the trailing run
    // Specular beam through the trailing run: the wedge from `image` through
    // the window [beam_a, beam_b] on the last reflecting edge. Used only to
    // prune further reflection candidates (a strict superset of the reachable
    // region; closures are validated exactly by resolve_run).
    bool has_beam = false;
    Vec2 beam_a{0.0, 0.0};
    Vec2 beam_b{0.0, 0.0};
};

/// Clips segment [a, b] to the beam wedge. Returns the window sub-segment or
/// nullopt when the beam cannot touch the segment.
std::optional<std::pair<Vec2, Vec2>> clip_to_beam(const Candidate &cand, const Vec2 &a, const Vec2 &b,
                                                  const SceneModel &scene)
{
    if (!cand.has_beam)
        return std::make_pair(a, b);
    const Vec2 &o = cand.image;
    Vec2 da = cand.beam_a - o;
    Vec2 db = cand.beam_b - o;
    if (cross2(da, db) < 0.0)
        std::swap(da, db);

    double s0 = 0.0, s1 = 1.0;
    const Vec2 d = b - a;
    // Half-plane constraints cross(da, p-o) >= 0 and cross(p-o, db) >= 0,
    // plus the far side of the window edge line.
    const Edge &prev = scene.edges[cand.trailing_edges.back()];
    const Vec2 n_prev = prev.outward_normal();
    const double margin = 1e-9;
    struct Lin {
        double c0, c1;
    };
    const Lin cons[3] = {
        {cross2(da, a - o), cross2(da, d)},
        {cross2(a - o, db), cross2(d, db)},
        {(a - prev.a).dot(n_prev), d.dot(n_prev)},
    };
    for (const Lin &c : cons) {
        // c.c0 + s * c.c1 >= -margin
        if (std::abs(c.c1) < 1e-300) {
            if (c.c0 < -margin)
                return std::nullopt;
            continue;
        }
        const double root = (-margin - c.c0) / c.c1;
        if (c.c1 > 0.0)
            s0 = std::max(s0, root);
        else
            s1 = std::min(s1, root);
    }
    if (s1 - s0 <= 1e-12)
        return std::nullopt;
    return std::make_pair(a + s0 * d, a + s1 * d);
}

} // namespace

struct VisibilityTree::Impl {
    const SceneModel *scene = nullptr;
    VisibilityAdjacency adjacency;
    std::vector<char> vertex_visible;
    std::vector<Candidate> candidates;

    bool vertex_sees_edge(int v, int e) const
    {
        const Edge &edge = scene->edges[e];
        if (edge.vertex_a == v || edge.vertex_b == v)
            return false;
        return adjacency.at(v, edge.vertex_a) || adjacency.at(v, edge.vertex_b);
    }

    bool edge_sees_edge(int e1, int e2) const
    {
        const Edge &a = scene->edges[e1];
        const Edge &b = scene->edges[e2];
        const int av[2] = {a.vertex_a, a.vertex_b};
        const int bv[2] = {b.vertex_a, b.vertex_b};
        for (int i : av)
            for (int j : bv)
                if (i == j || adjacency.at(i, j))
                    return true;
        return false;
    }
};

VisibilityTree::VisibilityTree(Vec2 tx, const VertexAttributes &attrs, const VisibilityAdjacency &adjacency,
                               const SceneModel &scene, int depth)
    : tx_(tx), depth_(depth), impl_(std::make_shared<Impl>())
{
    if (depth < 1)
        throw ConfigError("visibility tree depth must be at least 1");
    Impl &im = *impl_;
    im.scene = &scene;
    im.adjacency = adjacency;
    im.vertex_visible.assign(scene.vertex_count(), 0);
    for (const VertexAttributeRecord &rec : attrs.records)
        if (rec.visible && rec.vertex_id >= 0 && rec.vertex_id < static_cast<int>(scene.vertex_count()))
            im.vertex_visible[rec.vertex_id] = 1;

    for (std::size_t v = 0; v < scene.vertex_count(); ++v)
        if (im.vertex_visible[v] && !scene.vertices[v].reflex)
            level1_vertices_.push_back(static_cast<int>(v));
    for (std::size_t e = 0; e < scene.edges.size(); ++e) {
        const Edge &edge = scene.edges[e];
        if (!im.vertex_visible[edge.vertex_a] && !im.vertex_visible[edge.vertex_b])
            continue;
        if ((tx - edge.a).dot(edge.outward_normal()) <= kEpsGeo)
            continue; // back-face
        level1_edges_.push_back(static_cast<int>(e));
    }

    // Receiver-independent BFS over interaction sequences. Prefixes ending
    // at a diffraction anchor are resolved and 2D-validated immediately;
    // trailing reflection runs stay symbolic until a closure point is known.
    const double len_cap = 8.0 * std::hypot(scene.width_m(), scene.height_m());
    std::deque<Candidate> queue;
    Candidate root;
    root.last_anchor = tx;
    root.image = tx;
    queue.push_back(root);

    auto try_append_vertex = [&](const Candidate &cur, int v) -> std::optional<Candidate> {
        const SceneVertex &sv = scene.vertices[v];
        const auto run = resolve_run(cur.last_anchor, cur.trailing_edges, sv.position, scene);
        if (!run)
            return std::nullopt;
        // 2D clearance of the newly resolved legs.
        Candidate next = cur;
        Vec2 prev = cur.last_anchor;
        double len = cur.resolved_len;
        for (std::size_t i = 0; i <= run->size(); ++i) {
            const Vec2 to = (i < run->size()) ? (*run)[i] : sv.position;
            std::unordered_set<int> ignore;
            if (i > 0)
                ignore.insert(cur.trailing_edges[i - 1]);
            if (i < run->size())
                ignore.insert(cur.trailing_edges[i]);
            if (segment_hits_building(prev, to, scene, ignore))
                return std::nullopt;
            len += (to - prev).norm();
            prev = to;
        }
        if (len > len_cap)
            return std::nullopt;
        for (const Vec2 &r : *run)
            next.resolved_points.push_back(r);
        next.resolved_points.push_back(sv.position);
        next.nodes.push_back(
            InteractionNode{InteractionKind::diffraction, v, scene.buildings[sv.building_id].material_index});
        next.last_anchor = sv.position;
        next.resolved_len = len;
        next.trailing_edges.clear();
        next.image = sv.position;
        next.has_beam = false;
        return next;
    };

    while (!queue.empty()) {
        Candidate cur = std::move(queue.front());
        queue.pop_front();
        const bool at_root = cur.nodes.empty();
        if (!at_root)
            im.candidates.push_back(cur);
        if (static_cast<int>(cur.nodes.size()) >= depth)
            continue;

        // Diffraction children.
        if (at_root) {
            for (int v : level1_vertices_)
                if (auto next = try_append_vertex(cur, v))
                    queue.push_back(std::move(*next));
        } else if (cur.nodes.back().kind == InteractionKind::diffraction) {
            const int u = cur.nodes.back().primitive_id;
            for (std::size_t v = 0; v < scene.vertex_count(); ++v) {
                if (scene.vertices[v].reflex || !im.adjacency.at(u, v))
                    continue;
                if (auto next = try_append_vertex(cur, static_cast<int>(v)))
                    queue.push_back(std::move(*next));
            }
        } else {
            const int last_edge = cur.trailing_edges.back();
            for (std::size_t v = 0; v < scene.vertex_count(); ++v) {
                if (scene.vertices[v].reflex)
                    continue;
                if (!im.vertex_sees_edge(static_cast<int>(v), last_edge))
                    continue;
                if (auto next = try_append_vertex(cur, static_cast<int>(v)))
                    queue.push_back(std::move(*next));
            }
        }

        // Reflection children: appended symbolically, front-face culled
        // against the current image source.
        auto edge_candidate_ok = [&](int e) {
            const Edge &edge = scene.edges[e];
            if (!cur.trailing_edges.empty() && cur.trailing_edges.back() == e)
                return false;
            if ((cur.image - edge.a).dot(edge.outward_normal()) <= kEpsGeo)
                return false;
            if (at_root)
                return std::binary_search(level1_edges_.begin(), level1_edges_.end(), e);
            if (cur.trailing_edges.empty()) {
                const int u = cur.nodes.back().primitive_id;
                return im.vertex_sees_edge(u, e);
            }
            return im.edge_sees_edge(cur.trailing_edges.back(), e);
        };
        for (std::size_t e = 0; e < scene.edges.size(); ++e) {
            if (!edge_candidate_ok(static_cast<int>(e)))
                continue;
            const Edge &edge = scene.edges[e];
            const auto window = clip_to_beam(cur, edge.a, edge.b, scene);
            if (!window)
                continue;
            Candidate next = cur;
            next.nodes.push_back(InteractionNode{InteractionKind::reflection, static_cast<int>(e),
                                                 scene.buildings[edge.building_id].material_index});
            next.trailing_edges.push_back(static_cast<int>(e));
            next.image = mirror_point(cur.image, edge.a, edge.b);
            next.has_beam = true;
            next.beam_a = window->first;
            next.beam_b = window->second;
            queue.push_back(std::move(next));
        }
    }
}

VisibilityTree build_visibility_tree(const Vec2 &tx, const VertexAttributes &attrs,
                                     const VisibilityAdjacency &adjacency, const SceneModel &scene,
                                     int depth)
{
    return VisibilityTree(tx, attrs, adjacency, scene, depth);
}

namespace {

InteractionGeom make_geom(const SceneModel &scene, const InteractionNode &node)
{
    InteractionGeom g;
    if (node.kind == InteractionKind::reflection) {
        const Edge &e = scene.edges[node.primitive_id];
        g.face0 = e.direction().normalized();
        g.face1 = e.outward_normal();
    } else {
        const SceneVertex &v = scene.vertices[node.primitive_id];
        g.face0 = (scene.edges[v.edge_prev].a - v.position).normalized();
        g.face1 = (scene.edges[v.edge_next].b - v.position).normalized();
        g.wedge_n = 2.0 - v.interior_angle / kPi;
    }
    return g;
}

bool node_less(const InteractionNode &a, const InteractionNode &b)
{
    if (a.kind != b.kind)
        return a.kind < b.kind;
    return a.primitive_id < b.primitive_id;
}

bool sequence_less(const PathCandidate &a, const PathCandidate &b)
{
    if (a.sequence.size() != b.sequence.size())
        return a.sequence.size() < b.sequence.size();
    for (std::size_t i = 0; i < a.sequence.size(); ++i) {
        if (!(a.sequence[i] == b.sequence[i]))
            return node_less(a.sequence[i], b.sequence[i]);
    }
    return false;
}

} // namespace

std::vector<PathCandidate> enumerate_paths(const Vec3 &tx, const Vec3 &rx, const VisibilityTree &tree,
                                           const SceneModel &scene, const TracerOptions &options)
{
    if ((rx - tx).norm() <= kEpsGeo)
        throw GeometryError("enumerate_paths: tx equals rx");
    const Vec2 tx2 = tx.head<2>();
    const Vec2 rx2 = rx.head<2>();
    const double h_tx = tx.z();
    const double h_rx = rx.z();
    const bool flat = std::abs(h_tx - h_rx) <= 1e-12;
    double max_len = options.max_path_length;
    if (max_len <= 0.0)
        max_len = 4.0 * std::hypot(scene.width_m(), scene.height_m());

    std::vector<PathCandidate> out;

    // Direct path.
    if (los_3d(LinkEndpoints{tx2, h_tx, rx2, h_rx}, scene) && (rx - tx).norm() <= max_len) {
        PathCandidate direct;
        direct.tx = tx;
        direct.rx = rx;
        out.push_back(std::move(direct));
    }

    // Per-receiver memo of the final anchor->rx leg (valid when the height
    // profile is flat: the leg test is then independent of the path prefix).
    std::unordered_map<int, char> anchor_leg_ok;

    const VisibilityTree::Impl &im = tree.impl();
    for (const Candidate &cand : im.candidates) {
        if (static_cast<int>(cand.nodes.size()) > options.max_depth)
            continue;
        if (!options.enable_reflection || !options.enable_diffraction) {
            bool skip = false;
            for (const InteractionNode &nd : cand.nodes) {
                if (!options.enable_reflection && nd.kind == InteractionKind::reflection)
                    skip = true;
                if (!options.enable_diffraction && nd.kind == InteractionKind::diffraction)
                    skip = true;
            }
            if (skip)
                continue;
        }

        // Close the trailing run (or the bare anchor) onto the receiver.
        std::vector<Vec2> run_pts;
        if (!cand.trailing_edges.empty()) {
            auto run = resolve_run(cand.last_anchor, cand.trailing_edges, rx2, scene);
            if (!run)
                continue;
            run_pts = std::move(*run);
        }

        // Assemble the full 2D polyline.
        std::vector<Vec2> pts2;
        pts2.reserve(cand.nodes.size() + 2);
        pts2.push_back(tx2);
        for (const Vec2 &p : cand.resolved_points)
            pts2.push_back(p);
        for (const Vec2 &p : run_pts)
            pts2.push_back(p);
        pts2.push_back(rx2);

        std::vector<double> cumlen(pts2.size(), 0.0);
        bool degenerate = false;
        for (std::size_t i = 1; i < pts2.size(); ++i) {
            const double d = (pts2[i] - pts2[i - 1]).norm();
            if (d <= kEpsGeo)
                degenerate = true;
            cumlen[i] = cumlen[i - 1] + d;
        }
        if (degenerate || cumlen.back() > max_len)
            continue;

        // Heights along the unfolded length; interaction points must stay at
        // or below their wedge/wall tops (no over-rooftop interactions).
        const double total = cumlen.back();
        std::vector<double> z(pts2.size());
        for (std::size_t i = 0; i < pts2.size(); ++i)
            z[i] = h_tx + (h_rx - h_tx) * cumlen[i] / total;
        bool ok = true;
        for (std::size_t i = 0; i < cand.nodes.size() && ok; ++i) {
            const InteractionNode &nd = cand.nodes[i];
            const int bid = nd.kind == InteractionKind::reflection
                                ? scene.edges[nd.primitive_id].building_id
                                : scene.vertices[nd.primitive_id].building_id;
            if (z[i + 1] > scene.buildings[bid].height + 1e-12)
                ok = false;
        }
        if (!ok)
            continue;

        // Validate the receiver-side legs in 3D (prefix legs were cleared
        // horizontally at tree construction, which implies 3D clearance).
        const std::size_t first_new = cand.resolved_points.size(); // index into interactions
        const std::size_t n_legs = pts2.size() - 1;
        for (std::size_t leg = first_new; leg < n_legs && ok; ++leg) {
            const bool final_anchor_leg =
                cand.trailing_edges.empty() && !cand.nodes.empty() && leg == n_legs - 1;
            if (flat && final_anchor_leg) {
                const int anchor_id = cand.nodes.back().primitive_id;
                auto it = anchor_leg_ok.find(anchor_id);
                if (it == anchor_leg_ok.end()) {
                    const bool clear = segment_clears_3d(pts2[leg], z[leg], pts2[leg + 1], z[leg + 1], scene);
                    it = anchor_leg_ok.emplace(anchor_id, clear ? 1 : 0).first;
                }
                ok = it->second != 0;
            } else {
                ok = segment_clears_3d(pts2[leg], z[leg], pts2[leg + 1], z[leg + 1], scene);
            }
        }
        if (!ok)
            continue;

        PathCandidate path;
        path.tx = tx;
        path.rx = rx;
        path.sequence = cand.nodes;
        path.interaction_points.reserve(cand.nodes.size());
        path.interaction_geoms.reserve(cand.nodes.size());
        for (std::size_t i = 0; i < cand.nodes.size(); ++i) {
            path.interaction_points.emplace_back(pts2[i + 1].x(), pts2[i + 1].y(), z[i + 1]);
            path.interaction_geoms.push_back(make_geom(scene, cand.nodes[i]));
        }
        out.push_back(std::move(path));
    }

    std::sort(out.begin(), out.end(), sequence_less);
    return out;
}

std::optional<std::vector<Vec3>> resolve_reflection_geometry(const std::vector<InteractionNode> &sequence,
                                                             const Vec3 &tx, const Vec3 &rx,
                                                             const SceneModel &scene)
{
    if (sequence.empty())
        throw ConfigError("resolve_reflection_geometry: empty sequence");
    const Vec2 tx2 = tx.head<2>();
    const Vec2 rx2 = rx.head<2>();

    // Split into specular runs between fixed diffraction anchors.
    std::vector<Vec2> pts2;
    Vec2 anchor = tx2;
    std::vector<int> run;
    for (const InteractionNode &nd : sequence) {
        if (nd.kind == InteractionKind::reflection) {
            run.push_back(nd.primitive_id);
            continue;
        }
        const Vec2 v = scene.vertices[nd.primitive_id].position;
        const auto solved = resolve_run(anchor, run, v, scene);
        if (!solved)
            return std::nullopt;
        for (const Vec2 &p : *solved)
            pts2.push_back(p);
        pts2.push_back(v);
        anchor = v;
        run.clear();
    }
    const auto solved = resolve_run(anchor, run, rx2, scene);
    if (!solved)
        return std::nullopt;
    for (const Vec2 &p : *solved)
        pts2.push_back(p);

    std::vector<double> cumlen(pts2.size() + 2, 0.0);
    Vec2 prev = tx2;
    for (std::size_t i = 0; i < pts2.size(); ++i) {
        cumlen[i + 1] = cumlen[i] + (pts2[i] - prev).norm();
        prev = pts2[i];
    }
    cumlen[pts2.size() + 1] = cumlen[pts2.size()] + (rx2 - prev).norm();
    const double total = cumlen.back();
    if (total <= kEpsGeo)
        return std::nullopt;

    std::vector<Vec3> out;
    out.reserve(pts2.size());
    for (std::size_t i = 0; i < pts2.size(); ++i) {
        const double zi = tx.z() + (rx.z() - tx.z()) * cumlen[i + 1] / total;
        out.emplace_back(pts2[i].x(), pts2[i].y(), zi);
    }
    return out;
}

} // namespace losray
