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

#include "losray/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace losray {

// ---------------------------------------------------------------------------
// Raster I/O
// ---------------------------------------------------------------------------

double LosMap::iou(const LosMap &other) const
{
    if (grid.rows() != other.grid.rows() || grid.cols() != other.grid.cols())
        throw GeometryError("iou: grid shapes differ");
    long inter = 0, uni = 0;
    for (long i = 0; i < grid.rows(); ++i)
        for (long j = 0; j < grid.cols(); ++j) {
            const bool a = grid(i, j) != 0;
            const bool b = other.grid(i, j) != 0;
            inter += (a && b);
            uni += (a || b);
        }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void write_binary_grid(std::ostream &os, const BinaryGrid &g)
{
    os << g.rows() << " " << g.cols() << "\n";
    for (long i = 0; i < g.rows(); ++i) {
        for (long j = 0; j < g.cols(); ++j) {
            if (j)
                os << ' ';
            os << g(i, j);
        }
        os << '\n';
    }
}

void write_real_grid(std::ostream &os, const RealGrid &g)
{
    char buf[40];
    os << g.rows() << " " << g.cols() << "\n";
    for (long i = 0; i < g.rows(); ++i) {
        for (long j = 0; j < g.cols(); ++j) {
            if (j)
                os << ' ';
            std::snprintf(buf, sizeof(buf), "%.10g", g(i, j));
            os << buf;
        }
        os << '\n';
    }
}

BinaryGrid read_binary_grid(std::istream &is)
{
    long h = 0, w = 0;
    if (!(is >> h >> w) || h <= 0 || w <= 0)
        throw ParseError("grid: bad header");
    BinaryGrid g(h, w);
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j)
            if (!(is >> g(i, j)))
                throw ParseError("grid: truncated data");
    return g;
}

RealGrid read_real_grid(std::istream &is)
{
    long h = 0, w = 0;
    if (!(is >> h >> w) || h <= 0 || w <= 0)
        throw ParseError("grid: bad header");
    RealGrid g(h, w);
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j)
            if (!(is >> g(i, j)))
                throw ParseError("grid: truncated data");
    return g;
}

void save_binary_grid(const std::string &path, const BinaryGrid &g)
{
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    write_binary_grid(os, g);
}

void save_real_grid(const std::string &path, const RealGrid &g)
{
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    write_real_grid(os, g);
}

BinaryGrid load_binary_grid(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open: " + path);
    return read_binary_grid(is);
}

RealGrid load_real_grid(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open: " + path);
    return read_real_grid(is);
}

// ---------------------------------------------------------------------------
// UniformGridIndex
// ---------------------------------------------------------------------------

void UniformGridIndex::cell_range(double lo, double hi, std::int64_t &c0, std::int64_t &c1) const
{
    c0 = static_cast<std::int64_t>(std::floor((lo - kEpsGeo) / cell_));
    c1 = static_cast<std::int64_t>(std::floor((hi + kEpsGeo) / cell_));
}

void UniformGridIndex::build(const std::vector<Edge> &edges, double cell_size)
{
    cell_ = cell_size;
    cells_.clear();
    for (std::size_t id = 0; id < edges.size(); ++id) {
        const Edge &e = edges[id];
        std::int64_t cx0, cx1, cy0, cy1;
        cell_range(std::min(e.a.x(), e.b.x()), std::max(e.a.x(), e.b.x()), cx0, cx1);
        cell_range(std::min(e.a.y(), e.b.y()), std::max(e.a.y(), e.b.y()), cy0, cy1);
        for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
            // Clip the segment to this x-column; register the y cells it spans.
            double x_lo = cx * cell_ - kEpsGeo;
            double x_hi = (cx + 1) * cell_ + kEpsGeo;
            double t0 = 0.0, t1 = 1.0;
            const double dx = e.b.x() - e.a.x();
            if (std::abs(dx) > kEpsGeo) {
                t0 = (x_lo - e.a.x()) / dx;
                t1 = (x_hi - e.a.x()) / dx;
                if (t0 > t1)
                    std::swap(t0, t1);
                t0 = std::max(t0, 0.0);
                t1 = std::min(t1, 1.0);
                if (t0 > t1)
                    continue;
            }
            const double y_a = e.a.y() + t0 * (e.b.y() - e.a.y());
            const double y_b = e.a.y() + t1 * (e.b.y() - e.a.y());
            std::int64_t cya, cyb;
            cell_range(std::min(y_a, y_b), std::max(y_a, y_b), cya, cyb);
            cya = std::max(cya, cy0);
            cyb = std::min(cyb, cy1);
            for (std::int64_t cy = cya; cy <= cyb; ++cy)
                cells_[key(cx, cy)].push_back(static_cast<int>(id));
        }
    }
}

void UniformGridIndex::collect_segment(const Vec2 &p, const Vec2 &q, std::vector<int> &out) const
{
    out.clear();
    if (cells_.empty())
        return;
    std::int64_t cx0, cx1;
    cell_range(std::min(p.x(), q.x()), std::max(p.x(), q.x()), cx0, cx1);
    const double dx = q.x() - p.x();
    const double dy = q.y() - p.y();
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        double t0 = 0.0, t1 = 1.0;
        if (std::abs(dx) > kEpsGeo) {
            t0 = (cx * cell_ - kEpsGeo - p.x()) / dx;
            t1 = ((cx + 1) * cell_ + kEpsGeo - p.x()) / dx;
            if (t0 > t1)
                std::swap(t0, t1);
            t0 = std::max(t0, 0.0);
            t1 = std::min(t1, 1.0);
            if (t0 > t1)
                continue;
        }
        const double y_a = p.y() + t0 * dy;
        const double y_b = p.y() + t1 * dy;
        std::int64_t cya, cyb;
        cell_range(std::min(y_a, y_b), std::max(y_a, y_b), cya, cyb);
        for (std::int64_t cy = cya; cy <= cyb; ++cy) {
            auto it = cells_.find(key(cx, cy));
            if (it == cells_.end())
                continue;
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

void UniformGridIndex::collect_disk(const Vec2 &p, double r, std::vector<int> &out) const
{
    out.clear();
    if (cells_.empty())
        return;
    std::int64_t cx0, cx1, cy0, cy1;
    cell_range(p.x() - r, p.x() + r, cx0, cx1);
    cell_range(p.y() - r, p.y() + r, cy0, cy1);
    for (std::int64_t cx = cx0; cx <= cx1; ++cx)
        for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
            auto it = cells_.find(key(cx, cy));
            if (it == cells_.end())
                continue;
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

// ---------------------------------------------------------------------------
// Scene construction and validation
// ---------------------------------------------------------------------------

namespace {

constexpr double kIndexCellSize = 8.0; // meters, ~8 pixels at default resolution

bool proper_crossing(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
{
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    const double tol = kEpsGeo * std::max(1.0, (b - a).norm() * (d - c).norm());
    return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
           ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

void check_simple(const Building &b, int id)
{
    const auto &poly = b.footprint;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent)
                continue;
            if (proper_crossing(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                throw GeometryError("non-simple polygon in building " + std::to_string(id));
        }
    }
}

bool interiors_overlap(const Building &a, const Building &b)
{
    for (std::size_t i = 0; i < a.footprint.size(); ++i) {
        const Vec2 &p = a.footprint[i];
        const Vec2 &q = a.footprint[(i + 1) % a.footprint.size()];
        for (std::size_t j = 0; j < b.footprint.size(); ++j) {
            if (proper_crossing(p, q, b.footprint[j], b.footprint[(j + 1) % b.footprint.size()]))
                return true;
        }
    }
    for (const Vec2 &v : a.footprint)
        if (point_in_polygon_strict(v, b.footprint))
            return true;
    for (const Vec2 &v : b.footprint)
        if (point_in_polygon_strict(v, a.footprint))
            return true;
    // Midpoint probes catch full containment with all vertices on the boundary.
    for (std::size_t i = 0; i < a.footprint.size(); ++i) {
        const Vec2 mid = 0.5 * (a.footprint[i] + a.footprint[(i + 1) % a.footprint.size()]);
        if (point_in_polygon_strict(mid, b.footprint))
            return true;
    }
    return false;
}

} // namespace

SceneModel make_scene(std::vector<Building> buildings, int grid_height, int grid_width, double resolution)
{
    if (grid_height < 2 || grid_width < 2)
        throw GeometryError("grid must be at least 2x2 pixels");
    if (!(resolution > 0.0))
        throw GeometryError("resolution must be positive");

    SceneModel scene;
    scene.grid_height = grid_height;
    scene.grid_width = grid_width;
    scene.resolution = resolution;

    for (std::size_t i = 0; i < buildings.size(); ++i) {
        Building &b = buildings[i];
        if (b.footprint.size() < 3)
            throw GeometryError("building " + std::to_string(i) + " has fewer than 3 vertices");
        if (!(b.height > 0.0))
            throw GeometryError("building " + std::to_string(i) + " has non-positive height");
        const double area = polygon_signed_area(b.footprint);
        if (std::abs(area) <= kEpsGeo)
            throw GeometryError("building " + std::to_string(i) + " has zero area");
        if (area < 0.0)
            std::reverse(b.footprint.begin(), b.footprint.end());
        for (const Vec2 &v : b.footprint) {
            if (v.x() < -kEpsGeo || v.x() > grid_width * resolution + kEpsGeo || v.y() < -kEpsGeo ||
                v.y() > grid_height * resolution + kEpsGeo)
                throw GeometryError("building " + std::to_string(i) + " vertex outside grid extent");
        }
        check_simple(b, static_cast<int>(i));
    }
    for (std::size_t i = 0; i < buildings.size(); ++i)
        for (std::size_t j = i + 1; j < buildings.size(); ++j)
            if (interiors_overlap(buildings[i], buildings[j]))
                throw GeometryError("buildings " + std::to_string(i) + " and " + std::to_string(j) +
                                    " have overlapping footprints");

    scene.buildings = std::move(buildings);
    for (std::size_t bi = 0; bi < scene.buildings.size(); ++bi) {
        const auto &poly = scene.buildings[bi].footprint;
        const std::size_t n = poly.size();
        const int first_edge = static_cast<int>(scene.edges.size());
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 &a = poly[k];
            const Vec2 &b = poly[(k + 1) % n];
            if ((b - a).norm() <= kEpsGeo)
                throw GeometryError("building " + std::to_string(bi) + " has a degenerate edge");
            scene.edges.push_back(Edge{a, b, static_cast<int>(bi), static_cast<int>(k),
                                       first_edge + static_cast<int>(k),
                                       first_edge + static_cast<int>((k + 1) % n)});
        }
        for (std::size_t k = 0; k < n; ++k) {
            SceneVertex v;
            v.position = poly[k];
            v.building_id = static_cast<int>(bi);
            v.vertex_ordinal = static_cast<int>(k);
            v.edge_next = first_edge + static_cast<int>(k);
            v.edge_prev = first_edge + static_cast<int>((k + n - 1) % n);
            const Vec2 to_prev = poly[(k + n - 1) % n] - poly[k];
            const Vec2 to_next = poly[(k + 1) % n] - poly[k];
            double ang = angle_of(to_prev) - angle_of(to_next);
            if (ang < 0.0)
                ang += kTwoPi;
            v.interior_angle = ang;
            v.reflex = ang > kPi + kEpsGeo;
            scene.vertices.push_back(v);
        }
    }
    scene.edge_index.build(scene.edges, kIndexCellSize);
    return scene;
}

SceneModel load_scene(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open scenario file: " + path);
    int h = 0, w = 0;
    double res = 0.0;
    if (!(is >> h >> w >> res))
        throw ParseError("scenario header must be 'H W resolution'");
    std::vector<Building> buildings;
    double height;
    while (is >> height) {
        Building b;
        b.height = height;
        int n = 0;
        if (!(is >> b.material_index >> n) || n < 3)
            throw ParseError("bad building record in " + path);
        b.footprint.resize(n);
        for (int k = 0; k < n; ++k)
            if (!(is >> b.footprint[k].x() >> b.footprint[k].y()))
                throw ParseError("truncated building record in " + path);
        buildings.push_back(std::move(b));
    }
    return make_scene(std::move(buildings), h, w, res);
}

void save_scene(const std::string &path, const SceneModel &scene)
{
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    char buf[40];
    os << scene.grid_height << " " << scene.grid_width << " ";
    std::snprintf(buf, sizeof(buf), "%.17g", scene.resolution);
    os << buf << "\n";
    for (const Building &b : scene.buildings) {
        std::snprintf(buf, sizeof(buf), "%.17g", b.height);
        os << buf << " " << b.material_index << " " << b.footprint.size();
        for (const Vec2 &v : b.footprint) {
            std::snprintf(buf, sizeof(buf), " %.17g", v.x());
            os << buf;
            std::snprintf(buf, sizeof(buf), " %.17g", v.y());
            os << buf;
        }
        os << "\n";
    }
}

int SceneModel::building_containing(const Vec2 &p) const
{
    for (std::size_t i = 0; i < buildings.size(); ++i)
        if (point_in_polygon_strict(p, buildings[i].footprint))
            return static_cast<int>(i);
    return -1;
}

bool SceneModel::pixel_in_any_footprint(const Vec2 &p) const
{
    for (const Building &b : buildings)
        if (point_in_polygon(p, b.footprint))
            return true;
    return false;
}

BinaryGrid occupancy_grid(const SceneModel &scene)
{
    BinaryGrid g(scene.grid_height, scene.grid_width);
    for (int i = 0; i < scene.grid_height; ++i)
        for (int j = 0; j < scene.grid_width; ++j) {
            const Vec2 c((j + 0.5) * scene.resolution, (i + 0.5) * scene.resolution);
            g(i, j) = scene.pixel_in_any_footprint(c) ? 1 : 0;
        }
    return g;
}

// ---------------------------------------------------------------------------
// Segment queries
// ---------------------------------------------------------------------------

std::vector<std::pair<double, double>> footprint_segment_intervals(const Vec2 &p, const Vec2 &q,
                                                                   const Building &building)
{
    std::vector<std::pair<double, double>> result;
    const Vec2 d = q - p;
    const double len = d.norm();
    if (len <= kEpsGeo)
        return result;
    const double rel = kEpsGeo / len;
    const auto &poly = building.footprint;
    const std::size_t n = poly.size();

    std::vector<double> ts;
    ts.push_back(0.0);
    ts.push_back(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[(i + 1) % n];
        const Vec2 e = b - a;
        const double denom = cross2(d, e);
        if (std::abs(denom) <= kEpsGeo * std::max(1.0, len * e.norm())) {
            // Collinear run: record entry/exit of the overlap.
            if (std::abs(cross2(a - p, d)) <= kEpsGeo * std::max(1.0, len * (a - p).norm())) {
                const double inv = 1.0 / d.squaredNorm();
                double ta = (a - p).dot(d) * inv;
                double tb = (b - p).dot(d) * inv;
                if (ta > tb)
                    std::swap(ta, tb);
                if (tb > 0.0 && ta < 1.0) {
                    ts.push_back(std::clamp(ta, 0.0, 1.0));
                    ts.push_back(std::clamp(tb, 0.0, 1.0));
                }
            }
            continue;
        }
        const Vec2 ap = a - p;
        const double t = cross2(ap, e) / denom;
        const double s = cross2(ap, d) / denom;
        const double tol_s = kEpsGeo / std::max(e.norm(), kEpsGeo);
        if (s >= -tol_s && s <= 1.0 + tol_s && t > rel && t < 1.0 - rel)
            ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(), [rel](double a, double b) { return b - a <= rel; }), ts.end());

    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double t0 = ts[i];
        const double t1 = ts[i + 1];
        if (t1 - t0 <= rel)
            continue;
        const Vec2 mid = p + 0.5 * (t0 + t1) * d;
        if (point_in_polygon_strict(mid, poly)) {
            if (!result.empty() && std::abs(result.back().second - t0) <= rel)
                result.back().second = t1;
            else
                result.emplace_back(t0, t1);
        }
    }
    return result;
}

namespace {

bool hits_impl(const Vec2 &p, const Vec2 &q, const SceneModel &scene,
               const std::unordered_set<int> &ignore_edges, const std::vector<int> &candidates)
{
    for (int id : candidates) {
        if (ignore_edges.count(id))
            continue;
        const Edge &e = scene.edges[id];
        if (open_segment_hits_closed(p, q, e.a, e.b))
            return true;
    }
    // Interior clause: a positive-length run strictly inside a footprint
    // blocks even when the boundary contacts were all on ignored edges.
    if (!ignore_edges.empty()) {
        std::vector<int> bids;
        for (int id : candidates)
            bids.push_back(scene.edges[id].building_id);
        std::sort(bids.begin(), bids.end());
        bids.erase(std::unique(bids.begin(), bids.end()), bids.end());
        for (int bid : bids) {
            if (!footprint_segment_intervals(p, q, scene.buildings[bid]).empty())
                return true;
        }
    }
    return false;
}

} // namespace

bool segment_hits_building(const Vec2 &p, const Vec2 &q, const SceneModel &scene,
                           const std::unordered_set<int> &ignore_edges)
{
    if ((q - p).norm() <= kEpsGeo)
        return false;
    if (scene.edges.empty())
        return false;
    std::vector<int> candidates;
    scene.edge_index.collect_segment(p, q, candidates);
    return hits_impl(p, q, scene, ignore_edges, candidates);
}

bool segment_hits_building_bruteforce(const Vec2 &p, const Vec2 &q, const SceneModel &scene,
                                      const std::unordered_set<int> &ignore_edges)
{
    if ((q - p).norm() <= kEpsGeo)
        return false;
    std::vector<int> all(scene.edges.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = static_cast<int>(i);
    return hits_impl(p, q, scene, ignore_edges, all);
}

std::optional<RayHit> ray_first_edge_hit(const Vec2 &origin, const Vec2 &through, const SceneModel &scene,
                                         double min_t, const std::unordered_set<int> &ignore_edges)
{
    const Vec2 d = through - origin;
    const double len = d.norm();
    if (len <= kEpsGeo)
        throw GeometryError("ray_first_edge_hit: origin equals through point");
    if (scene.edges.empty())
        return std::nullopt;

    // The ray is relevant only while inside the (slightly inflated) grid.
    const double margin = 2.0 * kIndexCellSize;
    double t_exit = 4.0 * (scene.width_m() + scene.height_m()) / len;
    if (auto exit = ray_rectangle_exit(origin, d, scene.width_m(), scene.height_m()))
        t_exit = *exit + margin / len;

    std::vector<int> candidates;
    scene.edge_index.collect_segment(origin, origin + t_exit * d, candidates);

    const double tol_t = kEpsGeo / len;
    std::optional<RayHit> best;
    for (int id : candidates) {
        if (ignore_edges.count(id))
            continue;
        const Edge &e = scene.edges[id];
        double t, s;
        if (!ray_hits_segment(origin, d, e.a, e.b, &t, &s))
            continue;
        if (t <= min_t + tol_t)
            continue;
        if (!best || t < best->t) {
            best = RayHit{id, t, origin + t * d};
        }
    }
    return best;
}

} // namespace losray
