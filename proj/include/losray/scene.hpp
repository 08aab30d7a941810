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

#include "losray/geometry.hpp"
#include "losray/raster.hpp"
#include "losray/types.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace losray {

struct Building {
    std::vector<Vec2> footprint; ///< CCW vertex loop, meters
    double height = 20.0;        ///< meters, > 0
    int material_index = 0;
};

struct Edge {
    Vec2 a;
    Vec2 b;
    int building_id = -1;
    int edge_ordinal = -1;
    int vertex_a = -1; ///< scene vertex id at endpoint a
    int vertex_b = -1; ///< scene vertex id at endpoint b

    Vec2 direction() const { return b - a; }
    /// Outward unit normal (footprints are CCW, so the interior lies left of a->b).
    Vec2 outward_normal() const
    {
        const Vec2 d = (b - a).normalized();
        return Vec2(d.y(), -d.x());
    }
};

/// Flattened scene vertex with its two incident edges and wedge data.
struct SceneVertex {
    Vec2 position;
    int building_id = -1;
    int vertex_ordinal = -1;
    int edge_prev = -1; ///< edge ending at this vertex
    int edge_next = -1; ///< edge starting at this vertex
    double interior_angle = 0.0; ///< footprint interior angle [rad]
    bool reflex = false;         ///< interior angle > pi (no diffracting wedge)
};

/// Uniform spatial hash over edge segments. A query returns a superset of
/// the edges intersecting the query range.
class UniformGridIndex {
public:
    void build(const std::vector<Edge> &edges, double cell_size);

    double cell_size() const { return cell_; }
    bool empty() const { return cells_.empty(); }

    /// Edge ids in every cell overlapped by segment [p, q] (deduplicated).
    void collect_segment(const Vec2 &p, const Vec2 &q, std::vector<int> &out) const;
    /// Edge ids in every cell overlapped by the disk of radius r around p.
    void collect_disk(const Vec2 &p, double r, std::vector<int> &out) const;

private:
    static std::int64_t key(std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffffLL); }
    void cell_range(double lo, double hi, std::int64_t &c0, std::int64_t &c1) const;

    double cell_ = 8.0;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

struct SceneModel {
    int grid_height = 0; ///< H, pixels
    int grid_width = 0;  ///< W, pixels
    double resolution = 1.0; ///< meters per pixel
    std::vector<Building> buildings;
    std::vector<Edge> edges;
    std::vector<SceneVertex> vertices;
    UniformGridIndex edge_index;

    double width_m() const { return grid_width * resolution; }
    double height_m() const { return grid_height * resolution; }
    bool in_extent(const Vec2 &p) const
    {
        return p.x() >= 0.0 && p.x() <= width_m() && p.y() >= 0.0 && p.y() <= height_m();
    }
    std::size_t vertex_count() const { return vertices.size(); }

    /// Building index whose interior strictly contains p, or -1.
    int building_containing(const Vec2 &p) const;
    /// Non-strict variant used for raster masking (boundary by parity rule).
    bool pixel_in_any_footprint(const Vec2 &p) const;
};

/// Builds derived data (edges, vertices, index) and validates all scene
/// invariants. Footprints are reoriented CCW when needed. Throws
/// GeometryError on overlap / out-of-extent / degenerate polygons.
SceneModel make_scene(std::vector<Building> buildings, int grid_height, int grid_width, double resolution);

/// Scenario file: header "H W resolution", then one building per line:
/// "height material_index n_vertices x1 y1 ... xn yn".
SceneModel load_scene(const std::string &path);
void save_scene(const std::string &path, const SceneModel &scene);

/// Binary occupancy raster of footprint interiors at pixel centers.
BinaryGrid occupancy_grid(const SceneModel &scene);

struct RayHit {
    int edge_id = -1;
    double t = 0.0;
    Vec2 point{0.0, 0.0};
};

/// True iff the open segment (p, q) intersects a building edge not in
/// `ignore_edges`, or crosses a footprint interior over a positive length.
/// Uses the spatial index; degenerate p == q returns false.
bool segment_hits_building(const Vec2 &p, const Vec2 &q, const SceneModel &scene,
                           const std::unordered_set<int> &ignore_edges = {});

/// Index-free reference implementation (test oracle path).
bool segment_hits_building_bruteforce(const Vec2 &p, const Vec2 &q, const SceneModel &scene,
                                      const std::unordered_set<int> &ignore_edges = {});

/// First edge intersected by the ray origin -> through beyond parameter
/// min_t, skipping edges parallel to the ray and edges in `ignore_edges`.
/// Empty when the ray leaves the grid without a hit.
std::optional<RayHit> ray_first_edge_hit(const Vec2 &origin, const Vec2 &through, const SceneModel &scene,
                                         double min_t, const std::unordered_set<int> &ignore_edges = {});

/// Maximal disjoint parameter sub-intervals of t in (0,1) where p + t(q-p)
/// lies strictly inside the footprint, sorted ascending. Robust for
/// non-convex polygons (crossing parameters + midpoint parity).
std::vector<std::pair<double, double>> footprint_segment_intervals(const Vec2 &p, const Vec2 &q,
                                                                   const Building &building);

} // namespace losray
