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

#include "losray/scene.hpp"

#include <iosfwd>

namespace losray {

struct VertexAttributeRecord {
    int vertex_id = -1;
    Vec2 position{0.0, 0.0};
    bool visible = false;
    Vec2 projection{0.0, 0.0}; ///< equals position for invisible vertices
    bool open_boundary = false; ///< projection terminated on the grid boundary
};

/// Sparse LoS representation: per-vertex visibility plus projection points,
/// either exact (from the sweep) or externally predicted.
struct VertexAttributes {
    Vec2 tx{0.0, 0.0};
    std::vector<VertexAttributeRecord> records;
};

/// Star-shaped visibility region about tx, stored as angular pieces. Piece i
/// covers angles [pieces[i].angle, pieces[i+1].angle) (wrapping); within a
/// piece the occluder is the single segment (a, b).
struct VisibilityPolygon {
    struct Piece {
        double angle = 0.0;
        Vec2 a{0.0, 0.0};
        Vec2 b{0.0, 0.0};
        bool grid_boundary = false; ///< virtual enclosure, not a building edge
    };

    Vec2 tx{0.0, 0.0};
    std::vector<Piece> pieces;

    /// Distance from tx to the occluder at the given angle (infinity when the
    /// sector is bounded only by the virtual enclosure).
    double occluder_distance(double angle) const;
    /// Point membership consistent with segment_hits_building semantics.
    bool contains(const Vec2 &p) const;
};

/// Symmetric vertex-to-vertex visibility relation.
class VisibilityAdjacency {
public:
    VisibilityAdjacency() = default;
    explicit VisibilityAdjacency(std::size_t n) : n_(n), bits_(n * n, 0) {}

    std::size_t size() const { return n_; }
    bool at(std::size_t u, std::size_t v) const { return bits_[u * n_ + v] != 0; }
    void set(std::size_t u, std::size_t v, bool value)
    {
        bits_[u * n_ + v] = value ? 1 : 0;
        bits_[v * n_ + u] = value ? 1 : 0;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Exact rotational sweep over edge endpoints, O(m log m). Throws
/// GeometryError when tx lies inside a footprint.
VisibilityPolygon sweep_visibility_polygon(const Vec2 &tx, const SceneModel &scene);

/// Exact per-vertex visibility labels and projection points (ray casting
/// with min_t = 1, excluding each vertex's incident edges).
VertexAttributes exact_vertex_attributes(const Vec2 &tx, const SceneModel &scene);

/// Binary LoS raster from the exact visibility polygon. Pixel centers inside
/// footprints are 0.
LosMap exact_los_map(const Vec2 &tx, const SceneModel &scene);

/// Pairwise vertex visibility (open segments, incident edges of either
/// endpoint ignored, footprint interiors block).
VisibilityAdjacency vertex_adjacency(const SceneModel &scene);

/// Attribute interchange format: header "tx x y", then one line per vertex
/// "vertex_id x y visible proj_x proj_y open_boundary_flag".
void write_vertex_attributes(std::ostream &os, const VertexAttributes &attrs);
void save_vertex_attributes(const std::string &path, const VertexAttributes &attrs);

} // namespace losray
