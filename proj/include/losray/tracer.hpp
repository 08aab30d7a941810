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

#include "losray/sweep.hpp"
#include "losray/vertical.hpp"

#include <memory>

namespace losray {

enum class InteractionKind { reflection, diffraction };

struct InteractionNode {
    InteractionKind kind = InteractionKind::reflection;
    int primitive_id = -1; ///< edge id for reflections, vertex id for diffractions
    int material_index = 0;

    friend bool operator==(const InteractionNode &a, const InteractionNode &b)
    {
        return a.kind == b.kind && a.primitive_id == b.primitive_id;
    }
};

/// Local surface data captured at path-resolution time so that field
/// evaluation does not need the scene again.
struct InteractionGeom {
    Vec2 face0{1.0, 0.0}; ///< reflection: edge unit direction; diffraction: exterior start face
    Vec2 face1{0.0, 1.0}; ///< reflection: outward unit normal; diffraction: exterior end face
    double wedge_n = 0.0;  ///< exterior angle factor, diffraction only
};

struct PathCandidate {
    Vec3 tx{0.0, 0.0, 0.0};
    Vec3 rx{0.0, 0.0, 0.0};
    std::vector<InteractionNode> sequence;
    std::vector<Vec3> interaction_points;
    std::vector<InteractionGeom> interaction_geoms;

    /// Total 3D polyline length tx -> interactions -> rx.
    double unfolded_length() const;
};

struct TracerOptions {
    int max_depth = 4;             ///< interaction sequence length bound K
    double max_path_length = -1.0; ///< meters; <0 selects 4x the grid diagonal
    bool enable_reflection = true;
    bool enable_diffraction = true;
    double h_tx = kDefaultAntennaHeight;
    double h_rx = kDefaultAntennaHeight;
};

/// Transmitter-rooted traversal structure: level-1 primitives from the
/// vertex attributes, deeper levels from the precomputed adjacency. The
/// receiver-independent part of every candidate interaction sequence is
/// enumerated once and cached.
class VisibilityTree {
public:
    VisibilityTree(Vec2 tx, const VertexAttributes &attrs, const VisibilityAdjacency &adjacency,
                   const SceneModel &scene, int depth);

    const Vec2 &tx() const { return tx_; }
    int depth() const { return depth_; }
    const std::vector<int> &level1_vertices() const { return level1_vertices_; }
    const std::vector<int> &level1_edges() const { return level1_edges_; }

    struct Impl;
    Impl &impl() const { return *impl_; }

private:
    Vec2 tx_;
    int depth_;
    std::vector<int> level1_vertices_; ///< visible diffraction anchors
    std::vector<int> level1_edges_;    ///< front-facing reflection candidates
    std::shared_ptr<Impl> impl_;
};

VisibilityTree build_visibility_tree(const Vec2 &tx, const VertexAttributes &attrs,
                                     const VisibilityAdjacency &adjacency, const SceneModel &scene,
                                     int depth);

/// All geometrically valid propagation paths from tx to rx up to the tree
/// depth, the direct path included when los_3d holds. Deterministic order:
/// sequence length, then lexicographic primitive ids.
std::vector<PathCandidate> enumerate_paths(const Vec3 &tx, const Vec3 &rx, const VisibilityTree &tree,
                                           const SceneModel &scene, const TracerOptions &options = {});

/// Image-method solve of one interaction sequence: reflections are mirrored
/// across edge lines per maximal run between diffraction anchors; empty when
/// a reflection point leaves its edge segment or a face is hit from behind.
/// Heights are interpolated linearly along the unfolded 2D length.
std::optional<std::vector<Vec3>> resolve_reflection_geometry(const std::vector<InteractionNode> &sequence,
                                                             const Vec3 &tx, const Vec3 &rx,
                                                             const SceneModel &scene);

} // namespace losray
