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

namespace losray {

/// How the occluder distance behaves as the sweep angle crosses a boundary
/// vertex. Silhouette vertices jump between the anchor and its terminator;
/// bend vertices (both incident edges straddling the sight ray) keep the
/// boundary continuous and carry no terminator of their own.
enum class BoundaryKind { ascending, descending, bend };

struct BoundarySegment {
    int vertex_id = -1;
    Vec2 anchor{0.0, 0.0};     ///< the boundary vertex v_i
    Vec2 terminator{0.0, 0.0}; ///< refined projection; equals anchor for bends
    BoundaryKind kind = BoundaryKind::bend;
    bool open_boundary = false; ///< terminator sits on the grid boundary
    double angle = 0.0;         ///< angle of the anchor ray about tx
};

/// Angularly sorted piecewise-linear LoS boundary.
struct LosBoundary {
    Vec2 tx{0.0, 0.0};
    std::vector<BoundarySegment> segments;
    /// Number of silhouette (jump) vertices M; 0 flags a degenerate
    /// reconstruction (see rasterize_boundary).
    int boundary_vertex_count = 0;
};

/// Reads a prediction file in the vertex-attribute interchange format.
/// Every scene vertex must appear exactly once; projections must lie inside
/// the grid extent. No geometric validation happens here.
VertexAttributes load_predictions(const std::string &path, const SceneModel &scene);

/// Synthetic stand-in for predictor regression error: projections displaced
/// uniformly in a disk of radius noise_radius, visibility bits flipped with
/// probability flip_rate. Deterministic per seed.
VertexAttributes perturb_attributes(const VertexAttributes &attrs, double noise_radius, double flip_rate,
                                    std::uint64_t rng_seed);

/// Edge snapping + ray-edge intersection refinement + global clearance check
/// (failures re-cast the exact ray). search_radius in meters.
LosBoundary snap_and_refine(const VertexAttributes &attrs, const SceneModel &scene, double search_radius);

/// Rasterizes the boundary: per pixel, binary search on the sorted angles,
/// then radial comparison against the piecewise-linear occluder distance.
/// An empty boundary yields an unoccluded map outside footprints.
LosMap rasterize_boundary(const LosBoundary &boundary, const SceneModel &scene);

inline constexpr double kDefaultSearchRadius = 5.0; // meters

/// snap_and_refine followed by rasterize_boundary.
LosMap reconstruct_los(const VertexAttributes &attrs, const SceneModel &scene,
                       double search_radius = kDefaultSearchRadius);

} // namespace losray
