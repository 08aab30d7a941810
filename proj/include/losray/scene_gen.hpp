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

namespace losray {

/// Random-scenario generator: rejection-sampled, pairwise-separated,
/// axis-aligned-ish footprints. Deterministic per seed.
struct GenerateParams {
    int n_buildings = 20;
    int grid_height = 257;
    int grid_width = 257;
    double resolution = 1.0;
    std::uint64_t seed = 1;
    bool rectilinear = false; ///< mix in L-shaped (non-convex) footprints
    double min_height = 10.0; ///< meters
    double max_height = 30.0;
    double min_size = 8.0; ///< footprint extent range, meters
    double max_size = 28.0;
    double border_margin = 6.0; ///< keep-away from the grid border
    double min_gap = 2.5;       ///< enforced separation between footprints
    double max_tilt_deg = 12.0; ///< rotation range for convex quads
};

SceneModel generate_scene(const GenerateParams &params);

/// A transmitter position in free space, deterministically derived from the
/// scene (first probe of a seeded sequence that lands outside all footprints
/// with a small clearance).
Vec2 pick_free_point(const SceneModel &scene, std::uint64_t seed, double clearance = 1.0);

} // namespace losray
