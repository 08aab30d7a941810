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

struct LinkEndpoints {
    Vec2 tx{0.0, 0.0};
    double h_tx = 1.5; ///< meters
    Vec2 rx{0.0, 0.0};
    double h_rx = 1.5; ///< meters
};

inline constexpr double kDefaultAntennaHeight = 1.5; // meters

/// Horizontal crossing intervals of the footprint (possibly several for
/// non-convex polygons), sorted ascending in t over (0, 1).
std::vector<std::pair<double, double>> footprint_ray_intervals(const Vec2 &p, const Vec2 &q,
                                                               const Building &building);

/// Exact 3D direct-path LoS under the extruded-prism model: the link is clear
/// iff every horizontal crossing interval of every building satisfies
/// min(z(t_in), z(t_out)) > h_i, with z linear between the endpoint heights.
/// Rooftop-grazing equality counts as blocked.
bool los_3d(const LinkEndpoints &link, const SceneModel &scene);

/// Same test for an arbitrary sub-segment with explicit endpoint heights
/// (used by path validation).
bool segment_clears_3d(const Vec2 &p, double z_p, const Vec2 &q, double z_q, const SceneModel &scene);

} // namespace losray
