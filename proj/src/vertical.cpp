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

#include "losray/vertical.hpp"

#include <algorithm>

namespace losray {

std::vector<std::pair<double, double>> footprint_ray_intervals(const Vec2 &p, const Vec2 &q,
                                                               const Building &building)
{
    if ((q - p).norm() <= kEpsGeo)
        throw GeometryError("footprint_ray_intervals: degenerate segment");
    return footprint_segment_intervals(p, q, building);
}

bool segment_clears_3d(const Vec2 &p, double z_p, const Vec2 &q, double z_q, const SceneModel &scene)
{
    if ((q - p).norm() <= kEpsGeo)
        return true;
    std::vector<int> candidates;
    scene.edge_index.collect_segment(p, q, candidates);
    std::vector<int> bids;
    bids.reserve(candidates.size());
    for (int id : candidates)
        bids.push_back(scene.edges[id].building_id);
    std::sort(bids.begin(), bids.end());
    bids.erase(std::unique(bids.begin(), bids.end()), bids.end());

    for (int bid : bids) {
        const Building &b = scene.buildings[bid];
        for (const auto &[t_in, t_out] : footprint_segment_intervals(p, q, b)) {
            const double z_in = z_p + t_in * (z_q - z_p);
            const double z_out = z_p + t_out * (z_q - z_p);
            if (!(std::min(z_in, z_out) > b.height))
                return false;
        }
    }
    return true;
}

bool los_3d(const LinkEndpoints &link, const SceneModel &scene)
{
    if (!(link.h_tx > 0.0) || !(link.h_rx > 0.0))
        throw GeometryError("los_3d: endpoint heights must be positive");
    return segment_clears_3d(link.tx, link.h_tx, link.rx, link.h_rx, scene);
}

} // namespace losray
