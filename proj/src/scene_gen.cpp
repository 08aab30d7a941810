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

#include "losray/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace losray {

namespace {

double segment_distance(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
{
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)))
        return 0.0;
    return std::min(std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)),
                    std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)));
}

double polygon_distance(const std::vector<Vec2> &a, const std::vector<Vec2> &b)
{
    if (point_in_polygon(a[0], b) || point_in_polygon(b[0], a))
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            best = std::min(best, segment_distance(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]));
    return best;
}

} // namespace

SceneModel generate_scene(const GenerateParams &p)
{
    if (p.n_buildings < 0)
        throw ConfigError("generate_scene: negative building count");
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double w_m = p.grid_width * p.resolution;
    const double h_m = p.grid_height * p.resolution;

    std::vector<Building> buildings;
    int attempts = 0;
    const int max_attempts = 400 * std::max(p.n_buildings, 1);
    while (static_cast<int>(buildings.size()) < p.n_buildings && attempts < max_attempts) {
        ++attempts;
        const double sx = p.min_size + (p.max_size - p.min_size) * uni(rng);
        const double sy = p.min_size + (p.max_size - p.min_size) * uni(rng);
        const double cx = p.border_margin + sx / 2.0 + (w_m - 2.0 * p.border_margin - sx) * uni(rng);
        const double cy = p.border_margin + sy / 2.0 + (h_m - 2.0 * p.border_margin - sy) * uni(rng);

        std::vector<Vec2> poly;
        const bool make_l = p.rectilinear && uni(rng) < 0.5;
        if (make_l) {
            // Axis-aligned L: rectangle with one quadrant notched out.
            const double nx = sx * (0.35 + 0.3 * uni(rng));
            const double ny = sy * (0.35 + 0.3 * uni(rng));
            const double x0 = cx - sx / 2.0, x1 = cx + sx / 2.0;
            const double y0 = cy - sy / 2.0, y1 = cy + sy / 2.0;
            poly = {Vec2(x0, y0), Vec2(x1, y0),          Vec2(x1, y1 - ny),
                    Vec2(x1 - nx, y1 - ny), Vec2(x1 - nx, y1), Vec2(x0, y1)};
        } else {
            const double tilt = (2.0 * uni(rng) - 1.0) * p.max_tilt_deg * kPi / 180.0;
            const double c = std::cos(tilt), s = std::sin(tilt);
            const Vec2 ex(c * sx / 2.0, s * sx / 2.0);
            const Vec2 ey(-s * sy / 2.0, c * sy / 2.0);
            const Vec2 center(cx, cy);
            poly = {center - ex - ey, center + ex - ey, center + ex + ey, center - ex + ey};
        }

        bool ok = true;
        for (const Vec2 &v : poly)
            if (v.x() < p.border_margin / 2.0 || v.x() > w_m - p.border_margin / 2.0 ||
                v.y() < p.border_margin / 2.0 || v.y() > h_m - p.border_margin / 2.0)
                ok = false;
        for (const Building &other : buildings) {
            if (!ok)
                break;
            if (polygon_distance(poly, other.footprint) < p.min_gap)
                ok = false;
        }
        if (!ok)
            continue;

        Building b;
        b.footprint = std::move(poly);
        b.height = p.min_height + (p.max_height - p.min_height) * uni(rng);
        b.material_index = 0;
        buildings.push_back(std::move(b));
    }
    return make_scene(std::move(buildings), p.grid_height, p.grid_width, p.resolution);
}

Vec2 pick_free_point(const SceneModel &scene, std::uint64_t seed, double clearance)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 c(scene.width_m() * (0.05 + 0.9 * uni(rng)), scene.height_m() * (0.05 + 0.9 * uni(rng)));
        bool clear = true;
        for (const Building &b : scene.buildings) {
            if (point_in_polygon(c, b.footprint)) {
                clear = false;
                break;
            }
            for (std::size_t k = 0; k < b.footprint.size() && clear; ++k)
                if (point_segment_distance(c, b.footprint[k], b.footprint[(k + 1) % b.footprint.size()]) <
                    clearance)
                    clear = false;
            if (!clear)
                break;
        }
        if (clear)
            return c;
    }
    throw GeometryError("pick_free_point: no free position found");
}

} // namespace losray
