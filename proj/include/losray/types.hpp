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

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace losray {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

/// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;
/// Vacuum permittivity [F/m].
inline constexpr double kEps0 = 8.8541878128e-12;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Single named tolerance for point-on-segment and parallelism tests [m].
inline constexpr double kEpsGeo = 1e-9;

// Errors are mapped to distinct CLI exit codes; keep the hierarchy flat.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string &msg) : std::runtime_error(msg) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// 2D cross product (z component of the 3D cross of the embedded vectors).
inline double cross2(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

/// Angle of a direction vector normalized to [0, 2*pi).
inline double angle_of(const Vec2 &d)
{
    double a = std::atan2(d.y(), d.x());
    if (a < 0.0)
        a += kTwoPi;
    if (a >= kTwoPi)
        a = 0.0;
    return a;
}

/// Runs fn(i) for i in [0, n) on up to n_threads workers. n_threads <= 1 runs inline.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn, unsigned n_threads = 0)
{
    if (n == 0)
        return;
    if (n_threads == 0)
        n_threads = std::thread::hardware_concurrency();
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        workers.emplace_back([lo, hi, &fn]() {
            for (std::size_t i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto &t : workers)
        t.join();
}

} // namespace losray
