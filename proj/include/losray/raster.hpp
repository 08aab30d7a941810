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

#include "losray/types.hpp"

#include <iosfwd>
#include <string>

namespace losray {

using BinaryGrid = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using RealGrid = Eigen::MatrixXd;

/// Binary LoS raster. Row i / column j covers the pixel centered at
/// ((j+0.5)*dr, (i+0.5)*dr); row 0 is the y=0 edge of the grid.
struct LosMap {
    BinaryGrid grid;
    Vec2 tx{0.0, 0.0};

    double iou(const LosMap &other) const;
};

// ASCII grid format: first line "H W", then H rows of W space-separated
// values, row 0 first.
void write_binary_grid(std::ostream &os, const BinaryGrid &g);
void write_real_grid(std::ostream &os, const RealGrid &g);
BinaryGrid read_binary_grid(std::istream &is);
RealGrid read_real_grid(std::istream &is);

void save_binary_grid(const std::string &path, const BinaryGrid &g);
void save_real_grid(const std::string &path, const RealGrid &g);
BinaryGrid load_binary_grid(const std::string &path);
RealGrid load_real_grid(const std::string &path);

} // namespace losray
