// SPDX-License-Identifier: Apache-2.0
//
// stripesim: waveform-level simulator for sub-THz radio stripes
// Copyright (C) 2026 The stripesim authors
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

#include "stripesim/geometry.hpp"

namespace stripesim {

std::vector<Vec3> linear_array(const Vec3& center, std::size_t n, const Vec3& axis, double spacing)
{
    const Vec3 u = axis.normalized();
    std::vector<Vec3> out(n);
    const double mid = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = center + u * ((static_cast<double>(i) - mid) * spacing);
    return out;
}

Vec3 centroid(const std::vector<Vec3>& points)
{
    Vec3 c;
    for (const auto& p : points)
        c = c + p;
    return points.empty() ? c : c * (1.0 / static_cast<double>(points.size()));
}

} // namespace stripesim
