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

#pragma once

#include "stripesim/grid.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace stripesim {

/// Mixes a master seed with integer coordinates and a tag into a stream seed. Equal keys give
/// equal streams; the result does not depend on the order in which streams are created.
std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<std::uint64_t> coords,
                          std::string_view tag = {});

/// Dedicated random stream of one component or model draw.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}
    RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> coords, std::string_view tag)
        : RngStream(derive_seed(master_seed, coords, tag)) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform on [0, 1).
    double uniform();
    double gaussian() { return normal_(engine_); }
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cd complex_gaussian(double variance = 1.0);
    std::vector<std::uint8_t> bits(std::size_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace stripesim
