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

#include "stripesim/grid.hpp"

#include "stripesim/errors.hpp"

#include <numeric>

namespace stripesim {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

SubcarrierGrid::SubcarrierGrid(double fc, double bw, std::size_t num_subcarriers, std::size_t oversampling)
    : fc_(fc), bw_(bw), q_(num_subcarriers), os_(oversampling)
{
    if (!(fc > 0.0) || !std::isfinite(fc))
        throw SchemaError("carrier frequency must be positive, got " + std::to_string(fc));
    if (!(bw > 0.0) || !std::isfinite(bw))
        throw SchemaError("bandwidth must be positive, got " + std::to_string(bw));
    if (num_subcarriers < 2 || !is_power_of_two(num_subcarriers))
        throw SchemaError("num_subcarriers must be a power of two >= 2, got " + std::to_string(num_subcarriers));
    if (oversampling < 1)
        throw SchemaError("oversampling factor must be >= 1");
}

double SubcarrierGrid::frequency(std::size_t q) const
{
    return fc_ + (static_cast<double>(q) - static_cast<double>(q_ / 2)) * spacing();
}

std::vector<double> SubcarrierGrid::frequencies() const
{
    std::vector<double> f(q_);
    for (std::size_t i = 0; i < q_; ++i)
        f[i] = frequency(i);
    return f;
}

SubcarrierGrid SubcarrierGrid::widened() const
{
    return SubcarrierGrid(fc_, bw_ * static_cast<double>(os_), q_ * os_, 1);
}

bool SubcarrierGrid::same_axis(const SubcarrierGrid& other) const
{
    return q_ == other.q_ && fc_ == other.fc_ && bw_ == other.bw_;
}

double TimeWaveform::mean_power() const
{
    if (samples.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto& s : samples)
        acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

} // namespace stripesim
