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

#include "stripesim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace stripesim::fft {

namespace {

class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        CVector scratch(n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

void run(std::span<cd> data, int sign)
{
    if (data.size() <= 1)
        return;
    fftw_plan plan = cache().get(data.size(), sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

} // namespace

void forward(std::span<cd> data) { run(data, FFTW_FORWARD); }

void inverse(std::span<cd> data) { run(data, FFTW_BACKWARD); }

CVector ifftshift(std::span<const cd> centered)
{
    const std::size_t n = centered.size();
    CVector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[(i + n - n / 2) % n] = centered[i];
    return out;
}

CVector fftshift(std::span<const cd> natural)
{
    const std::size_t n = natural.size();
    CVector out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[(k + n / 2) % n] = natural[k];
    return out;
}

} // namespace stripesim::fft
