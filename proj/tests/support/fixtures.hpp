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

#include "stripesim/config.hpp"
#include "stripesim/geometry.hpp"
#include "stripesim/waveform.hpp"

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stripesim::testing {

/// A single-stripe room with RUs along x at z = 2.8 m, the CU 1 m before the first RU.
struct EnvSpec {
    std::size_t q = 256;
    double fc = 157.75e9;
    double bw = 2.0e9;
    std::size_t n_stripes = 1;
    std::size_t n_rus = 3;
    double spacing = 1.0;
    std::size_t n_antennas = 1;
    std::size_t ue_antennas = 1;
    std::string pattern = "isotropic";
    double cu_fiber = 1.0;
    std::vector<Vec3> ues{{2.3, 2.0, 1.0}};
};

inline std::string env_yaml(const EnvSpec& s)
{
    std::string y;
    y += "room: [20.0, 10.0, 3.0]\n";
    y += "stripe_config:\n";
    y += "  n_stripes: " + std::to_string(s.n_stripes) + "\n";
    y += "  n_rus: " + std::to_string(s.n_rus) + "\n";
    y += "  inter_ru_spacing: " + std::to_string(s.spacing) + "\n";
    y += "  inter_stripe_spacing: 2.0\n";
    y += "  start_position: [0.5, 2.0, 2.8]\n";
    y += "  orientation: x\n";
    y += "ue_positions:\n";
    for (const auto& u : s.ues)
        y += "  - [" + std::to_string(u.x) + ", " + std::to_string(u.y) + ", " + std::to_string(u.z) + "]\n";
    y += "sub_thz:\n";
    y += "  fc: " + std::to_string(s.fc) + "\n";
    y += "  bw: " + std::to_string(s.bw) + "\n";
    y += "  num_subcarriers: " + std::to_string(s.q) + "\n";
    y += "antenna:\n";
    y += "  n_antennas: " + std::to_string(s.n_antennas) + "\n";
    y += "  ue_antennas: " + std::to_string(s.ue_antennas) + "\n";
    y += "  pattern: " + s.pattern + "\n";
    y += "central_unit_fiber_length: " + std::to_string(s.cu_fiber) + "\n";
    return y;
}

inline EnvironmentConfig make_env(const EnvSpec& s) { return parse_environment(env_yaml(s)); }

inline WaveformConfig make_waveform(unsigned qam = 4, std::size_t symbols = 14, std::size_t os = 1,
                                    std::size_t cp = 16, std::size_t pilot_spacing = 8)
{
    WaveformConfig wf;
    wf.n_ofdm_symbols = symbols;
    wf.qam_order = qam;
    wf.oversampling_factor = os;
    wf.cp_length = cp;
    wf.pilot_spacing = pilot_spacing;
    wf.tx_power_dbm = 0.0;
    wf.tx_power_w = 1e-3;
    return wf;
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("stripesim_" + name + "_" + std::to_string(::getpid())))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace stripesim::testing
