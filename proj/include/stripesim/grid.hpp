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

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace stripesim {

using cd = std::complex<double>;
using CVector = std::vector<cd>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_lin_power(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_lin_amplitude(double db) { return std::pow(10.0, db / 20.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// The OFDM frequency axis. Subcarrier q sits at f_q = fc + (q - Q/2) * bw / Q, so index Q/2
/// is the carrier (baseband DC). The simulation sample rate is bw * os.
class SubcarrierGrid {
public:
    SubcarrierGrid() = default;

    /// Throws SchemaError when Q is not a power of two, os < 1 or fc/bw are not positive.
    SubcarrierGrid(double fc, double bw, std::size_t num_subcarriers, std::size_t oversampling = 1);

    double fc() const { return fc_; }
    double bw() const { return bw_; }
    std::size_t q() const { return q_; }
    std::size_t os() const { return os_; }

    double spacing() const { return bw_ / static_cast<double>(q_); }
    double critical_rate() const { return bw_; }
    double sample_rate() const { return bw_ * static_cast<double>(os_); }
    std::size_t fft_size() const { return q_ * os_; }

    double frequency(std::size_t q) const;
    std::vector<double> frequencies() const;

    /// Grid covering the full simulated bandwidth bw*os with the same spacing and os = 1.
    /// In-band subcarrier q maps to index q + Q*(os-1)/2 of the widened grid.
    SubcarrierGrid widened() const;
    std::size_t widened_offset() const { return q_ * (os_ - 1) / 2; }

    bool same_axis(const SubcarrierGrid& other) const;

private:
    double fc_ = 1.0;
    double bw_ = 1.0;
    std::size_t q_ = 1;
    std::size_t os_ = 1;
};

bool is_power_of_two(std::size_t n);

/// Symbol timing of a CP-OFDM frame at the simulation rate.
struct OfdmFraming {
    std::size_t fft_size = 0;  // Q * os
    std::size_t cp = 0;        // cp_length * os
    std::size_t n_symbols = 0;

    std::size_t symbol_length() const { return fft_size + cp; }
    std::size_t frame_length() const { return symbol_length() * n_symbols; }
};

/// Complex baseband samples with their sample rate. bulk_delay counts leading samples that
/// stem from known propagation delays; the receiver strips them before demodulation.
struct TimeWaveform {
    CVector samples;
    double sample_rate = 0.0;
    std::string origin_tag;
    std::size_t bulk_delay = 0;

    std::size_t size() const { return samples.size(); }
    double mean_power() const;
};

} // namespace stripesim
