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

#include "stripesim/geometry.hpp"
#include "stripesim/grid.hpp"
#include "stripesim/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripesim {

enum class ChannelProvenance { Identity, Los, Rayleigh, Tdl, Dataset };

std::string to_string(ChannelProvenance p);

/// Per-subcarrier MIMO channel. [H[q]]_{k,m} (rx k, tx m) is stored at (q*n_rx + k)*n_tx + m.
struct ChannelRealization {
    SubcarrierGrid grid;
    std::size_t n_rx = 0;
    std::size_t n_tx = 0;
    CVector h;
    ChannelProvenance provenance = ChannelProvenance::Identity;

    std::size_t q() const { return grid.q(); }
    cd& at(std::size_t q, std::size_t k, std::size_t m) { return h[(q * n_rx + k) * n_tx + m]; }
    const cd& at(std::size_t q, std::size_t k, std::size_t m) const { return h[(q * n_rx + k) * n_tx + m]; }
};

enum class PatternKind { Isotropic, Tr38901 };

/// Single-element pattern. Directions are measured in a local frame whose x-axis is the
/// boresight and whose z-axis is as close to global +z as possible.
struct AntennaPattern {
    PatternKind kind = PatternKind::Isotropic;
    double max_gain_dbi = 8.0;
    double theta_3db_deg = 65.0;
    double phi_3db_deg = 65.0;
    double front_back_db = 30.0;  // A_m
    double sla_v_db = 30.0;
    Vec3 boresight{1.0, 0.0, 0.0};
};

/// (c / (4 pi f d))^2. Throws DomainError unless d > 0 and f > 0.
double free_space_gain(double d, double f);

/// 38.901 element gain (linear power) for an elevation offset theta' and azimuth offset phi'
/// from boresight, both in degrees.
double element_gain_38901(double theta_off_deg, double phi_off_deg, const AntennaPattern& pattern);

/// Linear power gain towards a global direction. Isotropic patterns return 1.
double antenna_gain_38901(const Vec3& direction, const AntennaPattern& pattern);

/// h_{q,m,k} = sqrt(Gtx Grx beta_fs(d, f_q)) exp(-j 2 pi f_q d / c). With `narrowband` every
/// subcarrier uses fc.
ChannelRealization los_channel(const SubcarrierGrid& grid, std::span<const Vec3> tx_positions,
                               std::span<const Vec3> rx_positions, const AntennaPattern& tx_pattern,
                               const AntennaPattern& rx_pattern, bool narrowband = false);

/// Large-scale amplitude shared by the stochastic models: sqrt(G beta_fs(d, f_q)) at a single
/// reference distance, or unity when no distance is given.
struct LargeScale {
    std::optional<double> distance;
    double antenna_gain = 1.0;
    bool narrowband = false;

    double amplitude(const SubcarrierGrid& grid, std::size_t q) const;
};

ChannelRealization rayleigh_channel(const SubcarrierGrid& grid, std::size_t n_tx, std::size_t n_rx, RngStream& rng,
                                    const LargeScale& large_scale = {});

struct TdlParams {
    std::size_t taps = 8;
    double beta = 0.5;
};

/// e^{-beta l} normalized to unit sum, l = 0..L-1.
std::vector<double> tap_powers(std::size_t taps, double beta);

/// Per antenna pair: L taps ~ CN(0, lambda_l), zero-padded to Q and transformed with a Q-point
/// DFT. Subcarrier q takes DFT bin (q - Q/2) mod Q so that tap delays are referenced to the
/// carrier.
ChannelRealization tdl_channel(const SubcarrierGrid& grid, const TdlParams& params, std::size_t n_tx,
                               std::size_t n_rx, RngStream& rng, const LargeScale& large_scale = {});

/// H[q] = I (n x n) on every subcarrier.
ChannelRealization identity_channel(const SubcarrierGrid& grid, std::size_t n);

/// Y[q] = H[q] X[q]; X is Q x n_tx (entry (q, m) at q*n_tx + m), Y is Q x n_rx.
CVector apply_channel(std::span<const cd> x, const ChannelRealization& channel);

/// Adds CN(0, noise_power) to every entry.
void add_awgn(std::span<cd> y, double noise_power, RngStream& rng);

/// Receiver noise floor kT*B*F. Per-subcarrier values are normalized like time-domain samples
/// (mean |Y_q|^2 equals the mean sample power), so every bin receives variance kTBF.
double thermal_noise_power(double bandwidth, double nf_db, double temperature = 290.0);
void add_thermal_noise(std::span<cd> y, double bandwidth, double nf_db, RngStream& rng, double temperature = 290.0);

} // namespace stripesim
