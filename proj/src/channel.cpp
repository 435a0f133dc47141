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

#include "stripesim/channel.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/fft.hpp"

#include <algorithm>
#include <cmath>

namespace stripesim {

std::string to_string(ChannelProvenance p)
{
    switch (p) {
    case ChannelProvenance::Identity: return "identity";
    case ChannelProvenance::Los: return "los";
    case ChannelProvenance::Rayleigh: return "rayleigh";
    case ChannelProvenance::Tdl: return "tdl";
    case ChannelProvenance::Dataset: return "dataset";
    }
    return "unknown";
}

double free_space_gain(double d, double f)
{
    if (!(d > 0.0))
        throw DomainError("free-space gain needs a positive distance");
    if (!(f > 0.0))
        throw DomainError("free-space gain needs a positive frequency");
    const double r = kSpeedOfLight / (4.0 * kPi * f * d);
    return r * r;
}

double element_gain_38901(double theta_off_deg, double phi_off_deg, const AntennaPattern& pattern)
{
    if (pattern.kind == PatternKind::Isotropic)
        return 1.0;
    const double tv = theta_off_deg / pattern.theta_3db_deg;
    const double th = phi_off_deg / pattern.phi_3db_deg;
    const double a_v = -std::min(12.0 * tv * tv, pattern.sla_v_db);
    const double a_h = -std::min(12.0 * th * th, pattern.front_back_db);
    const double a = -std::min(-(a_v + a_h), pattern.front_back_db);
    return db_to_lin_power(pattern.max_gain_dbi + a);
}

double antenna_gain_38901(const Vec3& direction, const AntennaPattern& pattern)
{
    if (pattern.kind == PatternKind::Isotropic)
        return 1.0;
    const Vec3 ex = pattern.boresight.normalized();
    Vec3 up{0.0, 0.0, 1.0};
    if (up.cross(ex).norm() < 1e-9)
        up = {0.0, 1.0, 0.0};
    const Vec3 ey = up.cross(ex).normalized();
    const Vec3 ez = ex.cross(ey);
    const Vec3 d = direction.normalized();
    const double elevation = std::asin(std::clamp(d.dot(ez), -1.0, 1.0)) * 180.0 / kPi;
    const double azimuth = std::atan2(d.dot(ey), d.dot(ex)) * 180.0 / kPi;
    return element_gain_38901(elevation, azimuth, pattern);
}

ChannelRealization los_channel(const SubcarrierGrid& grid, std::span<const Vec3> tx_positions,
                               std::span<const Vec3> rx_positions, const AntennaPattern& tx_pattern,
                               const AntennaPattern& rx_pattern, bool narrowband)
{
    ChannelRealization ch;
    ch.grid = grid;
    ch.n_tx = tx_positions.size();
    ch.n_rx = rx_positions.size();
    ch.provenance = ChannelProvenance::Los;
    ch.h.resize(grid.q() * ch.n_rx * ch.n_tx);

    for (std::size_t k = 0; k < ch.n_rx; ++k) {
        for (std::size_t m = 0; m < ch.n_tx; ++m) {
            const Vec3 delta = rx_positions[k] - tx_positions[m];
            const double d = delta.norm();
            if (!(d > 0.0))
                throw DomainError("coincident transmit and receive elements");
            const double g = antenna_gain_38901(delta, tx_pattern) * antenna_gain_38901(delta * -1.0, rx_pattern);
            for (std::size_t q = 0; q < grid.q(); ++q) {
                const double f = narrowband ? grid.fc() : grid.frequency(q);
                const double amp = std::sqrt(g * free_space_gain(d, f));
                ch.at(q, k, m) = std::polar(amp, -2.0 * kPi * f * d / kSpeedOfLight);
            }
        }
    }
    return ch;
}

double LargeScale::amplitude(const SubcarrierGrid& grid, std::size_t q) const
{
    if (!distance)
        return std::sqrt(antenna_gain);
    const double f = narrowband ? grid.fc() : grid.frequency(q);
    return std::sqrt(antenna_gain * free_space_gain(*distance, f));
}

ChannelRealization rayleigh_channel(const SubcarrierGrid& grid, std::size_t n_tx, std::size_t n_rx, RngStream& rng,
                                    const LargeScale& large_scale)
{
    ChannelRealization ch;
    ch.grid = grid;
    ch.n_tx = n_tx;
    ch.n_rx = n_rx;
    ch.provenance = ChannelProvenance::Rayleigh;
    ch.h.resize(grid.q() * n_rx * n_tx);
    for (std::size_t q = 0; q < grid.q(); ++q) {
        const double amp = large_scale.amplitude(grid, q);
        for (std::size_t k = 0; k < n_rx; ++k)
            for (std::size_t m = 0; m < n_tx; ++m)
                ch.at(q, k, m) = amp * rng.complex_gaussian(1.0);
    }
    return ch;
}

std::vector<double> tap_powers(std::size_t taps, double beta)
{
    if (taps < 1)
        throw DomainError("TDL needs at least one tap");
    if (!(beta >= 0.0))
        throw DomainError("TDL decay rate must be non-negative");
    std::vector<double> p(taps);
    double sum = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
        p[l] = std::exp(-beta * static_cast<double>(l));
        sum += p[l];
    }
    for (auto& v : p)
        v /= sum;
    return p;
}

ChannelRealization tdl_channel(const SubcarrierGrid& grid, const TdlParams& params, std::size_t n_tx,
                               std::size_t n_rx, RngStream& rng, const LargeScale& large_scale)
{
    const std::size_t nq = grid.q();
    if (params.taps > nq)
        throw DomainError("TDL tap count exceeds the number of subcarriers");
    const auto lambda = tap_powers(params.taps, params.beta);

    ChannelRealization ch;
    ch.grid = grid;
    ch.n_tx = n_tx;
    ch.n_rx = n_rx;
    ch.provenance = ChannelProvenance::Tdl;
    ch.h.resize(nq * n_rx * n_tx);

    std::vector<double> amp(nq);
    for (std::size_t q = 0; q < nq; ++q)
        amp[q] = large_scale.amplitude(grid, q);

    CVector g(nq);
    for (std::size_t k = 0; k < n_rx; ++k) {
        for (std::size_t m = 0; m < n_tx; ++m) {
            std::fill(g.begin(), g.end(), cd{});
            for (std::size_t l = 0; l < params.taps; ++l)
                g[l] = rng.complex_gaussian(lambda[l]);
            fft::forward(g);
            for (std::size_t q = 0; q < nq; ++q)
                ch.at(q, k, m) = amp[q] * g[(q + nq - nq / 2) % nq];
        }
    }
    return ch;
}

ChannelRealization identity_channel(const SubcarrierGrid& grid, std::size_t n)
{
    ChannelRealization ch;
    ch.grid = grid;
    ch.n_tx = n;
    ch.n_rx = n;
    ch.provenance = ChannelProvenance::Identity;
    ch.h.assign(grid.q() * n * n, cd{});
    for (std::size_t q = 0; q < grid.q(); ++q)
        for (std::size_t k = 0; k < n; ++k)
            ch.at(q, k, k) = 1.0;
    return ch;
}

CVector apply_channel(std::span<const cd> x, const ChannelRealization& channel)
{
    const std::size_t nq = channel.q();
    if (x.size() != nq * channel.n_tx)
        throw DimensionError("input has " + std::to_string(x.size()) + " entries, channel expects " +
                             std::to_string(nq * channel.n_tx));
    CVector y(nq * channel.n_rx);
    for (std::size_t q = 0; q < nq; ++q) {
        for (std::size_t k = 0; k < channel.n_rx; ++k) {
            cd acc{};
            for (std::size_t m = 0; m < channel.n_tx; ++m)
                acc += channel.at(q, k, m) * x[q * channel.n_tx + m];
            y[q * channel.n_rx + k] = acc;
        }
    }
    return y;
}

void add_awgn(std::span<cd> y, double noise_power, RngStream& rng)
{
    if (!(noise_power > 0.0))
        return;
    for (auto& v : y)
        v += rng.complex_gaussian(noise_power);
}

double thermal_noise_power(double bandwidth, double nf_db, double temperature)
{
    if (!(bandwidth > 0.0))
        throw DomainError("noise bandwidth must be positive");
    return kBoltzmann * temperature * bandwidth * db_to_lin_power(nf_db);
}

void add_thermal_noise(std::span<cd> y, double bandwidth, double nf_db, RngStream& rng, double temperature)
{
    add_awgn(y, thermal_noise_power(bandwidth, nf_db, temperature), rng);
}

} // namespace stripesim
