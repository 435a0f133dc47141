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

#include "stripesim/waveform.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/fft.hpp"
#include "stripesim/rng.hpp"

#include <cmath>

namespace stripesim {

namespace {

unsigned axis_levels(unsigned order) { return 1U << (bits_per_symbol(order) / 2); }

unsigned gray_to_binary(unsigned g)
{
    unsigned b = g;
    for (unsigned shift = 1; shift < 32; shift <<= 1)
        b ^= b >> shift;
    return b;
}

double qam_norm(unsigned order) { return std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0); }

double axis_level(unsigned label, unsigned levels)
{
    return static_cast<double>(levels - 1) - 2.0 * static_cast<double>(gray_to_binary(label));
}

// Nearest axis label; exact ties resolve to the smaller label.
unsigned slice_axis(double v, unsigned levels, std::span<const double> level_of_label)
{
    unsigned best = 0;
    double best_d = std::abs(v - level_of_label[0]);
    for (unsigned label = 1; label < levels; ++label) {
        const double d = std::abs(v - level_of_label[label]);
        if (d < best_d) {
            best_d = d;
            best = label;
        }
    }
    return best;
}

} // namespace

void WaveformConfig::validate_against(std::size_t q) const
{
    if (cp_length >= q)
        throw SchemaError("cp_length (" + std::to_string(cp_length) + ") must be smaller than num_subcarriers (" +
                          std::to_string(q) + ")");
    if (pilot_mode == PilotMode::Scattered && q % pilot_spacing != 0)
        throw SchemaError("pilot_spacing " + std::to_string(pilot_spacing) + " does not divide num_subcarriers " +
                          std::to_string(q));
    if (num_subcarriers && *num_subcarriers != q)
        throw SchemaError("waveform num_subcarriers does not match the grid");
}

unsigned bits_per_symbol(unsigned order)
{
    if (order < 4 || (order & (order - 1)) != 0)
        throw SchemaError("qam_order must be a power of 4, got " + std::to_string(order));
    unsigned bits = 0;
    while ((1U << bits) < order)
        ++bits;
    if (bits % 2 != 0)
        throw SchemaError("qam_order must be a power of 4, got " + std::to_string(order));
    return bits;
}

CVector qam_constellation(unsigned order)
{
    const unsigned m = bits_per_symbol(order);
    const unsigned levels = axis_levels(order);
    const double norm = qam_norm(order);
    CVector points(order);
    for (unsigned label = 0; label < order; ++label) {
        const unsigned i_label = label >> (m / 2);
        const unsigned q_label = label & (levels - 1);
        points[label] = cd(axis_level(i_label, levels), axis_level(q_label, levels)) / norm;
    }
    return points;
}

CVector map_qam(std::span<const std::uint8_t> bits, unsigned order)
{
    const unsigned m = bits_per_symbol(order);
    if (bits.size() % m != 0)
        throw LengthError("bit count " + std::to_string(bits.size()) + " is not a multiple of " + std::to_string(m));
    const auto table = qam_constellation(order);
    CVector out(bits.size() / m);
    for (std::size_t k = 0; k < out.size(); ++k) {
        unsigned label = 0;
        for (unsigned b = 0; b < m; ++b)
            label = (label << 1) | (bits[k * m + b] & 1U);
        out[k] = table[label];
    }
    return out;
}

std::vector<std::uint8_t> demap_qam(std::span<const cd> symbols, unsigned order)
{
    const unsigned m = bits_per_symbol(order);
    const unsigned half = m / 2;
    const unsigned levels = axis_levels(order);
    const double norm = qam_norm(order);
    std::vector<double> level_of_label(levels);
    for (unsigned label = 0; label < levels; ++label)
        level_of_label[label] = axis_level(label, levels);

    std::vector<std::uint8_t> bits(symbols.size() * m);
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        const unsigned i_label = slice_axis(symbols[k].real() * norm, levels, level_of_label);
        const unsigned q_label = slice_axis(symbols[k].imag() * norm, levels, level_of_label);
        const unsigned label = (i_label << half) | q_label;
        for (unsigned b = 0; b < m; ++b)
            bits[k * m + b] = static_cast<std::uint8_t>((label >> (m - 1 - b)) & 1U);
    }
    return bits;
}

std::vector<std::uint8_t> make_pilot_mask(std::size_t q, std::size_t n_symbols, PilotMode mode, std::size_t spacing)
{
    std::vector<std::uint8_t> mask(q * n_symbols, 0);
    for (std::size_t s = 0; s < n_symbols; ++s) {
        for (std::size_t k = 0; k < q; ++k) {
            const bool pilot = mode == PilotMode::Block ? s == 0 : (k % spacing == 0);
            mask[s * q + k] = pilot ? 1 : 0;
        }
    }
    return mask;
}

CVector pilot_sequence(std::size_t count, std::uint64_t seed)
{
    RngStream prbs(seed, {}, "pilots");
    const auto bits = prbs.bits(2 * count);
    return map_qam(bits, 4);
}

std::size_t data_capacity(const WaveformConfig& wf, std::size_t q)
{
    const auto mask = make_pilot_mask(q, wf.n_ofdm_symbols, wf.pilot_mode, wf.pilot_spacing);
    std::size_t n = 0;
    for (auto m : mask)
        n += m == 0;
    return n;
}

ResourceGrid build_resource_grid(std::span<const std::uint8_t> bits, const WaveformConfig& wf,
                                 const SubcarrierGrid& grid, std::uint64_t seed)
{
    const std::size_t q = grid.q();
    const unsigned m = bits_per_symbol(wf.qam_order);
    const std::size_t needed = data_capacity(wf, q) * m;
    if (bits.size() != needed)
        throw ConfigError("resource grid needs exactly " + std::to_string(needed) + " bits, got " +
                          std::to_string(bits.size()));

    ResourceGrid rg;
    rg.q = q;
    rg.n_symbols = wf.n_ofdm_symbols;
    rg.pilot_mask = make_pilot_mask(q, wf.n_ofdm_symbols, wf.pilot_mode, wf.pilot_spacing);
    rg.symbols.assign(q * wf.n_ofdm_symbols, cd{});
    rg.data_bits.assign(bits.begin(), bits.end());

    std::size_t n_pilots = 0;
    for (auto v : rg.pilot_mask)
        n_pilots += v;
    rg.pilot_values = pilot_sequence(n_pilots, seed);

    const auto data = map_qam(bits, wf.qam_order);
    std::size_t next_pilot = 0, next_data = 0;
    for (std::size_t i = 0; i < rg.symbols.size(); ++i)
        rg.symbols[i] = rg.pilot_mask[i] ? rg.pilot_values[next_pilot++] : data[next_data++];
    return rg;
}

OfdmFraming make_framing(const SubcarrierGrid& grid, std::size_t cp_length, std::size_t n_symbols)
{
    return {grid.fft_size(), cp_length * grid.os(), n_symbols};
}

std::vector<CVector> symbol_spectra(const TimeWaveform& wf, const SubcarrierGrid& grid, std::size_t cp_length,
                                    std::size_t n_symbols)
{
    const auto framing = make_framing(grid, cp_length, n_symbols);
    if (wf.bulk_delay > wf.size() || wf.size() - wf.bulk_delay < framing.frame_length())
        throw LengthError("waveform holds " + std::to_string(wf.size() - std::min(wf.size(), wf.bulk_delay)) +
                          " samples after the bulk delay, frame needs " + std::to_string(framing.frame_length()));

    const std::size_t n = framing.fft_size;
    const double scale = std::sqrt(static_cast<double>(grid.q())) / static_cast<double>(n);
    std::vector<CVector> spectra(n_symbols);
    CVector body(n);
    for (std::size_t s = 0; s < n_symbols; ++s) {
        const std::size_t start = wf.bulk_delay + s * framing.symbol_length() + framing.cp;
        std::copy_n(wf.samples.begin() + static_cast<std::ptrdiff_t>(start), n, body.begin());
        fft::forward(body);
        for (auto& v : body)
            v *= scale;
        spectra[s] = fft::fftshift(body);
    }
    return spectra;
}

TimeWaveform synthesize(std::span<const CVector> spectra, const SubcarrierGrid& grid, std::size_t cp_length)
{
    const auto framing = make_framing(grid, cp_length, spectra.size());
    const std::size_t n = framing.fft_size;
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.q()));

    TimeWaveform wf;
    wf.sample_rate = grid.sample_rate();
    wf.samples.reserve(framing.frame_length());
    for (const auto& spectrum : spectra) {
        if (spectrum.size() != n)
            throw LengthError("spectrum must hold Q*os bins");
        CVector body = fft::ifftshift(spectrum);
        fft::inverse(body);
        for (auto& v : body)
            v *= scale;
        wf.samples.insert(wf.samples.end(), body.end() - static_cast<std::ptrdiff_t>(framing.cp), body.end());
        wf.samples.insert(wf.samples.end(), body.begin(), body.end());
    }
    return wf;
}

TimeWaveform ofdm_modulate(const ResourceGrid& rg, const SubcarrierGrid& grid, std::size_t cp_length)
{
    if (rg.q != grid.q())
        throw GridMismatch("resource grid has " + std::to_string(rg.q) + " subcarriers, grid has " +
                           std::to_string(grid.q()));
    if (cp_length >= grid.q())
        throw DomainError("cp_length must be smaller than Q");
    const std::size_t n = grid.fft_size();
    const std::size_t offset = grid.widened_offset();
    std::vector<CVector> spectra(rg.n_symbols, CVector(n));
    for (std::size_t s = 0; s < rg.n_symbols; ++s)
        for (std::size_t k = 0; k < rg.q; ++k)
            spectra[s][offset + k] = rg.at(k, s);
    auto wf = synthesize(spectra, grid, cp_length);
    wf.origin_tag = "ofdm_modulator";
    return wf;
}

ResourceGrid ofdm_demodulate(const TimeWaveform& wf, const SubcarrierGrid& grid, std::size_t cp_length,
                             std::size_t n_symbols)
{
    const auto framing = make_framing(grid, cp_length, n_symbols);
    if (wf.bulk_delay > wf.size() || wf.size() - wf.bulk_delay != framing.frame_length())
        throw LengthError("demodulator expects " + std::to_string(framing.frame_length()) + " samples, got " +
                          std::to_string(wf.size() - std::min(wf.size(), wf.bulk_delay)));
    const auto spectra = symbol_spectra(wf, grid, cp_length, n_symbols);
    ResourceGrid rg;
    rg.q = grid.q();
    rg.n_symbols = n_symbols;
    rg.symbols.resize(rg.q * n_symbols);
    const std::size_t offset = grid.widened_offset();
    for (std::size_t s = 0; s < n_symbols; ++s)
        for (std::size_t k = 0; k < rg.q; ++k)
            rg.at(k, s) = spectra[s][offset + k];
    return rg;
}

TimeWaveform set_power(TimeWaveform wf, double p_dbm)
{
    const double p = wf.mean_power();
    if (!(p > 0.0))
        throw ZeroSignal("cannot set the power of an all-zero waveform");
    const double g = std::sqrt(dbm_to_watts(p_dbm) / p);
    for (auto& s : wf.samples)
        s *= g;
    return wf;
}

} // namespace stripesim
