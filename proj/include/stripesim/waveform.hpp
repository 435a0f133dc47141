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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripesim {

enum class PilotMode { Scattered, Block };

struct WaveformConfig {
    std::string waveform_type = "cp-ofdm";
    std::size_t n_ofdm_symbols = 14;
    unsigned qam_order = 16;
    std::size_t oversampling_factor = 1;
    std::size_t cp_length = 0;  // samples at the critical rate
    std::size_t pilot_spacing = 8;
    PilotMode pilot_mode = PilotMode::Scattered;
    double tx_power_dbm = 0.0;
    double tx_power_w = 1e-3;
    /// Average pilot estimates over all OFDM symbols (channels are static within a run).
    bool average_pilots = true;
    /// Optional; when present it must agree with the environment grid.
    std::optional<std::size_t> num_subcarriers;

    /// Checks the invariants that need the subcarrier count. Throws SchemaError.
    void validate_against(std::size_t q) const;
};

/// Q x S symbol array with the pilot layout. Element (q, s) is stored at s*Q + q.
struct ResourceGrid {
    std::size_t q = 0;
    std::size_t n_symbols = 0;
    CVector symbols;
    std::vector<std::uint8_t> pilot_mask;
    /// Pilot symbols in storage order of the pilot positions.
    CVector pilot_values;
    std::vector<std::uint8_t> data_bits;

    cd& at(std::size_t k, std::size_t s) { return symbols[s * q + k]; }
    const cd& at(std::size_t k, std::size_t s) const { return symbols[s * q + k]; }
    bool is_pilot(std::size_t k, std::size_t s) const { return pilot_mask[s * q + k] != 0; }
};

unsigned bits_per_symbol(unsigned order);

/// Gray-mapped square QAM with unit average energy. Label b_0..b_{m-1} (b_0 first in the bit
/// stream) splits into an I half and a Q half; on each axis the Gray-decoded index i maps to the
/// level (sqrt(M) - 1 - 2 i). For M = 4, bits 00 map to (1 + j)/sqrt(2).
CVector map_qam(std::span<const std::uint8_t> bits, unsigned order);

/// Constellation point for every label 0..M-1 (label bits read MSB first).
CVector qam_constellation(unsigned order);

/// Minimum-distance hard decision. Points exactly between two levels go to the smaller label.
std::vector<std::uint8_t> demap_qam(std::span<const cd> symbols, unsigned order);

std::vector<std::uint8_t> make_pilot_mask(std::size_t q, std::size_t n_symbols, PilotMode mode,
                                          std::size_t spacing);

/// Unit-energy QPSK pilots from a seeded bit stream.
CVector pilot_sequence(std::size_t count, std::uint64_t seed);

/// Number of data resource elements per frame.
std::size_t data_capacity(const WaveformConfig& wf, std::size_t q);

/// Fills data positions in storage order with map_qam(bits). The bit count must match the
/// capacity exactly (ConfigError otherwise).
ResourceGrid build_resource_grid(std::span<const std::uint8_t> bits, const WaveformConfig& wf,
                                 const SubcarrierGrid& grid, std::uint64_t seed);

OfdmFraming make_framing(const SubcarrierGrid& grid, std::size_t cp_length, std::size_t n_symbols);

/// Per-symbol spectra of a framed waveform, starting at wf.bulk_delay. Each spectrum holds
/// Q*os bins in centered order, scaled so that in-band bins equal the modulated symbols.
/// Throws LengthError if the waveform is shorter than the frame.
std::vector<CVector> symbol_spectra(const TimeWaveform& wf, const SubcarrierGrid& grid,
                                    std::size_t cp_length, std::size_t n_symbols);

/// Inverse of symbol_spectra: IDFT, cyclic prefix, concatenation.
TimeWaveform synthesize(std::span<const CVector> spectra, const SubcarrierGrid& grid, std::size_t cp_length);

/// Q entries per symbol centered in a Q*os zero-padded spectrum. Mean sample power equals the
/// mean symbol power; absolute level is set afterwards with set_power.
TimeWaveform ofdm_modulate(const ResourceGrid& rg, const SubcarrierGrid& grid, std::size_t cp_length);

/// Expects exactly n_symbols*(Q + cp)*os samples after bulk_delay is removed.
ResourceGrid ofdm_demodulate(const TimeWaveform& wf, const SubcarrierGrid& grid, std::size_t cp_length,
                             std::size_t n_symbols);

/// Scales to mean |x|^2 = 10^((p_dbm - 30)/10) W (1-ohm reference). Throws ZeroSignal.
TimeWaveform set_power(TimeWaveform wf, double p_dbm);

} // namespace stripesim
