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

#include "stripesim/channel.hpp"
#include "stripesim/components.hpp"
#include "stripesim/config.hpp"
#include "stripesim/dataset.hpp"
#include "stripesim/metrics.hpp"
#include "stripesim/waveform.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stripesim {

enum class Direction { Downlink, Uplink };
enum class RuMode { Booster, Active, Bypass };

std::string to_string(Direction d);
Direction parse_direction(const std::string& tag);

/// Modes of all RUs for one run: boosters before the active RU, bypass after it.
std::vector<RuMode> ru_modes(std::size_t n_rus, std::size_t active_ru);

// ----- Topology ----------------------------------------------------------------

struct RuChain {
    std::size_t ru_id = 0;
    Vec3 position;
    LinearElement input_coupler;
    LinearElement output_coupler;
    Amplifier booster;
    std::vector<Amplifier> antenna_amplifiers;
};

struct CuChain {
    DacParams dac;
    IqParams iq;
    Oscillator oscillator;
    Amplifier amplifier;
};

/// One stripe instantiated for a run direction. Every stochastic component owns an RNG stream
/// keyed by (seed, stripe, node, direction, element).
struct StripeTopology {
    std::size_t stripe_id = 0;
    Direction direction = Direction::Downlink;
    SubcarrierGrid grid;
    std::size_t cp_length = 0;
    std::size_t n_symbols = 0;
    std::size_t n_antennas = 1;
    Vec3 cu_position;
    CuChain cu;
    /// fiber_segments[i] feeds RU i: CU -> RU0 has central_unit_fiber_length, later segments
    /// the inter-node distance.
    std::vector<LinearElement> fiber_segments;
    std::vector<RuChain> rus;
    ReceiverParams receiver;
    RngStream receiver_rng;

    std::vector<double> segment_lengths() const;
};

/// `reference_power_w` resolves a DAC clip level given in dB above RMS. Throws ConfigError.
StripeTopology build_stripe(const EnvironmentConfig& env, const ComponentBank& comp, std::size_t stripe_id,
                            const SubcarrierGrid& grid, const WaveformConfig& wf, std::uint64_t seed,
                            Direction direction = Direction::Downlink);

// ----- Calibration -----------------------------------------------------------------

struct CalibrationResult {
    std::vector<double> gains_db;
    std::vector<bool> clipped;
    std::vector<double> input_power_dbm;   // at each booster input
    std::vector<double> output_power_dbm;  // at each booster output
    std::vector<std::string> warnings;     // one per infeasible stage
};

/// Front-to-back small-signal calibration of every RU booster. A reference frame whose passband
/// power equals the target enters the first fiber segment; each booster gain becomes min(target / P_in, max_gain)
/// and is applied before the next stage is measured. Nonlinearity and noise are bypassed.
CalibrationResult calibrate_gains(StripeTopology& topology, double target_power_dbm, double max_gain_db,
                                  std::uint64_t seed = 0);

void apply_gains(StripeTopology& topology, const std::vector<double>& gains_db);

// ----- Propagation -------------------------------------------------------------------

/// Transmit phases from the principal right singular vector of H at subcarrier `q_index`.
std::vector<double> matched_beam_phases(const ChannelRealization& channel, std::size_t q_index);

/// Phases that co-phase the effective per-UE-antenna channels sum_m H[k, m] e^{j theta_m}.
std::vector<double> ue_combining_phases(const ChannelRealization& channel, std::span<const double> beam_phases,
                                        std::size_t q_index);

/// CU chain, fiber and boosters up to the active RU, then splitter, phase shifters and antenna
/// amplifiers. Returns one waveform per RU antenna.
std::vector<TimeWaveform> propagate_downlink(const TimeWaveform& x, StripeTopology& topology, std::size_t active_ru,
                                             std::span<const double> beam_phases, TapStore& taps);

/// In-band spectra of the antenna waveforms through the channel, receiver noise per UE antenna,
/// then co-phased combining. Returns the received Q x S symbol grid (no pilot layout).
ResourceGrid downlink_air(std::span<const TimeWaveform> antenna_waveforms, StripeTopology& topology,
                          const ChannelRealization& channel, std::span<const double> ue_phases);

/// UE waveform through the channel (reciprocal: H transposed) to per-RU-antenna waveforms, with
/// receiver noise added at the RU antennas.
std::vector<TimeWaveform> uplink_air(const TimeWaveform& ue_waveform, StripeTopology& topology,
                                     const ChannelRealization& channel, std::span<const double> ue_phases);

/// Antenna amplifiers, phase shifters and combiner at the active RU, then coupler, fiber and the
/// boosters back to the CU, where the oscillator/IQ receive mixing and the CU amplifier apply.
TimeWaveform propagate_uplink(std::span<const TimeWaveform> antenna_waveforms, StripeTopology& topology,
                              std::size_t active_ru, std::span<const double> beam_phases, TapStore& taps);

/// Strips the bulk delay and trailing samples so exactly one frame remains.
TimeWaveform receiver_frame(const TimeWaveform& x, const SubcarrierGrid& grid, std::size_t cp_length,
                            std::size_t n_symbols);

// ----- End-to-end link --------------------------------------------------------------

enum class ChannelModel { Identity, Los, Rayleigh, Tdl, Dataset };

struct ChannelSource {
    ChannelModel model = ChannelModel::Los;
    TdlParams tdl;
    /// Required for ChannelModel::Dataset.
    const CfrDataset* dataset = nullptr;
    /// Position match tolerance for dataset lookups (m).
    double tolerance = 1e-3;
};

std::string to_string(ChannelModel m);

struct LinkOptions {
    std::size_t ue_index = 0;
    std::size_t stripe_id = 0;
    std::size_t active_ru = 0;
    Direction direction = Direction::Downlink;
    std::uint64_t seed = 0;
    bool record_taps = false;
    /// Adds white noise to the combined received grid at this SNR (signal power measured on the
    /// noiseless grid).
    std::optional<double> snr_db;
    /// RU phase-shifter settings; matched to the channel when absent.
    std::optional<std::vector<double>> beam_phases;
    bool error_spectrum = false;
};

struct LinkResult {
    ResourceGrid tx_grid;
    ResourceGrid rx_grid;
    std::vector<StageTap> stage_taps;
    MetricReport metrics;
    std::vector<TimeWaveform> antenna_waveforms;
    ChannelRealization channel;
    std::vector<double> beam_phases;
    std::vector<double> ue_phases;
    std::optional<CalibrationResult> calibration;
};

/// The channel a link would use (downlink orientation: rx = UE antennas, tx = RU antennas).
ChannelRealization link_channel(const EnvironmentConfig& env, const SubcarrierGrid& grid, const ChannelSource& source,
                                const LinkOptions& options);

LinkResult run_link(const EnvironmentConfig& env, const WaveformConfig& wf, const ComponentBank& comp,
                    const ChannelSource& source, const LinkOptions& options);

} // namespace stripesim
