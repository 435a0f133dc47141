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
#include "stripesim/geometry.hpp"
#include "stripesim/grid.hpp"
#include "stripesim/waveform.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Loading of the three scenario files: environment.yaml, waveform.yaml and components.yaml.
// Keys are matched case-insensitively, so both `n_rus` and `N_RUs` are accepted. Unknown keys
// produce warnings and are otherwise ignored.
namespace stripesim {

enum class NodeKind { CentralUnit, RadioUnit };

struct Node {
    NodeKind kind = NodeKind::RadioUnit;
    Vec3 position;

    bool operator==(const Node&) const = default;
};

struct StripeLayout {
    std::size_t n_stripes = 0;
    std::size_t n_rus = 0;
    double inter_ru_spacing = 0.0;
    double inter_stripe_spacing = 0.0;
    std::optional<Vec3> start_position;
    std::optional<Vec3> end_position;
    std::string orientation = "x";

    bool operator==(const StripeLayout&) const = default;
};

struct SubThzBand {
    double fc = 0.0;
    double bw = 0.0;
    std::size_t num_subcarriers = 0;

    bool operator==(const SubThzBand&) const = default;
};

struct AntennaConfig {
    std::size_t n_antennas = 4;
    std::size_t ue_antennas = 4;
    std::string polarization = "V";
    PatternKind pattern = PatternKind::Isotropic;
    Vec3 ru_boresight{0.0, 0.0, -1.0};
    Vec3 ue_boresight{0.0, 0.0, 1.0};

    bool operator==(const AntennaConfig&) const = default;
};

struct EnvironmentConfig {
    Vec3 room;
    StripeLayout stripe_config;
    /// Each stripe starts with its central unit, followed by the radio units in order.
    std::vector<std::vector<Node>> radio_stripes;
    std::vector<Vec3> ue_positions;
    std::optional<SubThzBand> sub_thz;
    AntennaConfig antenna;
    double central_unit_fiber_length = 0.0;
    /// Parsed but never used by the simulation; kept verbatim for snapshots.
    std::string sub10ghz_yaml;

    std::size_t n_stripes() const { return radio_stripes.size(); }
    std::size_t n_rus(std::size_t stripe) const { return radio_stripes.at(stripe).size() - 1; }
    /// Unit vector along which the stripe runs (and RU arrays are laid out).
    Vec3 stripe_axis() const;

    bool operator==(const EnvironmentConfig&) const = default;
};

struct CalibrationParams {
    bool enabled = false;
    double target_power_dbm = 0.0;
    double max_gain_db = 30.0;

    bool operator==(const CalibrationParams&) const = default;
};

/// Noise floor added after the wireless channel.
struct ReceiverParams {
    bool thermal = false;
    double nf_db = 0.0;
    double temperature = 290.0;

    bool operator==(const ReceiverParams&) const = default;
};

struct ComponentBank {
    AmplifierParams boost_amplifier;
    AmplifierParams antenna_amplifier;
    AmplifierParams cu_amplifier;
    LinearElementParams fiber;
    LinearElementParams coupler;
    DacParams dac;
    OscillatorParams oscillator;
    IqParams iq_modem;
    CalibrationParams calibration;
    ReceiverParams receiver;
};

bool operator==(const AmplifierParams& a, const AmplifierParams& b);
bool operator==(const LinearElementParams& a, const LinearElementParams& b);
bool operator==(const DacParams& a, const DacParams& b);
bool operator==(const OscillatorParams& a, const OscillatorParams& b);
bool operator==(const IqParams& a, const IqParams& b);
bool operator==(const ComponentBank& a, const ComponentBank& b);
bool operator==(const WaveformConfig& a, const WaveformConfig& b);

// ----- Loading ---------------------------------------------------------------

EnvironmentConfig load_environment(const std::filesystem::path& path, Warnings* warnings = nullptr);
EnvironmentConfig parse_environment(std::string_view yaml, Warnings* warnings = nullptr);

/// `num_subcarriers`, when known, enables the cp_length / pilot_spacing checks.
WaveformConfig load_waveform(const std::filesystem::path& path, std::optional<std::size_t> num_subcarriers = {},
                             Warnings* warnings = nullptr);
WaveformConfig parse_waveform(std::string_view yaml, std::optional<std::size_t> num_subcarriers = {},
                              Warnings* warnings = nullptr);

/// S-parameter files are resolved relative to the file's directory and parsed eagerly.
ComponentBank load_components(const std::filesystem::path& path, Warnings* warnings = nullptr);
ComponentBank parse_components(std::string_view yaml, const std::filesystem::path& base_dir,
                               Warnings* warnings = nullptr);

// ----- Serialization -----------------------------------------------------------

std::string to_yaml(const EnvironmentConfig& env);
std::string to_yaml(const WaveformConfig& wf);
/// S-parameter paths are written as absolute paths.
std::string to_yaml(const ComponentBank& bank);

// ----- Cross validation --------------------------------------------------------

struct ValidationIssue {
    std::string code;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    bool ok() const { return errors.empty(); }
    bool has_error(std::string_view code) const;
    bool has_warning(std::string_view code) const;
    bool operator==(const ValidationReport&) const = default;
};

/// Shape of an attached channel dataset, if any.
struct DatasetShape {
    std::size_t n_stripes = 0;
    std::size_t n_rus = 0;
    std::size_t n_rx = 0;
    std::size_t n_tx = 0;
    std::size_t q = 0;
    double fc = 0.0;
    double bw = 0.0;
};

ValidationReport validate_cross(const EnvironmentConfig& env, const WaveformConfig& wf, const ComponentBank& comp,
                                const std::optional<DatasetShape>& dataset = std::nullopt);

/// Simulation grid from the environment (or the dataset when the environment has no sub_thz
/// block) and the waveform oversampling. Throws ConfigError when neither supplies one.
SubcarrierGrid resolve_grid(const EnvironmentConfig& env, const WaveformConfig& wf,
                            const std::optional<DatasetShape>& dataset = std::nullopt);

} // namespace stripesim
