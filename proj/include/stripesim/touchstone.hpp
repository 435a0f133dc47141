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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stripesim {

using Warnings = std::vector<std::string>;

enum class SParamFormat { RI, MA, DB };
enum class FrequencyUnit { Hz, kHz, MHz, GHz };

/// Two-port S-parameters, stored as complex linear values against frequency in Hz.
struct TwoPortNetwork {
    std::vector<double> freqs;
    CVector s11, s21, s12, s22;
    double ref_impedance = 50.0;
    SParamFormat source_format = SParamFormat::RI;

    std::size_t size() const { return freqs.size(); }
    bool operator==(const TwoPortNetwork&) const = default;
};

/// h^(f) sampled on the Q subcarriers of a grid (index Q/2 is the carrier).
struct FrequencyResponse {
    SubcarrierGrid grid;
    CVector h;
};

/// First L taps of the inverse DFT of a frequency response.
struct ImpulseResponse {
    CVector h;
    double sample_rate = 0.0;
    /// Energy of the kept taps over the energy of all Q taps.
    double energy_fraction = 1.0;
};

/// Touchstone 1.x two-port reader. Comments ('!') and blank lines may appear anywhere; only the
/// first option line counts. A noise-parameter block after the data is skipped with a warning.
TwoPortNetwork parse_touchstone(std::istream& in, Warnings* warnings = nullptr);
TwoPortNetwork parse_touchstone(std::string_view text, Warnings* warnings = nullptr);

/// Throws TouchstoneError(FileNotFound) if the file cannot be opened.
TwoPortNetwork load_touchstone(const std::filesystem::path& path, Warnings* warnings = nullptr);

/// Writes the network as Touchstone 1.x text with full round-trip precision.
std::string format_touchstone(const TwoPortNetwork& net, SParamFormat format,
                              FrequencyUnit unit = FrequencyUnit::GHz);

/// Linear interpolation of Re/Im of S21 onto the subcarrier frequencies. Frequencies outside
/// the measured span take the nearest endpoint value; a single warning is emitted per call.
FrequencyResponse interpolate_s21(const TwoPortNetwork& net, const SubcarrierGrid& grid,
                                  Warnings* warnings = nullptr);

/// Flat response on the grid (used for ideal and fixed-damping elements).
FrequencyResponse flat_response(const SubcarrierGrid& grid, cd value);

/// Inverse DFT of the centered response, truncated to `taps` samples. 1 <= taps <= Q.
ImpulseResponse to_impulse_response(const FrequencyResponse& fr, std::size_t taps);

/// Smallest tap count whose truncated energy fraction reaches `fraction`.
std::size_t effective_length(const FrequencyResponse& fr, double fraction = 0.999);

} // namespace stripesim
