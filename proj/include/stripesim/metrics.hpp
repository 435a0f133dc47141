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

#include "stripesim/components.hpp"
#include "stripesim/grid.hpp"
#include "stripesim/waveform.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripesim {

// ----- Estimation and equalization ----------------------------------------------

/// Pilot positions and values as known to the receiver.
struct PilotLayout {
    std::size_t q = 0;
    std::size_t n_symbols = 0;
    std::vector<std::uint8_t> mask;  // s*q + k
    CVector values;                  // in storage order of the pilot positions
};

/// Regenerates the transmitter's layout from the waveform configuration and pilot seed.
PilotLayout make_pilot_layout(const WaveformConfig& wf, std::size_t q, std::uint64_t seed);
PilotLayout pilot_layout_of(const ResourceGrid& tx);

/// Per-symbol channel estimate, element (k, s) at s*q + k.
struct ChannelEstimate {
    std::size_t q = 0;
    std::size_t n_symbols = 0;
    CVector h;

    const cd& at(std::size_t k, std::size_t s) const { return h[s * q + k]; }
};

/// Least-squares estimates at the pilots, linearly interpolated across subcarriers with the
/// nearest pilot value beyond the outermost pilots. With `average` the per-subcarrier estimates
/// are averaged over every symbol carrying a pilot on that subcarrier and applied to all symbols;
/// otherwise each symbol uses its own pilots (or the nearest pilot-bearing symbol). Throws
/// NoPilots.
ChannelEstimate estimate_channel(const ResourceGrid& rx, const PilotLayout& layout, bool average = true);

inline constexpr double kErasureThreshold = 1e-12;

struct Equalized {
    CVector symbols;                  // data positions in storage order
    std::vector<std::uint8_t> erased; // one flag per data symbol
};

/// Zero-forcing: y / H on data positions. |H| below kErasureThreshold marks an erasure (the
/// symbol is set to zero).
Equalized equalize(const ResourceGrid& rx, const ChannelEstimate& estimate, const PilotLayout& layout);

/// Hard decisions; erased symbols receive bits from a stream keyed by `seed`.
std::vector<std::uint8_t> detect_bits(const Equalized& eq, unsigned qam_order, std::uint64_t seed);

/// Data symbols of a grid in storage order.
CVector data_symbols(const ResourceGrid& rg, const PilotLayout& layout);

// ----- Figures of merit -------------------------------------------------------------

inline constexpr double kNmseFloorDb = -200.0;

/// 10 log10(sum |s_hat - s|^2 / sum |s|^2), never below kNmseFloorDb. Throws ZeroSignal if the
/// reference is all zero and LengthError on a size mismatch.
double nmse_db(std::span<const cd> reference, std::span<const cd> estimate);
inline double sndr_db(double nmse) { return -nmse; }
double evm_percent(double nmse);

/// Hamming distance over length; 0 for empty input. Throws LengthError on a size mismatch.
double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);
std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

struct MetricReport {
    double nmse_db = 0.0;
    double sndr_db = 0.0;
    double evm_percent = 0.0;
    double ber = 0.0;
    std::size_t n_bits = 0;
    std::size_t bit_errors = 0;
    /// Mean |s_hat - s|^2 / mean |s|^2 per subcarrier (dB), when requested.
    std::optional<std::vector<double>> error_spectrum_db;
};

struct LinkEvaluation {
    MetricReport report;
    ChannelEstimate estimate;
    Equalized equalized;
    std::vector<std::uint8_t> rx_bits;
};

/// Estimation, equalization, detection and metrics for one received grid.
LinkEvaluation evaluate_link(const ResourceGrid& tx, const ResourceGrid& rx, const WaveformConfig& wf,
                             std::uint64_t seed, bool error_spectrum = false);

/// Identifiers attached to serialized reports.
struct RunIds {
    std::size_t stripe_id = 0;
    std::size_t ru_id = 0;
    std::size_t ue_id = 0;
    std::uint64_t seed = 0;
    std::string direction = "dl";
};

std::vector<std::string> metric_columns();
std::vector<std::string> metric_row(const MetricReport& r, const RunIds& ids);
std::string metrics_csv(const MetricReport& r, const RunIds& ids);
std::string metrics_json(const MetricReport& r, const RunIds& ids);

// ----- AM/AM and AM/PM ------------------------------------------------------------

struct AmCurve {
    std::string label;
    std::vector<double> x;  // |input|
    std::vector<double> y;  // |output| (AM/AM) or output minus input phase in rad (AM/PM)
};

/// Pairs input sample bulk_delay_in + i with output sample bulk_delay_out + i, keeping every
/// `decimation`-th pair.
AmCurve am_am_pair(const TimeWaveform& in, const TimeWaveform& out, std::size_t decimation = 1);
AmCurve am_pm_pair(const TimeWaveform& in, const TimeWaveform& out, std::size_t decimation = 1);

std::vector<AmCurve> am_am_extract(std::span<const StageTap> taps, std::size_t decimation = 1);
std::vector<AmCurve> am_pm_extract(std::span<const StageTap> taps, std::size_t decimation = 1);

/// Shape summary of an AM/AM cloud.
struct AmStats {
    double small_signal_gain = 0.0;  // LS slope through the origin over the lowest quartile of x
    /// Mean output power of the top 1% drive samples over the small-signal extrapolation.
    double compression = 1.0;
    /// Variance of y about a per-bin linear fit in x, relative to mean y^2.
    double scatter = 0.0;
};

AmStats am_am_stats(const AmCurve& curve, std::size_t bins = 64);

/// "xstage0,ystage0,xstage1,..." table; shorter curves leave cells empty.
std::string am_curves_csv(std::span<const AmCurve> curves);

} // namespace stripesim
