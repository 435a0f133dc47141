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
#include "stripesim/rng.hpp"
#include "stripesim/touchstone.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripesim {

// ----- Amplifier -----------------------------------------------------------

enum class AmplifierMode { Ideal, Tanh, Atan, Polynomial, SoftLimiter };

struct AmplifierParams {
    AmplifierMode mode = AmplifierMode::Ideal;
    double gain_db = 0.0;
    double sat_amplitude = 1.0;     // volts, tanh/atan/soft_limiter
    CVector poly_coeffs;            // entry i is the coefficient of x|x|^(2i)
    double nf_db = 0.0;
    std::optional<double> bandwidth;  // Hz; defaults to the waveform sample rate
    double temperature = 290.0;

    double amplitude_gain() const { return db_to_lin_amplitude(gain_db); }
};

/// Input-referred added noise power kT*B*(F - 1) in watts.
double noise_power(double nf_db, double bandwidth, double temperature = 290.0);

/// Memoryless nonlinearity f_PA, without gain or noise.
cd pa_nonlinearity(cd x, const AmplifierParams& params);

/// y = G * f_PA(x + w) for every sample; w ~ CN(0, noise_power) drawn from rng.
TimeWaveform amplifier_process(const TimeWaveform& x, const AmplifierParams& params, RngStream& rng);

/// Amplifier instance owning its noise stream. Linear mode bypasses nonlinearity and noise
/// (used for small-signal gain calibration).
class Amplifier {
public:
    Amplifier(AmplifierParams params, RngStream rng) : params_(std::move(params)), rng_(std::move(rng)) {}

    TimeWaveform process(const TimeWaveform& x);

    const AmplifierParams& params() const { return params_; }
    void set_gain_db(double gain_db) { params_.gain_db = gain_db; }
    void set_linear_mode(bool on) { linear_mode_ = on; }
    std::uint64_t stream_seed() const { return rng_.seed(); }

private:
    AmplifierParams params_;
    RngStream rng_;
    bool linear_mode_ = false;
};

// ----- DAC -----------------------------------------------------------------

enum class DacMode { Ideal, Quantizer };

struct DacParams {
    DacMode mode = DacMode::Ideal;
    unsigned bits = 12;
    double clip_amplitude = 1.0;  // volts per rail
    /// When set, the clip level is placed this many dB above the per-rail RMS of the signal
    /// the DAC is configured for (resolved by the stripe builder).
    std::optional<double> clip_db_above_rms;
};

/// Per rail: clip to [-c, c], then mid-rise quantization with 2^bits levels.
TimeWaveform dac_process(const TimeWaveform& x, const DacParams& params);

double quantize_rail(double v, const DacParams& params);

// ----- Oscillator ----------------------------------------------------------

enum class OscillatorMode { Ideal, Cfo, Wiener, Ar1 };

struct OscillatorParams {
    OscillatorMode mode = OscillatorMode::Ideal;
    double cfo_hz = 0.0;
    double ar_rho = 1.0;
    double innovation_std = 0.0;  // rad per sample
    double initial_phase = 0.0;
};

/// Phase generator. Successive calls continue the phase trajectory.
class Oscillator {
public:
    Oscillator(OscillatorParams params, RngStream rng) : params_(params), rng_(std::move(rng)) {}

    std::vector<double> phases(std::size_t n, double sample_rate);

    const OscillatorParams& params() const { return params_; }

private:
    OscillatorParams params_;
    RngStream rng_;
    std::size_t sample_index_ = 0;
    std::optional<double> last_phase_;
};

/// One-shot phase sequence from a fresh oscillator state.
std::vector<double> oscillator_phasor(std::size_t n, const OscillatorParams& params, double sample_rate,
                                      RngStream& rng);

// ----- IQ modem ------------------------------------------------------------

struct IqParams {
    double gain_mismatch = 1.0;    // g
    double phase_mismatch = 0.0;   // rad
    cd dc_offset{0.0, 0.0};

    cd alpha() const;
    cd beta() const;
};

/// |alpha / beta|^2 in dB (infinite for a balanced modem).
double image_rejection_ratio_db(const IqParams& params);

/// Transmit mixing: y = (alpha x + beta conj(x)) e^{j phi} + d.
TimeWaveform iq_modem_process(const TimeWaveform& x, const IqParams& params, std::span<const double> phases);

/// Receive mixing: z = x e^{-j phi}, y = alpha z + beta conj(z) + d.
TimeWaveform iq_receive_process(const TimeWaveform& x, const IqParams& params, std::span<const double> phases);

// ----- Fiber / coupler -----------------------------------------------------

enum class LinearModel { Ideal, FixedDamping, S2pFilter };
enum class ApplyDomain { Frequency, Time };

struct LinearElementParams {
    LinearModel model = LinearModel::Ideal;
    double loss_db = 0.0;
    double loss_db_per_m = 0.0;
    ApplyDomain domain = ApplyDomain::Frequency;
    double length_m = 0.0;
    double group_velocity = 2e8;
    std::size_t taps = 256;
    std::string file;
    std::shared_ptr<const TwoPortNetwork> network;
};

/// A fiber segment or coupler prepared for one subcarrier grid.
class LinearElement {
public:
    /// `length_m` overrides params.length_m (fiber segments carry their own length).
    LinearElement(const LinearElementParams& params, const SubcarrierGrid& grid,
                  std::optional<double> length_m = std::nullopt);

    const LinearElementParams& params() const { return params_; }
    double length_m() const { return length_m_; }

    /// h^(f) on the Q subcarriers.
    const FrequencyResponse& response() const { return response_; }
    /// Response over the full simulated band (Q*os bins, centered).
    const FrequencyResponse& wide_response() const { return wide_response_; }
    /// Taps at the simulation rate, derived from wide_response().
    const ImpulseResponse& impulse() const { return impulse_; }
    std::size_t delay_samples() const { return delay_samples_; }

    /// Hadamard product with h^(f). Throws GridMismatch unless x has Q entries.
    CVector apply_subcarriers(std::span<const cd> x) const;

    /// Applies the element to a framed CP-OFDM waveform in the configured domain.
    TimeWaveform process(const TimeWaveform& x, std::size_t cp_length, std::size_t n_symbols) const;

private:
    LinearElementParams params_;
    SubcarrierGrid grid_;
    double length_m_ = 0.0;
    FrequencyResponse response_;
    FrequencyResponse wide_response_;
    ImpulseResponse impulse_;
    std::size_t delay_samples_ = 0;
};

/// Per-subcarrier application (frequency-domain form).
CVector linear_element_process(std::span<const cd> x, const LinearElement& element);

/// Time-domain application of an element regardless of its configured domain: linear
/// convolution with impulse() followed by the propagation delay.
TimeWaveform convolve_element(const TimeWaveform& x, const LinearElement& element);

/// Linear convolution (direct for short filters, FFT-based otherwise).
CVector convolve(std::span<const cd> x, std::span<const cd> h);

// ----- Splitter / combiner / phase shifter ----------------------------------

std::vector<TimeWaveform> split(const TimeWaveform& x, std::size_t n);

/// Elementwise sum; branches of different lengths are zero-extended.
TimeWaveform combine(std::span<const TimeWaveform> branches);

std::vector<TimeWaveform> phase_shift(std::span<const TimeWaveform> branches, std::span<const double> phases);

// ----- Stage taps ----------------------------------------------------------

struct StageTap {
    std::string label;
    TimeWaveform input;
    TimeWaveform output;
};

class TapStore {
public:
    explicit TapStore(bool enabled = false) : enabled_(enabled) {}

    bool enabled() const { return enabled_; }
    void record(std::string label, const TimeWaveform& input, const TimeWaveform& output);
    const std::vector<StageTap>& taps() const { return taps_; }

private:
    bool enabled_;
    std::vector<StageTap> taps_;
};

} // namespace stripesim
