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

#include "stripesim/components.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/fft.hpp"
#include "stripesim/waveform.hpp"

#include <algorithm>
#include <cmath>

namespace stripesim {

// ----- Amplifier -----------------------------------------------------------

double noise_power(double nf_db, double bandwidth, double temperature)
{
    if (!(bandwidth > 0.0))
        throw DomainError("noise bandwidth must be positive");
    return kBoltzmann * temperature * bandwidth * (db_to_lin_power(nf_db) - 1.0);
}

cd pa_nonlinearity(cd x, const AmplifierParams& params)
{
    const double r = std::abs(x);
    const double a = params.sat_amplitude;
    auto with_phase = [&](double mag) { return r > 0.0 ? x * (mag / r) : cd{}; };

    switch (params.mode) {
    case AmplifierMode::Ideal:
        return x;
    case AmplifierMode::Tanh:
        return with_phase(a * std::tanh(r / a));
    case AmplifierMode::Atan:
        return with_phase(a * (2.0 / kPi) * std::atan((kPi / 2.0) * r / a));
    case AmplifierMode::SoftLimiter:
        return r <= a ? x : with_phase(a);
    case AmplifierMode::Polynomial: {
        cd y{};
        double r_pow = 1.0;  // |x|^(2i)
        for (const auto& c : params.poly_coeffs) {
            y += c * x * r_pow;
            r_pow *= r * r;
        }
        return y;
    }
    }
    throw UnsupportedMode("unknown amplifier mode");
}

TimeWaveform amplifier_process(const TimeWaveform& x, const AmplifierParams& params, RngStream& rng)
{
    const double bw = params.bandwidth.value_or(x.sample_rate);
    const double pn = params.nf_db != 0.0 ? noise_power(params.nf_db, bw, params.temperature) : 0.0;
    const double g = params.amplitude_gain();

    TimeWaveform y = x;
    for (auto& s : y.samples) {
        const cd in = pn > 0.0 ? s + rng.complex_gaussian(pn) : s;
        s = g * pa_nonlinearity(in, params);
    }
    return y;
}

TimeWaveform Amplifier::process(const TimeWaveform& x)
{
    if (!linear_mode_)
        return amplifier_process(x, params_, rng_);
    TimeWaveform y = x;
    const double g = params_.amplitude_gain();
    for (auto& s : y.samples)
        s *= g;
    return y;
}

// ----- DAC -----------------------------------------------------------------

double quantize_rail(double v, const DacParams& params)
{
    const double c = params.clip_amplitude;
    const double levels = std::ldexp(1.0, static_cast<int>(params.bits));
    const double step = 2.0 * c / levels;
    const double clipped = std::clamp(v, -c, c);
    const double idx = std::clamp(std::floor(clipped / step), -levels / 2.0, levels / 2.0 - 1.0);
    return (idx + 0.5) * step;
}

TimeWaveform dac_process(const TimeWaveform& x, const DacParams& params)
{
    if (params.mode == DacMode::Ideal)
        return x;
    if (params.bits < 1 || !(params.clip_amplitude > 0.0))
        throw DomainError("DAC needs bits >= 1 and a positive clip amplitude");
    TimeWaveform y = x;
    for (auto& s : y.samples)
        s = {quantize_rail(s.real(), params), quantize_rail(s.imag(), params)};
    return y;
}

// ----- Oscillator ----------------------------------------------------------

namespace {

std::vector<double> generate_phases(const OscillatorParams& params, RngStream& rng, std::size_t first_index,
                                    std::optional<double>& last_phase, std::size_t n, double sample_rate)
{
    std::vector<double> phi(n, 0.0);
    switch (params.mode) {
    case OscillatorMode::Ideal:
        break;
    case OscillatorMode::Cfo:
        for (std::size_t k = 0; k < n; ++k)
            phi[k] = params.initial_phase +
                     2.0 * kPi * params.cfo_hz * static_cast<double>(first_index + k) / sample_rate;
        break;
    case OscillatorMode::Wiener:
    case OscillatorMode::Ar1: {
        const double rho = params.mode == OscillatorMode::Wiener ? 1.0 : params.ar_rho;
        double prev = last_phase.value_or(params.initial_phase);
        for (std::size_t k = 0; k < n; ++k) {
            prev = rho * prev + params.innovation_std * rng.gaussian();
            phi[k] = prev;
        }
        last_phase = prev;
        break;
    }
    }
    return phi;
}

} // namespace

std::vector<double> Oscillator::phases(std::size_t n, double sample_rate)
{
    auto phi = generate_phases(params_, rng_, sample_index_, last_phase_, n, sample_rate);
    sample_index_ += n;
    return phi;
}

std::vector<double> oscillator_phasor(std::size_t n, const OscillatorParams& params, double sample_rate,
                                      RngStream& rng)
{
    std::optional<double> last;
    return generate_phases(params, rng, 0, last, n, sample_rate);
}

// ----- IQ modem ------------------------------------------------------------

cd IqParams::alpha() const { return (1.0 + gain_mismatch * std::polar(1.0, phase_mismatch)) / 2.0; }

cd IqParams::beta() const { return (1.0 - gain_mismatch * std::polar(1.0, phase_mismatch)) / 2.0; }

double image_rejection_ratio_db(const IqParams& params)
{
    return 10.0 * std::log10(std::norm(params.alpha()) / std::norm(params.beta()));
}

TimeWaveform iq_modem_process(const TimeWaveform& x, const IqParams& params, std::span<const double> phases)
{
    if (phases.size() != x.size())
        throw LengthError("phasor length does not match the waveform");
    const cd a = params.alpha();
    const cd b = params.beta();
    TimeWaveform y = x;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const cd s = x.samples[k];
        y.samples[k] = (a * s + b * std::conj(s)) * std::polar(1.0, phases[k]) + params.dc_offset;
    }
    return y;
}

TimeWaveform iq_receive_process(const TimeWaveform& x, const IqParams& params, std::span<const double> phases)
{
    if (phases.size() != x.size())
        throw LengthError("phasor length does not match the waveform");
    const cd a = params.alpha();
    const cd b = params.beta();
    TimeWaveform y = x;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const cd z = x.samples[k] * std::polar(1.0, -phases[k]);
        y.samples[k] = a * z + b * std::conj(z) + params.dc_offset;
    }
    return y;
}

// ----- Fiber / coupler -----------------------------------------------------

LinearElement::LinearElement(const LinearElementParams& params, const SubcarrierGrid& grid,
                             std::optional<double> length_m)
    : params_(params), grid_(grid), length_m_(length_m.value_or(params.length_m))
{
    const auto wide = grid.widened();
    const double scale = db_to_lin_amplitude(-(params.loss_db + params.loss_db_per_m * length_m_));

    switch (params.model) {
    case LinearModel::Ideal:
        response_ = flat_response(grid, 1.0);
        wide_response_ = flat_response(wide, 1.0);
        break;
    case LinearModel::FixedDamping:
        response_ = flat_response(grid, scale);
        wide_response_ = flat_response(wide, scale);
        break;
    case LinearModel::S2pFilter:
        if (!params.network)
            throw ConfigError("s2p_filter element has no S-parameter network");
        response_ = interpolate_s21(*params.network, grid);
        wide_response_ = interpolate_s21(*params.network, wide);
        for (auto& v : response_.h)
            v *= scale;
        for (auto& v : wide_response_.h)
            v *= scale;
        break;
    }
    impulse_ = to_impulse_response(wide_response_, std::clamp<std::size_t>(params.taps, 1, wide.q()));

    if (params.model != LinearModel::Ideal && params.domain == ApplyDomain::Time && length_m_ > 0.0) {
        if (!(params.group_velocity > 0.0))
            throw ConfigError("group velocity must be positive");
        delay_samples_ = static_cast<std::size_t>(std::llround(length_m_ / params.group_velocity * grid.sample_rate()));
    }
}

CVector LinearElement::apply_subcarriers(std::span<const cd> x) const
{
    if (x.size() != response_.h.size())
        throw GridMismatch("element response has " + std::to_string(response_.h.size()) + " bins, input has " +
                           std::to_string(x.size()));
    CVector y(x.size());
    for (std::size_t q = 0; q < x.size(); ++q)
        y[q] = response_.h[q] * x[q];
    return y;
}

TimeWaveform LinearElement::process(const TimeWaveform& x, std::size_t cp_length, std::size_t n_symbols) const
{
    if (params_.model == LinearModel::Ideal)
        return x;
    if (params_.domain == ApplyDomain::Time)
        return convolve_element(x, *this);

    if (params_.model == LinearModel::FixedDamping) {
        TimeWaveform y = x;
        const cd g = response_.h.front();
        for (auto& s : y.samples)
            s *= g;
        return y;
    }
    auto spectra = symbol_spectra(x, grid_, cp_length, n_symbols);
    for (auto& spectrum : spectra)
        for (std::size_t k = 0; k < spectrum.size(); ++k)
            spectrum[k] *= wide_response_.h[k];
    auto y = synthesize(spectra, grid_, cp_length);
    y.origin_tag = x.origin_tag;
    return y;
}

CVector linear_element_process(std::span<const cd> x, const LinearElement& element)
{
    return element.apply_subcarriers(x);
}

CVector convolve(std::span<const cd> x, std::span<const cd> h)
{
    if (x.empty() || h.empty())
        return {};
    const std::size_t n_out = x.size() + h.size() - 1;
    CVector y(n_out);
    if (h.size() <= 32) {
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t l = 0; l < h.size(); ++l)
                y[i + l] += x[i] * h[l];
        return y;
    }
    std::size_t m = 1;
    while (m < n_out)
        m <<= 1;
    CVector a(m), b(m);
    std::copy(x.begin(), x.end(), a.begin());
    std::copy(h.begin(), h.end(), b.begin());
    fft::forward(a);
    fft::forward(b);
    for (std::size_t k = 0; k < m; ++k)
        a[k] *= b[k];
    fft::inverse(a);
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n_out; ++i)
        y[i] = a[i] * inv;
    return y;
}

TimeWaveform convolve_element(const TimeWaveform& x, const LinearElement& element)
{
    TimeWaveform y;
    y.sample_rate = x.sample_rate;
    y.origin_tag = x.origin_tag;
    const std::size_t d = element.delay_samples();
    const auto conv = convolve(x.samples, element.impulse().h);
    y.samples.assign(d, cd{});
    y.samples.insert(y.samples.end(), conv.begin(), conv.end());
    y.bulk_delay = x.bulk_delay + d;
    return y;
}

// ----- Splitter / combiner / phase shifter ----------------------------------

std::vector<TimeWaveform> split(const TimeWaveform& x, std::size_t n)
{
    if (n == 0)
        throw DomainError("splitter needs at least one branch");
    const double g = 1.0 / std::sqrt(static_cast<double>(n));
    TimeWaveform branch = x;
    for (auto& s : branch.samples)
        s *= g;
    return std::vector<TimeWaveform>(n, branch);
}

TimeWaveform combine(std::span<const TimeWaveform> branches)
{
    if (branches.empty())
        throw DomainError("combiner needs at least one branch");
    TimeWaveform y = branches.front();
    for (std::size_t b = 1; b < branches.size(); ++b) {
        const auto& s = branches[b].samples;
        if (s.size() > y.samples.size())
            y.samples.resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
            y.samples[k] += s[k];
    }
    return y;
}

std::vector<TimeWaveform> phase_shift(std::span<const TimeWaveform> branches, std::span<const double> phases)
{
    if (phases.size() != branches.size())
        throw DimensionError("phase count does not match branch count");
    std::vector<TimeWaveform> out(branches.begin(), branches.end());
    for (std::size_t b = 0; b < out.size(); ++b) {
        const cd rot = std::polar(1.0, phases[b]);
        for (auto& s : out[b].samples)
            s *= rot;
    }
    return out;
}

// ----- Stage taps ----------------------------------------------------------

void TapStore::record(std::string label, const TimeWaveform& input, const TimeWaveform& output)
{
    if (!enabled_)
        return;
    taps_.push_back({std::move(label), input, output});
}

} // namespace stripesim
