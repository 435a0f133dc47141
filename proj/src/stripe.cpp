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

#include "stripesim/stripe.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/log.hpp"

#include <algorithm>
#include <cmath>

namespace stripesim {
namespace {

enum : std::uint64_t { kElemBooster = 1, kElemAntenna = 100 };

RngStream component_rng(std::uint64_t seed, std::size_t stripe, std::size_t node, Direction dir, std::uint64_t elem,
                        std::string_view tag)
{
    return RngStream(seed, {stripe, node, static_cast<std::uint64_t>(dir), elem}, tag);
}

std::string ru_label(std::size_t ru, std::string_view what) { return "ru" + std::to_string(ru) + "_" + std::string(what); }

// Applies one stage and records it.
class StageRunner {
public:
    StageRunner(TimeWaveform x, TapStore& taps) : signal_(std::move(x)), taps_(taps) {}

    template <typename F>
    void operator()(const std::string& label, F&& f)
    {
        TimeWaveform y = f(signal_);
        taps_.record(label, signal_, y);
        signal_ = std::move(y);
    }

    TimeWaveform& signal() { return signal_; }

private:
    TimeWaveform signal_;
    TapStore& taps_;
};

double in_band_power(const TimeWaveform& x, const SubcarrierGrid& grid, std::size_t cp, std::size_t nsym)
{
    const auto spectra = symbol_spectra(x, grid, cp, nsym);
    const std::size_t offset = grid.widened_offset();
    double p = 0.0;
    for (const auto& s : spectra)
        for (std::size_t k = 0; k < grid.q(); ++k)
            p += std::norm(s[offset + k]);
    return p / static_cast<double>(grid.q() * nsym);
}

double to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

} // namespace

std::string to_string(Direction d) { return d == Direction::Downlink ? "dl" : "ul"; }

Direction parse_direction(const std::string& tag)
{
    if (tag == "dl" || tag == "downlink")
        return Direction::Downlink;
    if (tag == "ul" || tag == "uplink")
        return Direction::Uplink;
    throw UnsupportedMode("direction must be dl or ul, got '" + tag + "'");
}

std::vector<RuMode> ru_modes(std::size_t n_rus, std::size_t active_ru)
{
    if (active_ru >= n_rus)
        throw ConfigError("active RU " + std::to_string(active_ru) + " out of range");
    std::vector<RuMode> modes(n_rus, RuMode::Bypass);
    for (std::size_t i = 0; i < active_ru; ++i)
        modes[i] = RuMode::Booster;
    modes[active_ru] = RuMode::Active;
    return modes;
}

std::vector<double> StripeTopology::segment_lengths() const
{
    std::vector<double> out;
    for (const auto& f : fiber_segments)
        out.push_back(f.length_m());
    return out;
}

StripeTopology build_stripe(const EnvironmentConfig& env, const ComponentBank& comp, std::size_t stripe_id,
                            const SubcarrierGrid& grid, const WaveformConfig& wf, std::uint64_t seed,
                            Direction direction)
{
    if (stripe_id >= env.n_stripes())
        throw ConfigError("stripe " + std::to_string(stripe_id) + " out of range (" +
                          std::to_string(env.n_stripes()) + " stripes)");
    const auto& nodes = env.radio_stripes[stripe_id];
    const std::size_t n_rus = nodes.size() - 1;
    const std::size_t n_ant = env.antenna.n_antennas;

    DacParams dac = comp.dac;
    if (dac.clip_db_above_rms)
        dac.clip_amplitude = std::sqrt(wf.tx_power_w / 2.0) * db_to_lin_amplitude(*dac.clip_db_above_rms);

    StripeTopology t{
        .stripe_id = stripe_id,
        .direction = direction,
        .grid = grid,
        .cp_length = wf.cp_length,
        .n_symbols = wf.n_ofdm_symbols,
        .n_antennas = n_ant,
        .cu_position = nodes.front().position,
        .cu = CuChain{dac, comp.iq_modem,
                      Oscillator(comp.oscillator, component_rng(seed, stripe_id, 0, direction, 0, "oscillator")),
                      Amplifier(comp.cu_amplifier, component_rng(seed, stripe_id, 0, direction, 0, "cu_amplifier"))},
        .fiber_segments = {},
        .rus = {},
        .receiver = comp.receiver,
        .receiver_rng = RngStream(seed, {stripe_id, static_cast<std::uint64_t>(direction)}, "receiver_noise"),
    };

    for (std::size_t i = 0; i < n_rus; ++i) {
        const double len = i == 0 ? env.central_unit_fiber_length : distance(nodes[i].position, nodes[i + 1].position);
        if (!(len > 0.0))
            throw ConfigError("fiber segment " + std::to_string(i) + " of stripe " + std::to_string(stripe_id) +
                              " has zero length");
        t.fiber_segments.emplace_back(comp.fiber, grid, len);

        const std::size_t node = i + 1;
        std::vector<Amplifier> ant;
        for (std::size_t m = 0; m < n_ant; ++m)
            ant.emplace_back(comp.antenna_amplifier,
                             component_rng(seed, stripe_id, node, direction, kElemAntenna + m, "antenna_amplifier"));
        t.rus.push_back(RuChain{
            .ru_id = i,
            .position = nodes[node].position,
            .input_coupler = LinearElement(comp.coupler, grid),
            .output_coupler = LinearElement(comp.coupler, grid),
            .booster = Amplifier(comp.boost_amplifier,
                                 component_rng(seed, stripe_id, node, direction, kElemBooster, "booster")),
            .antenna_amplifiers = std::move(ant),
        });
    }
    return t;
}

CalibrationResult calibrate_gains(StripeTopology& t, double target_power_dbm, double max_gain_db, std::uint64_t seed)
{
    const SubcarrierGrid& grid = t.grid;
    const std::size_t cp = t.cp_length;
    const std::size_t nsym = std::min<std::size_t>(t.n_symbols, 4);

    // Reference frame: random QPSK on every subcarrier.
    ResourceGrid ref;
    ref.q = grid.q();
    ref.n_symbols = nsym;
    RngStream rng(seed, {t.stripe_id}, "calibration_reference");
    ref.symbols = map_qam(rng.bits(2 * grid.q() * nsym), 4);
    ref.pilot_mask.assign(ref.symbols.size(), 0);
    const double target_w = dbm_to_watts(target_power_dbm);
    TimeWaveform x = ofdm_modulate(ref, grid, cp);
    const double scale = std::sqrt(target_w / in_band_power(x, grid, cp, nsym));
    for (auto& v : x.samples)
        v *= scale;
    CalibrationResult res;
    for (auto& ru : t.rus)
        ru.booster.set_linear_mode(true);

    for (std::size_t i = 0; i < t.rus.size(); ++i) {
        auto& ru = t.rus[i];
        x = t.fiber_segments[i].process(x, cp, nsym);
        x = ru.input_coupler.process(x, cp, nsym);
        const double p_in = in_band_power(x, grid, cp, nsym);
        if (!(p_in > 0.0))
            throw ZeroSignal("no signal reaches booster " + std::to_string(i) + " during calibration");
        double gain_db = 10.0 * std::log10(target_w / p_in);
        const bool clipped = gain_db > max_gain_db;
        if (clipped) {
            gain_db = max_gain_db;
            res.warnings.push_back("CalibrationInfeasible: stripe " + std::to_string(t.stripe_id) + " RU " +
                                   std::to_string(i) + " needs " + std::to_string(10.0 * std::log10(target_w / p_in)) +
                                   " dB, limited to " + std::to_string(max_gain_db) + " dB");
            log().warn("{}", res.warnings.back());
        }
        ru.booster.set_gain_db(gain_db);
        x = ru.booster.process(x);
        const double p_out = in_band_power(x, grid, cp, nsym);
        res.gains_db.push_back(gain_db);
        res.clipped.push_back(clipped);
        res.input_power_dbm.push_back(to_dbm(p_in));
        res.output_power_dbm.push_back(to_dbm(p_out));
        x = ru.output_coupler.process(x, cp, nsym);
    }

    for (auto& ru : t.rus)
        ru.booster.set_linear_mode(false);
    return res;
}

void apply_gains(StripeTopology& t, const std::vector<double>& gains_db)
{
    if (gains_db.size() != t.rus.size())
        throw DimensionError("gain count does not match the RU count");
    for (std::size_t i = 0; i < gains_db.size(); ++i)
        t.rus[i].booster.set_gain_db(gains_db[i]);
}

std::vector<double> matched_beam_phases(const ChannelRealization& ch, std::size_t q_index)
{
    const std::size_t nt = ch.n_tx, nr = ch.n_rx;
    CVector v(nt, cd(1.0 / std::sqrt(static_cast<double>(nt)), 0.0));
    for (int it = 0; it < 64; ++it) {
        CVector u(nr);
        for (std::size_t k = 0; k < nr; ++k)
            for (std::size_t m = 0; m < nt; ++m)
                u[k] += ch.at(q_index, k, m) * v[m];
        CVector w(nt);
        for (std::size_t m = 0; m < nt; ++m)
            for (std::size_t k = 0; k < nr; ++k)
                w[m] += std::conj(ch.at(q_index, k, m)) * u[k];
        double norm = 0.0;
        for (const auto& e : w)
            norm += std::norm(e);
        if (!(norm > 0.0))
            return std::vector<double>(nt, 0.0);
        norm = std::sqrt(norm);
        for (std::size_t m = 0; m < nt; ++m)
            v[m] = w[m] / norm;
    }
    std::vector<double> phases(nt, 0.0);
    const double ref = std::arg(v[0]);
    for (std::size_t m = 0; m < nt; ++m)
        phases[m] = std::abs(v[m]) > 0.0 ? std::remainder(std::arg(v[m]) - ref, 2.0 * kPi) : 0.0;
    return phases;
}

std::vector<double> ue_combining_phases(const ChannelRealization& ch, std::span<const double> beam_phases,
                                        std::size_t q_index)
{
    if (beam_phases.size() != ch.n_tx)
        throw DimensionError("beam phase count does not match the RU antenna count");
    std::vector<double> phases(ch.n_rx, 0.0);
    for (std::size_t k = 0; k < ch.n_rx; ++k) {
        cd g{};
        for (std::size_t m = 0; m < ch.n_tx; ++m)
            g += ch.at(q_index, k, m) * std::polar(1.0, beam_phases[m]);
        phases[k] = std::abs(g) > 0.0 ? -std::arg(g) : 0.0;
    }
    return phases;
}

std::vector<TimeWaveform> propagate_downlink(const TimeWaveform& x, StripeTopology& t, std::size_t active_ru,
                                             std::span<const double> beam_phases, TapStore& taps)
{
    if (active_ru >= t.rus.size())
        throw ConfigError("active RU " + std::to_string(active_ru) + " out of range");
    if (beam_phases.size() != t.n_antennas)
        throw DimensionError("beam phase count does not match the RU antenna count");
    const std::size_t cp = t.cp_length, nsym = t.n_symbols;
    const double fs = t.grid.sample_rate();

    StageRunner run(x, taps);
    run("cu_dac", [&](const TimeWaveform& s) { return dac_process(s, t.cu.dac); });
    run("cu_iq_modem", [&](const TimeWaveform& s) {
        const auto phi = t.cu.oscillator.phases(s.size(), fs);
        return iq_modem_process(s, t.cu.iq, phi);
    });
    run("cu_amplifier", [&](const TimeWaveform& s) { return t.cu.amplifier.process(s); });

    for (std::size_t i = 0; i <= active_ru; ++i) {
        auto& ru = t.rus[i];
        run("fiber" + std::to_string(i), [&](const TimeWaveform& s) { return t.fiber_segments[i].process(s, cp, nsym); });
        run(ru_label(i, "input_coupler"), [&](const TimeWaveform& s) { return ru.input_coupler.process(s, cp, nsym); });
        if (i == active_ru)
            break;
        run(ru_label(i, "booster"), [&](const TimeWaveform& s) { return ru.booster.process(s); });
        run(ru_label(i, "output_coupler"), [&](const TimeWaveform& s) { return ru.output_coupler.process(s, cp, nsym); });
    }

    auto& ru = t.rus[active_ru];
    const TimeWaveform feed = run.signal();
    auto branches = split(feed, t.n_antennas);
    for (std::size_t m = 0; m < branches.size(); ++m)
        taps.record(ru_label(active_ru, "splitter" + std::to_string(m)), feed, branches[m]);
    auto shifted = phase_shift(branches, beam_phases);
    for (std::size_t m = 0; m < shifted.size(); ++m)
        taps.record(ru_label(active_ru, "phase_shifter" + std::to_string(m)), branches[m], shifted[m]);
    std::vector<TimeWaveform> out;
    for (std::size_t m = 0; m < shifted.size(); ++m) {
        out.push_back(ru.antenna_amplifiers[m].process(shifted[m]));
        taps.record(ru_label(active_ru, "antenna_amplifier" + std::to_string(m)), shifted[m], out.back());
    }
    return out;
}

ResourceGrid downlink_air(std::span<const TimeWaveform> antennas, StripeTopology& t, const ChannelRealization& ch,
                          std::span<const double> ue_phases)
{
    const SubcarrierGrid& grid = t.grid;
    const std::size_t nq = grid.q(), nsym = t.n_symbols;
    if (ch.q() != nq)
        throw GridMismatch("channel has " + std::to_string(ch.q()) + " subcarriers, simulation grid has " +
                           std::to_string(nq));
    if (ch.n_tx != antennas.size())
        throw DimensionError("channel expects " + std::to_string(ch.n_tx) + " transmit antennas, got " +
                             std::to_string(antennas.size()));
    if (ue_phases.size() != ch.n_rx)
        throw DimensionError("UE phase count does not match the UE antenna count");

    const std::size_t offset = grid.widened_offset();
    std::vector<std::vector<CVector>> spectra;
    for (const auto& a : antennas)
        spectra.push_back(symbol_spectra(a, grid, t.cp_length, nsym));

    const double pn =
        t.receiver.thermal ? thermal_noise_power(grid.bw(), t.receiver.nf_db, t.receiver.temperature) : 0.0;
    std::vector<cd> w(ch.n_rx);
    for (std::size_t k = 0; k < ch.n_rx; ++k)
        w[k] = std::polar(1.0, ue_phases[k]);

    ResourceGrid rx;
    rx.q = nq;
    rx.n_symbols = nsym;
    rx.symbols.assign(nq * nsym, cd{});
    for (std::size_t s = 0; s < nsym; ++s) {
        for (std::size_t q = 0; q < nq; ++q) {
            cd z{};
            for (std::size_t k = 0; k < ch.n_rx; ++k) {
                cd y{};
                for (std::size_t m = 0; m < ch.n_tx; ++m)
                    y += ch.at(q, k, m) * spectra[m][s][offset + q];
                if (pn > 0.0)
                    y += t.receiver_rng.complex_gaussian(pn);
                z += w[k] * y;
            }
            rx.at(q, s) = z;
        }
    }
    return rx;
}

std::vector<TimeWaveform> uplink_air(const TimeWaveform& ue_waveform, StripeTopology& t,
                                     const ChannelRealization& ch, std::span<const double> ue_phases)
{
    const SubcarrierGrid& grid = t.grid;
    const std::size_t nq = grid.q(), nsym = t.n_symbols, n = grid.fft_size();
    if (ch.q() != nq)
        throw GridMismatch("channel has " + std::to_string(ch.q()) + " subcarriers, simulation grid has " +
                           std::to_string(nq));
    if (ch.n_tx != t.n_antennas)
        throw DimensionError("channel RU side has " + std::to_string(ch.n_tx) + " antennas, stripe has " +
                             std::to_string(t.n_antennas));
    if (ue_phases.size() != ch.n_rx)
        throw DimensionError("UE phase count does not match the UE antenna count");

    const std::size_t offset = grid.widened_offset();
    const auto x = symbol_spectra(ue_waveform, grid, t.cp_length, nsym);
    const double pn =
        t.receiver.thermal ? thermal_noise_power(grid.bw(), t.receiver.nf_db, t.receiver.temperature) : 0.0;
    const double ue_split = 1.0 / std::sqrt(static_cast<double>(ch.n_rx));
    std::vector<cd> w(ch.n_rx);
    for (std::size_t k = 0; k < ch.n_rx; ++k)
        w[k] = std::polar(ue_split, ue_phases[k]);

    std::vector<std::vector<CVector>> spectra(ch.n_tx, std::vector<CVector>(nsym, CVector(n)));
    for (std::size_t s = 0; s < nsym; ++s) {
        for (std::size_t q = 0; q < nq; ++q) {
            const cd xs = x[s][offset + q];
            for (std::size_t m = 0; m < ch.n_tx; ++m) {
                cd y{};
                for (std::size_t k = 0; k < ch.n_rx; ++k)
                    y += ch.at(q, k, m) * w[k] * xs;
                if (pn > 0.0)
                    y += t.receiver_rng.complex_gaussian(pn);
                spectra[m][s][offset + q] = y;
            }
        }
    }
    std::vector<TimeWaveform> out;
    for (std::size_t m = 0; m < ch.n_tx; ++m) {
        out.push_back(synthesize(spectra[m], grid, t.cp_length));
        out.back().origin_tag = "ru_antenna" + std::to_string(m);
    }
    return out;
}

TimeWaveform propagate_uplink(std::span<const TimeWaveform> antennas, StripeTopology& t, std::size_t active_ru,
                              std::span<const double> beam_phases, TapStore& taps)
{
    if (active_ru >= t.rus.size())
        throw ConfigError("active RU " + std::to_string(active_ru) + " out of range");
    if (antennas.size() != t.n_antennas || beam_phases.size() != t.n_antennas)
        throw DimensionError("antenna or beam phase count does not match the RU antenna count");
    const std::size_t cp = t.cp_length, nsym = t.n_symbols;
    const double fs = t.grid.sample_rate();
    auto& active = t.rus[active_ru];

    std::vector<TimeWaveform> amplified;
    for (std::size_t m = 0; m < antennas.size(); ++m) {
        amplified.push_back(active.antenna_amplifiers[m].process(antennas[m]));
        taps.record(ru_label(active_ru, "antenna_amplifier" + std::to_string(m)), antennas[m], amplified.back());
    }
    auto shifted = phase_shift(amplified, beam_phases);
    for (std::size_t m = 0; m < shifted.size(); ++m)
        taps.record(ru_label(active_ru, "phase_shifter" + std::to_string(m)), amplified[m], shifted[m]);
    TimeWaveform combined = combine(shifted);
    taps.record(ru_label(active_ru, "combiner"), shifted.front(), combined);

    StageRunner run(std::move(combined), taps);
    run(ru_label(active_ru, "output_coupler"),
        [&](const TimeWaveform& s) { return active.output_coupler.process(s, cp, nsym); });
    run("fiber" + std::to_string(active_ru),
        [&](const TimeWaveform& s) { return t.fiber_segments[active_ru].process(s, cp, nsym); });
    for (std::size_t j = active_ru; j-- > 0;) {
        auto& ru = t.rus[j];
        run(ru_label(j, "output_coupler"), [&](const TimeWaveform& s) { return ru.output_coupler.process(s, cp, nsym); });
        run(ru_label(j, "booster"), [&](const TimeWaveform& s) { return ru.booster.process(s); });
        run(ru_label(j, "input_coupler"), [&](const TimeWaveform& s) { return ru.input_coupler.process(s, cp, nsym); });
        run("fiber" + std::to_string(j), [&](const TimeWaveform& s) { return t.fiber_segments[j].process(s, cp, nsym); });
    }
    run("cu_iq_receive", [&](const TimeWaveform& s) {
        const auto phi = t.cu.oscillator.phases(s.size(), fs);
        return iq_receive_process(s, t.cu.iq, phi);
    });
    run("cu_amplifier", [&](const TimeWaveform& s) { return t.cu.amplifier.process(s); });
    return run.signal();
}

TimeWaveform receiver_frame(const TimeWaveform& x, const SubcarrierGrid& grid, std::size_t cp_length,
                            std::size_t n_symbols)
{
    const std::size_t len = make_framing(grid, cp_length, n_symbols).frame_length();
    if (x.bulk_delay > x.size() || x.size() - x.bulk_delay < len)
        throw LengthError("received waveform is shorter than one frame");
    TimeWaveform y;
    y.sample_rate = x.sample_rate;
    y.origin_tag = x.origin_tag;
    const auto first = x.samples.begin() + static_cast<std::ptrdiff_t>(x.bulk_delay);
    y.samples.assign(first, first + static_cast<std::ptrdiff_t>(len));
    return y;
}

std::string to_string(ChannelModel m)
{
    switch (m) {
    case ChannelModel::Identity: return "identity";
    case ChannelModel::Los: return "los";
    case ChannelModel::Rayleigh: return "rayleigh";
    case ChannelModel::Tdl: return "tdl";
    case ChannelModel::Dataset: return "dataset";
    }
    return "unknown";
}

ChannelRealization link_channel(const EnvironmentConfig& env, const SubcarrierGrid& grid, const ChannelSource& source,
                                const LinkOptions& o)
{
    if (o.ue_index >= env.ue_positions.size())
        throw ConfigError("UE index " + std::to_string(o.ue_index) + " out of range (" +
                          std::to_string(env.ue_positions.size()) + " UEs)");
    switch (source.model) {
    case ChannelModel::Identity:
        if (env.antenna.n_antennas != env.antenna.ue_antennas)
            throw ConfigError("identity channel needs equal RU and UE antenna counts");
        return identity_channel(grid, env.antenna.n_antennas);
    case ChannelModel::Los:
        return synthetic_channel(env, grid, {SyntheticModel::Los, source.tdl}, o.ue_index, o.stripe_id, o.active_ru,
                                 o.seed);
    case ChannelModel::Tdl:
        return synthetic_channel(env, grid, {SyntheticModel::Tdl, source.tdl}, o.ue_index, o.stripe_id, o.active_ru,
                                 o.seed);
    case ChannelModel::Rayleigh: {
        const Vec3 ue = env.ue_positions[o.ue_index];
        const Vec3 ru = env.radio_stripes[o.stripe_id][o.active_ru + 1].position;
        LargeScale ls;
        ls.distance = distance(ru, ue);
        ls.antenna_gain = antenna_gain_38901(ue - ru, ru_pattern(env)) * antenna_gain_38901(ru - ue, ue_pattern(env));
        RngStream rng(o.seed, {o.ue_index, o.stripe_id, o.active_ru}, "rayleigh");
        return rayleigh_channel(grid, env.antenna.n_antennas, env.antenna.ue_antennas, rng, ls);
    }
    case ChannelModel::Dataset: {
        if (!source.dataset)
            throw ConfigError("dataset channel source without a dataset");
        const auto id = query_ue(*source.dataset, env.ue_positions[o.ue_index], source.tolerance);
        auto ch = get_channel(*source.dataset, id, o.stripe_id, o.active_ru, grid.os());
        if (ch.q() != grid.q() || ch.grid.fc() != grid.fc() || ch.grid.bw() != grid.bw())
            throw GridMismatch("dataset grid does not match the simulation grid");
        return ch;
    }
    }
    throw UnsupportedModel("unknown channel model");
}

LinkResult run_link(const EnvironmentConfig& env, const WaveformConfig& wf, const ComponentBank& comp,
                    const ChannelSource& source, const LinkOptions& o)
{
    std::optional<DatasetShape> shape;
    if (source.model == ChannelModel::Dataset && source.dataset)
        shape = source.dataset->header().shape();
    const SubcarrierGrid grid = resolve_grid(env, wf, shape);
    wf.validate_against(grid.q());
    if (o.stripe_id >= env.n_stripes())
        throw ConfigError("stripe " + std::to_string(o.stripe_id) + " out of range");
    if (o.active_ru >= env.n_rus(o.stripe_id))
        throw ConfigError("RU " + std::to_string(o.active_ru) + " out of range on stripe " +
                          std::to_string(o.stripe_id));

    LinkResult res;
    const unsigned m = bits_per_symbol(wf.qam_order);
    RngStream bit_rng(o.seed, {}, "data_bits");
    const auto bits = bit_rng.bits(data_capacity(wf, grid.q()) * m);
    res.tx_grid = build_resource_grid(bits, wf, grid, derive_seed(o.seed, {}, "pilots"));
    const TimeWaveform tx = set_power(ofdm_modulate(res.tx_grid, grid, wf.cp_length), wf.tx_power_dbm);

    res.channel = link_channel(env, grid, source, o);
    if (res.channel.n_tx != env.antenna.n_antennas || res.channel.n_rx != env.antenna.ue_antennas)
        throw DimensionError("channel is " + std::to_string(res.channel.n_rx) + "x" +
                             std::to_string(res.channel.n_tx) + ", configuration expects " +
                             std::to_string(env.antenna.ue_antennas) + "x" + std::to_string(env.antenna.n_antennas));
    const std::size_t centre = grid.q() / 2;
    res.beam_phases = o.beam_phases ? *o.beam_phases : matched_beam_phases(res.channel, centre);
    res.ue_phases = ue_combining_phases(res.channel, res.beam_phases, centre);

    StripeTopology topo = build_stripe(env, comp, o.stripe_id, grid, wf, o.seed, o.direction);
    if (comp.calibration.enabled)
        res.calibration =
            calibrate_gains(topo, comp.calibration.target_power_dbm, comp.calibration.max_gain_db, o.seed);

    TapStore taps(o.record_taps);
    if (o.direction == Direction::Downlink) {
        res.antenna_waveforms = propagate_downlink(tx, topo, o.active_ru, res.beam_phases, taps);
        res.rx_grid = downlink_air(res.antenna_waveforms, topo, res.channel, res.ue_phases);
    } else {
        res.antenna_waveforms = uplink_air(tx, topo, res.channel, res.ue_phases);
        const TimeWaveform cu = propagate_uplink(res.antenna_waveforms, topo, o.active_ru, res.beam_phases, taps);
        res.rx_grid = ofdm_demodulate(receiver_frame(cu, grid, wf.cp_length, wf.n_ofdm_symbols), grid, wf.cp_length,
                                      wf.n_ofdm_symbols);
    }

    if (o.snr_db) {
        double p = 0.0;
        for (const auto& v : res.rx_grid.symbols)
            p += std::norm(v);
        p /= static_cast<double>(res.rx_grid.symbols.size());
        RngStream noise(o.seed, {}, "injected_noise");
        add_awgn(res.rx_grid.symbols, p / std::pow(10.0, *o.snr_db / 10.0), noise);
    }
    res.rx_grid.pilot_mask = res.tx_grid.pilot_mask;

    res.metrics = evaluate_link(res.tx_grid, res.rx_grid, wf, o.seed, o.error_spectrum).report;
    res.stage_taps = taps.taps();
    return res;
}

} // namespace stripesim
