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

#include "stripesim/errors.hpp"
#include "stripesim/stripe.hpp"

#include "support/fixtures.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace stripesim;
using namespace stripesim::testing;
using Catch::Approx;

namespace {

ComponentBank damped(double fiber_db, double coupler_db = 0.0)
{
    ComponentBank comp;
    comp.fiber.model = LinearModel::FixedDamping;
    comp.fiber.loss_db = fiber_db;
    if (coupler_db > 0.0) {
        comp.coupler.model = LinearModel::FixedDamping;
        comp.coupler.loss_db = coupler_db;
    }
    return comp;
}

TimeWaveform frame(const WaveformConfig& wf, const SubcarrierGrid& g, std::uint64_t seed)
{
    RngStream rng(seed);
    const auto bits = rng.bits(data_capacity(wf, g.q()) * bits_per_symbol(wf.qam_order));
    return set_power(ofdm_modulate(build_resource_grid(bits, wf, g, seed), g, wf.cp_length), wf.tx_power_dbm);
}

double total_power(const std::vector<TimeWaveform>& ws)
{
    double p = 0.0;
    for (const auto& w : ws) {
        double acc = 0.0;
        for (std::size_t i = w.bulk_delay; i < w.size(); ++i)
            acc += std::norm(w.samples[i]);
        p += acc;
    }
    return p;
}

} // namespace

TEST_CASE("RU modes around the active unit")
{
    const auto m = ru_modes(5, 2);
    CHECK(m == std::vector<RuMode>{RuMode::Booster, RuMode::Booster, RuMode::Active, RuMode::Bypass, RuMode::Bypass});
    CHECK(parse_direction(to_string(Direction::Uplink)) == Direction::Uplink);
}

TEST_CASE("segment lengths follow the node geometry")
{
    EnvSpec spec;
    spec.n_rus = 2;
    spec.spacing = 0.5;
    spec.cu_fiber = 1.5;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);
    const auto topo = build_stripe(env, ComponentBank{}, 0, g, wf, 1);
    const auto seg = topo.segment_lengths();
    REQUIRE(seg.size() == 2);
    CHECK(seg[0] == Approx(1.5));
    CHECK(seg[1] == Approx(0.5));
    CHECK_THROWS_AS(build_stripe(env, ComponentBank{}, 1, g, wf, 1), ConfigError);
}

TEST_CASE("rebuilding with one seed reuses every stream key")
{
    EnvSpec spec;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);
    const auto a = build_stripe(env, ComponentBank{}, 0, g, wf, 42);
    const auto b = build_stripe(env, ComponentBank{}, 0, g, wf, 42);
    const auto c = build_stripe(env, ComponentBank{}, 0, g, wf, 43);
    for (std::size_t i = 0; i < a.rus.size(); ++i) {
        CHECK(a.rus[i].booster.stream_seed() == b.rus[i].booster.stream_seed());
        CHECK(a.rus[i].booster.stream_seed() != c.rus[i].booster.stream_seed());
    }
    CHECK(a.rus[0].booster.stream_seed() != a.rus[1].booster.stream_seed());
    CHECK(a.cu.amplifier.stream_seed() == b.cu.amplifier.stream_seed());
}

TEST_CASE("calibration gains")
{
    EnvSpec spec;
    spec.n_rus = 4;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);

    auto lossless = build_stripe(env, ComponentBank{}, 0, g, wf, 1);
    for (double gain : calibrate_gains(lossless, 0.0, 20.0).gains_db)
        CHECK(gain == Approx(0.0).margin(1e-9));

    auto ten = build_stripe(env, damped(10.0), 0, g, wf, 1);
    const auto cal = calibrate_gains(ten, 0.0, 20.0);
    for (std::size_t i = 0; i < cal.gains_db.size(); ++i) {
        CHECK(cal.gains_db[i] == Approx(10.0).margin(1e-9));
        CHECK_FALSE(cal.clipped[i]);
    }
    CHECK(cal.warnings.empty());

    auto thirty = build_stripe(env, damped(30.0), 0, g, wf, 1);
    const auto clipped = calibrate_gains(thirty, 0.0, 20.0);
    CHECK(clipped.gains_db[0] == 20.0);
    CHECK(clipped.clipped[0]);
    CHECK(clipped.warnings.size() == clipped.gains_db.size());
}

TEST_CASE("a deeper active RU receives less power without calibration")
{
    EnvSpec spec;
    spec.n_rus = 5;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);
    const auto x = frame(wf, g, 3);
    const std::vector<double> phases(1, 0.0);
    auto topo = build_stripe(env, damped(3.0), 0, g, wf, 1);
    TapStore taps;
    const double near = total_power(propagate_downlink(x, topo, 1, phases, taps));
    const double far = total_power(propagate_downlink(x, topo, 4, phases, taps));
    CHECK(far < near);
    CHECK(10 * std::log10(near / far) == Approx(9.0).margin(1e-9));
}

TEST_CASE("passive loss is reciprocal")
{
    EnvSpec spec;
    spec.n_rus = 4;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);
    const auto x = frame(wf, g, 5);
    const std::vector<double> phases(1, 0.0);
    TapStore taps;

    auto dl = build_stripe(env, damped(2.0, 0.7), 0, g, wf, 1);
    const double dl_gain = total_power(propagate_downlink(x, dl, 2, phases, taps)) / total_power({x});

    auto ul = build_stripe(env, damped(2.0, 0.7), 0, g, wf, 1, Direction::Uplink);
    const std::vector<TimeWaveform> antennas{x};
    const double ul_gain = total_power({propagate_uplink(antennas, ul, 2, phases, taps)}) / total_power({x});
    CHECK(10 * std::log10(ul_gain) == Approx(10 * std::log10(dl_gain)).margin(1e-9));
}

TEST_CASE("ideal chains are transparent in both directions")
{
    EnvSpec spec;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    ChannelSource src;
    src.model = ChannelModel::Identity;
    for (auto dir : {Direction::Downlink, Direction::Uplink}) {
        LinkOptions o;
        o.direction = dir;
        o.active_ru = 0;
        const auto r = run_link(env, wf, ComponentBank{}, src, o);
        CHECK(r.metrics.nmse_db < -100.0);
        CHECK(r.metrics.ber == 0.0);
    }
}

TEST_CASE("invalid link requests")
{
    EnvSpec spec;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    ChannelSource src;
    LinkOptions o;
    o.active_ru = 3;
    CHECK_THROWS_AS(run_link(env, wf, ComponentBank{}, src, o), ConfigError);
    o.active_ru = 0;
    o.stripe_id = 1;
    CHECK_THROWS_AS(run_link(env, wf, ComponentBank{}, src, o), ConfigError);

    EnvSpec mimo;
    mimo.n_antennas = 2;
    src.model = ChannelModel::Identity;
    CHECK_THROWS_AS(run_link(make_env(mimo), wf, ComponentBank{}, src, LinkOptions{}), ConfigError);
}

TEST_CASE("matched beam phases collect at least the unmatched power")
{
    EnvSpec spec;
    spec.n_antennas = 4;
    spec.ue_antennas = 1;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    ChannelSource src;
    LinkOptions o;
    o.active_ru = 1;
    const auto matched = run_link(env, wf, ComponentBank{}, src, o);
    o.beam_phases = std::vector<double>(4, 0.0);
    const auto zero = run_link(env, wf, ComponentBank{}, src, o);
    double pm = 0.0, pz = 0.0;
    for (std::size_t i = 0; i < matched.rx_grid.symbols.size(); ++i) {
        pm += std::norm(matched.rx_grid.symbols[i]);
        pz += std::norm(zero.rx_grid.symbols[i]);
    }
    CHECK(pm >= pz);
}

TEST_CASE("links are reproducible and seed-dependent")
{
    EnvSpec spec;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    ComponentBank comp;
    comp.boost_amplifier.nf_db = 8.0;
    comp.antenna_amplifier.nf_db = 8.0;
    ChannelSource src;
    src.model = ChannelModel::Tdl;
    LinkOptions o;
    o.active_ru = 2;
    o.seed = 5;
    const auto a = run_link(env, wf, comp, src, o);
    const auto b = run_link(env, wf, comp, src, o);
    CHECK(a.rx_grid.symbols == b.rx_grid.symbols);
    o.seed = 6;
    CHECK(run_link(env, wf, comp, src, o).rx_grid.symbols != a.rx_grid.symbols);
}

TEST_CASE("dataset and model channel sources agree")
{
    EnvSpec spec;
    spec.n_antennas = 2;
    spec.ue_antennas = 2;
    const auto env = make_env(spec);
    const auto wf = make_waveform();
    const auto g = resolve_grid(env, wf);
    const auto ds = generate_synthetic(env, g, {}, 1);
    TempDir dir("stripe_ds");
    write_dataset(ds, dir.path());
    const auto stored = read_dataset(dir.path());

    ChannelSource model;
    ChannelSource lookup;
    lookup.model = ChannelModel::Dataset;
    lookup.dataset = &stored;
    LinkOptions o;
    o.active_ru = 1;
    const auto a = run_link(env, wf, ComponentBank{}, model, o);
    const auto b = run_link(env, wf, ComponentBank{}, lookup, o);
    CHECK(nmse_db(a.rx_grid.symbols, b.rx_grid.symbols) < -120.0);
}

TEST_CASE("stage taps follow the downlink order")
{
    EnvSpec spec;
    spec.n_rus = 2;
    const auto env = make_env(spec);
    ChannelSource src;
    src.model = ChannelModel::Identity;
    LinkOptions o;
    o.active_ru = 1;
    o.record_taps = true;
    const auto r = run_link(env, make_waveform(), ComponentBank{}, src, o);
    std::vector<std::string> labels;
    for (const auto& t : r.stage_taps)
        labels.push_back(t.label);
    const std::vector<std::string> expected{
        "cu_dac",  "cu_iq_modem",           "cu_amplifier",           "fiber0",
        "ru0_input_coupler", "ru0_booster", "ru0_output_coupler",     "fiber1",
        "ru1_input_coupler", "ru1_splitter0", "ru1_phase_shifter0", "ru1_antenna_amplifier0"};
    CHECK(labels == expected);
}
