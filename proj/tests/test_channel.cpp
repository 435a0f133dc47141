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

#include "stripesim/channel.hpp"
#include "stripesim/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace stripesim;
using Catch::Approx;

namespace {

const SubcarrierGrid kGrid(157.75e9, 2e9, 64);

double lag1_correlation(const CVector& v)
{
    cd num{};
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        num += v[i + 1] * std::conj(v[i]);
        den += std::norm(v[i]);
    }
    return std::abs(num) / den;
}

} // namespace

TEST_CASE("free-space gain")
{
    const double f = 157.75e9;
    CHECK(free_space_gain(kSpeedOfLight / (4 * kPi * f), f) == Approx(1.0).epsilon(1e-14));
    CHECK(free_space_gain(1.0, f) == Approx(2.287088e-8).epsilon(1e-6));
    CHECK(10 * std::log10(free_space_gain(1.0, f)) == Approx(-76.4072).margin(1e-4));
    CHECK(free_space_gain(2.0, f) == Approx(free_space_gain(1.0, f) / 4).epsilon(1e-14));
    CHECK_THROWS_AS(free_space_gain(0.0, f), DomainError);
    CHECK_THROWS_AS(free_space_gain(-1.0, f), DomainError);
}

TEST_CASE("38.901 element pattern")
{
    AntennaPattern p;
    p.kind = PatternKind::Tr38901;
    CHECK(antenna_gain_38901(p.boresight, p) == Approx(std::pow(10.0, 0.8)));
    CHECK(element_gain_38901(65.0, 0.0, p) == Approx(std::pow(10.0, (8.0 - 12.0) / 10.0)));
    CHECK(element_gain_38901(0.0, 65.0, p) == Approx(std::pow(10.0, (8.0 - 12.0) / 10.0)));
    // Back lobe floor: 30 dB below peak.
    CHECK(element_gain_38901(0.0, 180.0, p) == Approx(std::pow(10.0, (8.0 - 30.0) / 10.0)));

    AntennaPattern iso;
    for (Vec3 d : {Vec3{1, 0, 0}, Vec3{0, 0, -1}, Vec3{-0.6, 0.8, 0}})
        CHECK(antenna_gain_38901(d, iso) == 1.0);
}

TEST_CASE("LoS channel magnitude and phase")
{
    const Vec3 tx{0, 0, 0};
    const double d = 1.37;
    const Vec3 rx{d, 0, 0};
    const auto h = los_channel(kGrid, std::span(&tx, 1), std::span(&rx, 1), {}, {});
    REQUIRE(h.h.size() == 64);
    CHECK(h.provenance == ChannelProvenance::Los);
    for (std::size_t q = 0; q < 64; ++q) {
        const double f = kGrid.frequency(q);
        CHECK(std::abs(h.at(q, 0, 0)) == Approx(std::sqrt(free_space_gain(d, f))).epsilon(1e-13));
        const cd ref = std::polar(1.0, -2 * kPi * f * d / kSpeedOfLight);
        CHECK(std::abs(h.at(q, 0, 0) / std::abs(h.at(q, 0, 0)) - ref) < 1e-9);
    }
}

TEST_CASE("a full-wavelength distance gives zero phase")
{
    const std::size_t q = 10;
    const Vec3 tx{0, 0, 0};
    const Vec3 rx{0, kSpeedOfLight / kGrid.frequency(q), 0};
    const auto h = los_channel(kGrid, std::span(&tx, 1), std::span(&rx, 1), {}, {});
    CHECK(std::abs(std::arg(h.at(q, 0, 0))) < 1e-9);
}

TEST_CASE("narrowband LoS equals wideband at the carrier")
{
    const std::vector<Vec3> tx{{0, 0, 2.8}, {0.001, 0, 2.8}};
    const std::vector<Vec3> rx{{2, 1, 1}, {2, 1.001, 1}, {2, 1.002, 1}};
    const auto wide = los_channel(kGrid, tx, rx, {}, {});
    const auto narrow = los_channel(kGrid, tx, rx, {}, {}, true);
    for (std::size_t q = 0; q < 64; ++q)
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t m = 0; m < 2; ++m)
                CHECK(narrow.at(q, k, m) == wide.at(32, k, m));
    // Wideband magnitude decreases with frequency.
    for (std::size_t q = 1; q < 64; ++q)
        CHECK(std::abs(wide.at(q, 0, 0)) < std::abs(wide.at(q - 1, 0, 0)));
}

TEST_CASE("coincident positions are a domain error")
{
    const Vec3 p{1, 1, 1};
    CHECK_THROWS_AS(los_channel(kGrid, std::span(&p, 1), std::span(&p, 1), {}, {}), DomainError);
}

TEST_CASE("Rayleigh draws are unit variance, zero mean and independent")
{
    RngStream rng(5);
    const SubcarrierGrid g(157.75e9, 2e9, 4096);
    double var = 0.0;
    cd mean{};
    std::size_t n = 0;
    double lag = 0.0;
    for (int r = 0; r < 62; ++r) {
        const auto ch = rayleigh_channel(g, 2, 2, rng);
        CHECK(ch.provenance == ChannelProvenance::Rayleigh);
        for (auto v : ch.h) {
            var += std::norm(v);
            mean += v;
            ++n;
        }
        CVector along(g.q());
        for (std::size_t q = 0; q < g.q(); ++q)
            along[q] = ch.at(q, 0, 0);
        lag += lag1_correlation(along) / 62;
    }
    CHECK(var / n == Approx(1.0).epsilon(0.01));
    CHECK(std::abs(mean / double(n)) < 3.0 / std::sqrt(double(n)));
    CHECK(lag < 0.02);
}

TEST_CASE("tap powers")
{
    const auto p = tap_powers(3, 1.0);
    CHECK(p[0] == Approx(0.6652409558).epsilon(1e-9));
    CHECK(p[1] == Approx(0.2447284711).epsilon(1e-9));
    CHECK(p[2] == Approx(0.0900305732).epsilon(1e-9));
    for (double v : tap_powers(5, 0.0))
        CHECK(v == Approx(0.2));
    CHECK(tap_powers(1, 3.0) == std::vector<double>{1.0});
    for (std::size_t l : {1u, 7u, 64u})
        for (double b : {0.0, 0.3, 5.0}) {
            double s = 0.0;
            for (double v : tap_powers(l, b))
                s += v;
            CHECK(s == Approx(1.0).margin(1e-12));
        }
}

TEST_CASE("single-tap TDL is frequency flat")
{
    RngStream rng(3);
    const auto ch = tdl_channel(kGrid, {1, 0.0}, 2, 2, rng);
    for (std::size_t q = 1; q < 64; ++q)
        CHECK(std::abs(ch.at(q, 1, 0) - ch.at(0, 1, 0)) < 1e-12);
    CHECK_THROWS_AS(tdl_channel(kGrid, {65, 0.0}, 1, 1, rng), DomainError);
}

TEST_CASE("TDL reproduces the exponential power-delay profile")
{
    const std::size_t q = 16;
    const SubcarrierGrid g(157.75e9, 2e9, q);
    const TdlParams params{4, 0.7};
    const auto lambda = tap_powers(4, 0.7);
    RngStream rng(9);
    std::vector<double> pdp(q, 0.0);
    std::vector<double> per_bin(q, 0.0);
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        const auto ch = tdl_channel(g, params, 1, 1, rng);
        CVector freq(q);
        for (std::size_t k = 0; k < q; ++k) {
            // Undo the carrier-referenced bin mapping: subcarrier k holds DFT bin (k - Q/2) mod Q.
            freq[(k + q / 2) % q] = ch.at(k, 0, 0);
            per_bin[k] += std::norm(ch.at(k, 0, 0)) / trials;
        }
        // Inverse DFT recovers the taps.
        for (std::size_t n = 0; n < q; ++n) {
            cd acc{};
            for (std::size_t b = 0; b < q; ++b)
                acc += freq[b] * std::polar(1.0, 2 * kPi * double(b * n) / double(q));
            pdp[n] += std::norm(acc / double(q)) / trials;
        }
    }
    for (std::size_t l = 0; l < 4; ++l)
        CHECK(pdp[l] == Approx(lambda[l]).epsilon(0.02));
    for (std::size_t n = 4; n < q; ++n)
        CHECK(pdp[n] < 1e-20);
    for (double v : per_bin)
        CHECK(v == Approx(1.0).epsilon(0.02));
}

TEST_CASE("larger beta flattens the TDL response")
{
    RngStream rng(4);
    std::vector<double> spread;
    for (double beta : {0.0, 1.0, 4.0}) {
        double acc = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const auto ch = tdl_channel(kGrid, {8, beta}, 1, 1, rng);
            double m = 0.0, m2 = 0.0;
            for (auto v : ch.h) {
                m += std::abs(v) / 64;
                m2 += std::norm(v) / 64;
            }
            acc += (m2 - m * m) / 1000;
        }
        spread.push_back(acc);
    }
    CHECK(spread[0] > spread[1]);
    CHECK(spread[1] > spread[2]);
}

TEST_CASE("apply_channel against a triple loop")
{
    const SubcarrierGrid g(1e9, 1e6, 4);
    RngStream rng(8);
    const auto ch = rayleigh_channel(g, 2, 2, rng);
    CVector x(8);
    for (auto& v : x)
        v = rng.complex_gaussian();
    const auto y = apply_channel(x, ch);
    for (std::size_t q = 0; q < 4; ++q)
        for (std::size_t k = 0; k < 2; ++k) {
            cd ref{};
            for (std::size_t m = 0; m < 2; ++m)
                ref += ch.h[(q * 2 + k) * 2 + m] * x[q * 2 + m];
            CHECK(std::abs(y[q * 2 + k] - ref) < 1e-12);
        }
    CHECK_THROWS_AS(apply_channel(CVector(7), ch), DimensionError);
}

TEST_CASE("identity and scalar channels")
{
    const auto id = identity_channel(kGrid, 3);
    CVector x(64 * 3);
    RngStream rng(1);
    for (auto& v : x)
        v = rng.complex_gaussian();
    CHECK(apply_channel(x, id) == x);

    const auto siso = rayleigh_channel(kGrid, 1, 1, rng);
    const CVector x1(x.begin(), x.begin() + 64);
    const auto y = apply_channel(x1, siso);
    for (std::size_t q = 0; q < 64; ++q)
        CHECK(y[q] == siso.h[q] * x1[q]);
}

TEST_CASE("apply_channel is linear")
{
    RngStream rng(2);
    const auto ch = tdl_channel(kGrid, {4, 0.5}, 3, 2, rng);
    CVector a(64 * 3), b(64 * 3), mix(64 * 3);
    const cd ca(0.3, -1.2), cb(-2.0, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.complex_gaussian();
        b[i] = rng.complex_gaussian();
        mix[i] = ca * a[i] + cb * b[i];
    }
    const auto ya = apply_channel(a, ch), yb = apply_channel(b, ch), ym = apply_channel(mix, ch);
    for (std::size_t i = 0; i < ym.size(); ++i)
        CHECK(std::abs(ym[i] - (ca * ya[i] + cb * yb[i])) < 1e-12);
}

TEST_CASE("thermal noise floor")
{
    CHECK(thermal_noise_power(2e9, 7.0) == Approx(kBoltzmann * 290 * 2e9 * std::pow(10.0, 0.7)));

    const SubcarrierGrid g(157.75e9, 2e9, 4096);
    RngStream rng(6);
    const double sig = 1e-9;
    const double target_snr_db = 10.0 * std::log10(sig / thermal_noise_power(2e9, 10.0));
    CVector y(200 * 4096, cd(std::sqrt(sig), 0.0));
    add_thermal_noise(y, 2e9, 10.0, rng);
    double noise = 0.0;
    for (auto v : y)
        noise += std::norm(v - std::sqrt(sig)) / y.size();
    CHECK(10 * std::log10(sig / noise) == Approx(target_snr_db).margin(0.2));

    CVector n(4096 * 50);
    add_thermal_noise(n, 2e9, 3.0, rng);
    CHECK(lag1_correlation(n) < 0.01);

    CVector quiet(16, cd(1.0));
    add_thermal_noise(quiet, 2e9, -400.0, rng);
    for (auto v : quiet)
        CHECK(std::abs(v - 1.0) < 1e-12);
}
