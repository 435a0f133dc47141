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

#include "stripesim/metrics.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/io.hpp"
#include "stripesim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stripesim {
namespace {

// Linear interpolation across subcarriers from sorted pilot positions, nearest value outside.
void interpolate(std::span<const std::size_t> pos, std::span<const cd> val, std::span<cd> out)
{
    const std::size_t q = out.size();
    std::size_t j = 0;
    for (std::size_t k = 0; k < q; ++k) {
        if (k <= pos.front()) {
            out[k] = val.front();
            continue;
        }
        if (k >= pos.back()) {
            out[k] = val.back();
            continue;
        }
        while (pos[j + 1] < k)
            ++j;
        const double t = static_cast<double>(k - pos[j]) / static_cast<double>(pos[j + 1] - pos[j]);
        out[k] = val[j] + t * (val[j + 1] - val[j]);
    }
}

double wrap_phase(double p)
{
    p = std::remainder(p, 2.0 * kPi);
    return p;
}

} // namespace

PilotLayout make_pilot_layout(const WaveformConfig& wf, std::size_t q, std::uint64_t seed)
{
    PilotLayout layout;
    layout.q = q;
    layout.n_symbols = wf.n_ofdm_symbols;
    layout.mask = make_pilot_mask(q, wf.n_ofdm_symbols, wf.pilot_mode, wf.pilot_spacing);
    const auto n = static_cast<std::size_t>(std::count(layout.mask.begin(), layout.mask.end(), 1));
    layout.values = pilot_sequence(n, seed);
    return layout;
}

PilotLayout pilot_layout_of(const ResourceGrid& tx) { return {tx.q, tx.n_symbols, tx.pilot_mask, tx.pilot_values}; }

ChannelEstimate estimate_channel(const ResourceGrid& rx, const PilotLayout& layout, bool average)
{
    if (rx.q != layout.q || rx.n_symbols != layout.n_symbols)
        throw DimensionError("received grid does not match the pilot layout");
    const std::size_t q = layout.q;
    const std::size_t ns = layout.n_symbols;

    // LS values per symbol, in pilot storage order.
    std::vector<std::vector<std::size_t>> pos(ns);
    std::vector<CVector> ls(ns);
    std::size_t p = 0;
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t k = 0; k < q; ++k) {
            if (!layout.mask[s * q + k])
                continue;
            pos[s].push_back(k);
            ls[s].push_back(rx.at(k, s) / layout.values[p++]);
        }
    }
    if (p == 0)
        throw NoPilots("the resource grid carries no pilots");

    ChannelEstimate est;
    est.q = q;
    est.n_symbols = ns;
    est.h.resize(q * ns);

    if (average) {
        CVector sum(q);
        std::vector<std::size_t> count(q, 0);
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t i = 0; i < pos[s].size(); ++i) {
                sum[pos[s][i]] += ls[s][i];
                ++count[pos[s][i]];
            }
        std::vector<std::size_t> kp;
        CVector vp;
        for (std::size_t k = 0; k < q; ++k)
            if (count[k]) {
                kp.push_back(k);
                vp.push_back(sum[k] / static_cast<double>(count[k]));
            }
        CVector row(q);
        interpolate(kp, vp, row);
        for (std::size_t s = 0; s < ns; ++s)
            std::copy(row.begin(), row.end(), est.h.begin() + static_cast<std::ptrdiff_t>(s * q));
        return est;
    }

    std::vector<std::size_t> with_pilots;
    for (std::size_t s = 0; s < ns; ++s)
        if (!pos[s].empty())
            with_pilots.push_back(s);
    for (std::size_t s : with_pilots)
        interpolate(pos[s], ls[s], std::span<cd>(est.h).subspan(s * q, q));
    for (std::size_t s = 0; s < ns; ++s) {
        if (!pos[s].empty())
            continue;
        std::size_t best = with_pilots.front();
        for (std::size_t c : with_pilots) {
            const auto d = [&](std::size_t a) { return a > s ? a - s : s - a; };
            if (d(c) < d(best))
                best = c;
        }
        std::copy_n(est.h.begin() + static_cast<std::ptrdiff_t>(best * q), q,
                    est.h.begin() + static_cast<std::ptrdiff_t>(s * q));
    }
    return est;
}

Equalized equalize(const ResourceGrid& rx, const ChannelEstimate& estimate, const PilotLayout& layout)
{
    if (rx.q != estimate.q || rx.n_symbols != estimate.n_symbols || rx.q != layout.q)
        throw DimensionError("grid, estimate and pilot layout disagree in shape");
    Equalized eq;
    for (std::size_t s = 0; s < rx.n_symbols; ++s) {
        for (std::size_t k = 0; k < rx.q; ++k) {
            if (layout.mask[s * rx.q + k])
                continue;
            const cd h = estimate.at(k, s);
            if (std::abs(h) < kErasureThreshold) {
                eq.symbols.push_back(cd{});
                eq.erased.push_back(1);
            } else {
                eq.symbols.push_back(rx.at(k, s) / h);
                eq.erased.push_back(0);
            }
        }
    }
    return eq;
}

std::vector<std::uint8_t> detect_bits(const Equalized& eq, unsigned qam_order, std::uint64_t seed)
{
    const unsigned m = bits_per_symbol(qam_order);
    auto bits = demap_qam(eq.symbols, qam_order);
    if (std::find(eq.erased.begin(), eq.erased.end(), 1) == eq.erased.end())
        return bits;
    RngStream rng(seed, {}, "erasure");
    for (std::size_t i = 0; i < eq.erased.size(); ++i) {
        if (!eq.erased[i])
            continue;
        const auto random = rng.bits(m);
        std::copy(random.begin(), random.end(), bits.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    return bits;
}

CVector data_symbols(const ResourceGrid& rg, const PilotLayout& layout)
{
    CVector out;
    for (std::size_t i = 0; i < rg.symbols.size(); ++i)
        if (!layout.mask[i])
            out.push_back(rg.symbols[i]);
    return out;
}

double nmse_db(std::span<const cd> reference, std::span<const cd> estimate)
{
    if (reference.size() != estimate.size())
        throw LengthError("NMSE inputs differ in length");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        err += std::norm(estimate[i] - reference[i]);
        ref += std::norm(reference[i]);
    }
    if (!(ref > 0.0))
        throw ZeroSignal("NMSE reference is all zero");
    if (!(err > 0.0))
        return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(err / ref));
}

double evm_percent(double nmse) { return 100.0 * std::pow(10.0, nmse / 20.0); }

std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    if (tx.size() != rx.size())
        throw LengthError("bit sequences differ in length");
    std::size_t n = 0;
    for (std::size_t i = 0; i < tx.size(); ++i)
        n += (tx[i] != 0) != (rx[i] != 0);
    return n;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    const std::size_t e = bit_errors(tx, rx);
    return tx.empty() ? 0.0 : static_cast<double>(e) / static_cast<double>(tx.size());
}

LinkEvaluation evaluate_link(const ResourceGrid& tx, const ResourceGrid& rx, const WaveformConfig& wf,
                             std::uint64_t seed, bool error_spectrum)
{
    const PilotLayout layout = pilot_layout_of(tx);
    LinkEvaluation ev;
    ev.estimate = estimate_channel(rx, layout, wf.average_pilots);
    ev.equalized = equalize(rx, ev.estimate, layout);
    ev.rx_bits = detect_bits(ev.equalized, wf.qam_order, seed);

    const CVector ref = data_symbols(tx, layout);
    auto& r = ev.report;
    r.nmse_db = nmse_db(ref, ev.equalized.symbols);
    r.sndr_db = sndr_db(r.nmse_db);
    r.evm_percent = evm_percent(r.nmse_db);
    r.n_bits = tx.data_bits.size();
    r.bit_errors = bit_errors(tx.data_bits, ev.rx_bits);
    r.ber = ber(tx.data_bits, ev.rx_bits);

    if (error_spectrum) {
        std::vector<double> err(tx.q, 0.0), pow(tx.q, 0.0);
        std::size_t d = 0;
        for (std::size_t i = 0; i < tx.symbols.size(); ++i) {
            if (layout.mask[i])
                continue;
            const std::size_t k = i % tx.q;
            err[k] += std::norm(ev.equalized.symbols[d] - ref[d]);
            pow[k] += std::norm(ref[d]);
            ++d;
        }
        std::vector<double> spec(tx.q, kNmseFloorDb);
        for (std::size_t k = 0; k < tx.q; ++k)
            if (pow[k] > 0.0 && err[k] > 0.0)
                spec[k] = std::max(kNmseFloorDb, 10.0 * std::log10(err[k] / pow[k]));
        r.error_spectrum_db = std::move(spec);
    }
    return ev;
}

std::vector<std::string> metric_columns()
{
    return {"stripe_id", "ru_id", "ue_id", "seed", "direction", "nmse_db", "sndr_db", "evm_percent", "ber",
            "n_bits", "bit_errors"};
}

std::vector<std::string> metric_row(const MetricReport& r, const RunIds& ids)
{
    return {std::to_string(ids.stripe_id), std::to_string(ids.ru_id), std::to_string(ids.ue_id),
            std::to_string(ids.seed),      ids.direction,             format_double(r.nmse_db),
            format_double(r.sndr_db),      format_double(r.evm_percent), format_double(r.ber),
            std::to_string(r.n_bits),      std::to_string(r.bit_errors)};
}

std::string metrics_csv(const MetricReport& r, const RunIds& ids)
{
    CsvTable t(metric_columns());
    t.add_row(metric_row(r, ids));
    return t.str();
}

std::string metrics_json(const MetricReport& r, const RunIds& ids)
{
    nlohmann::ordered_json j;
    j["stripe_id"] = ids.stripe_id;
    j["ru_id"] = ids.ru_id;
    j["ue_id"] = ids.ue_id;
    j["seed"] = ids.seed;
    j["direction"] = ids.direction;
    j["nmse_db"] = r.nmse_db;
    j["sndr_db"] = r.sndr_db;
    j["evm_percent"] = r.evm_percent;
    j["ber"] = r.ber;
    j["n_bits"] = r.n_bits;
    j["bit_errors"] = r.bit_errors;
    if (r.error_spectrum_db)
        j["error_spectrum_db"] = *r.error_spectrum_db;
    return j.dump(2) + "\n";
}

AmCurve am_am_pair(const TimeWaveform& in, const TimeWaveform& out, std::size_t decimation)
{
    if (decimation == 0)
        throw DomainError("decimation must be at least 1");
    AmCurve c;
    if (in.bulk_delay > in.size() || out.bulk_delay > out.size())
        return c;
    const std::size_t n = std::min(in.size() - in.bulk_delay, out.size() - out.bulk_delay);
    for (std::size_t i = 0; i < n; i += decimation) {
        c.x.push_back(std::abs(in.samples[in.bulk_delay + i]));
        c.y.push_back(std::abs(out.samples[out.bulk_delay + i]));
    }
    return c;
}

AmCurve am_pm_pair(const TimeWaveform& in, const TimeWaveform& out, std::size_t decimation)
{
    if (decimation == 0)
        throw DomainError("decimation must be at least 1");
    AmCurve c;
    if (in.bulk_delay > in.size() || out.bulk_delay > out.size())
        return c;
    const std::size_t n = std::min(in.size() - in.bulk_delay, out.size() - out.bulk_delay);
    for (std::size_t i = 0; i < n; i += decimation) {
        const cd a = in.samples[in.bulk_delay + i];
        const cd b = out.samples[out.bulk_delay + i];
        c.x.push_back(std::abs(a));
        c.y.push_back(wrap_phase(std::arg(b) - std::arg(a)));
    }
    return c;
}

std::vector<AmCurve> am_am_extract(std::span<const StageTap> taps, std::size_t decimation)
{
    std::vector<AmCurve> curves;
    for (const auto& t : taps) {
        curves.push_back(am_am_pair(t.input, t.output, decimation));
        curves.back().label = t.label;
    }
    return curves;
}

std::vector<AmCurve> am_pm_extract(std::span<const StageTap> taps, std::size_t decimation)
{
    std::vector<AmCurve> curves;
    for (const auto& t : taps) {
        curves.push_back(am_pm_pair(t.input, t.output, decimation));
        curves.back().label = t.label;
    }
    return curves;
}

AmStats am_am_stats(const AmCurve& curve, std::size_t bins)
{
    const std::size_t n = curve.x.size();
    if (n == 0 || curve.y.size() != n)
        throw LengthError("AM/AM curve is empty or ragged");
    if (bins == 0)
        throw DomainError("bin count must be positive");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return curve.x[a] < curve.x[b] || (curve.x[a] == curve.x[b] && a < b);
    });

    AmStats st;
    const std::size_t low = std::max<std::size_t>(1, n / 4);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < low; ++i) {
        const std::size_t j = order[i];
        sxy += curve.x[j] * curve.y[j];
        sxx += curve.x[j] * curve.x[j];
    }
    st.small_signal_gain = sxx > 0.0 ? sxy / sxx : 0.0;

    const std::size_t top = std::max<std::size_t>(1, n / 100);
    double py = 0.0, px = 0.0;
    for (std::size_t i = n - top; i < n; ++i) {
        const std::size_t j = order[i];
        py += curve.y[j] * curve.y[j];
        px += curve.x[j] * curve.x[j];
    }
    const double g2 = st.small_signal_gain * st.small_signal_gain;
    st.compression = (g2 > 0.0 && px > 0.0) ? py / (g2 * px) : 0.0;

    // Residual about a straight-line fit inside each drive bin, so the curve's own slope
    // does not count as scatter.
    const double xmax = curve.x[order.back()];
    struct Fit {
        double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    };
    std::vector<Fit> fit(bins);
    auto bin_of = [&](double x) {
        if (!(xmax > 0.0))
            return std::size_t{0};
        return std::min(bins - 1, static_cast<std::size_t>(x / xmax * static_cast<double>(bins)));
    };
    double y2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& f = fit[bin_of(curve.x[i])];
        const double x = curve.x[i], y = curve.y[i];
        f.n += 1.0;
        f.sx += x;
        f.sy += y;
        f.sxx += x * x;
        f.sxy += x * y;
        y2 += y * y;
    }
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = fit[bin_of(curve.x[i])];
        const double det = f.n * f.sxx - f.sx * f.sx;
        double pred = f.sy / f.n;
        if (f.n >= 3.0 && det > 1e-12 * f.n * f.sxx) {
            const double slope = (f.n * f.sxy - f.sx * f.sy) / det;
            pred = (f.sy - slope * f.sx) / f.n + slope * curve.x[i];
        }
        const double d = curve.y[i] - pred;
        resid += d * d;
    }
    st.scatter = y2 > 0.0 ? resid / y2 : 0.0;
    return st;
}

std::string am_curves_csv(std::span<const AmCurve> curves)
{
    std::vector<std::string> cols;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        cols.push_back("xstage" + std::to_string(i));
        cols.push_back("ystage" + std::to_string(i));
        rows = std::max(rows, curves[i].x.size());
    }
    CsvTable t(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::string> cells;
        for (const auto& c : curves) {
            cells.push_back(r < c.x.size() ? format_double(c.x[r]) : "");
            cells.push_back(r < c.y.size() ? format_double(c.y[r]) : "");
        }
        t.add_row(std::move(cells));
    }
    return t.str();
}

} // namespace stripesim
