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

#include "stripesim/touchstone.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/fft.hpp"
#include "stripesim/log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace stripesim {

namespace {

std::string upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
            ++j;
        if (j > i)
            tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

std::optional<double> to_double(std::string_view tok)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        return std::nullopt;
    return v;
}

struct Options {
    double freq_scale = 1e9;
    SParamFormat format = SParamFormat::MA;
    double impedance = 50.0;
};

Options parse_option_line(std::string_view line, std::size_t line_no)
{
    Options opt;
    auto tokens = split_ws(line.substr(1));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string t = upper(tokens[i]);
        if (t == "HZ")
            opt.freq_scale = 1.0;
        else if (t == "KHZ")
            opt.freq_scale = 1e3;
        else if (t == "MHZ")
            opt.freq_scale = 1e6;
        else if (t == "GHZ")
            opt.freq_scale = 1e9;
        else if (t == "S")
            continue;
        else if (t == "RI")
            opt.format = SParamFormat::RI;
        else if (t == "MA")
            opt.format = SParamFormat::MA;
        else if (t == "DB")
            opt.format = SParamFormat::DB;
        else if (t == "R") {
            std::optional<double> r;
            if (i + 1 < tokens.size())
                r = to_double(tokens[++i]);
            if (!r || !(*r > 0.0))
                throw TouchstoneError(TouchstoneError::Kind::UnknownFormat,
                                      "line " + std::to_string(line_no) + ": invalid reference impedance");
            opt.impedance = *r;
        }
        else
            throw TouchstoneError(TouchstoneError::Kind::UnknownFormat,
                                  "line " + std::to_string(line_no) + ": unsupported option token '" +
                                      std::string(tokens[i]) + "'");
    }
    return opt;
}

cd decode_pair(double a, double b, SParamFormat format)
{
    switch (format) {
    case SParamFormat::RI:
        return {a, b};
    case SParamFormat::MA:
        return std::polar(a, b * kPi / 180.0);
    case SParamFormat::DB:
        return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    return {};
}

void append_number(std::string& out, double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

} // namespace

TwoPortNetwork parse_touchstone(std::istream& in, Warnings* warnings)
{
    TwoPortNetwork net;
    std::optional<Options> opt;
    std::string raw;
    std::size_t line_no = 0;
    bool in_noise_block = false;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (auto bang = line.find('!'); bang != std::string_view::npos)
            line = line.substr(0, bang);
        auto tokens = split_ws(line);
        if (tokens.empty())
            continue;

        if (tokens.front().front() == '#') {
            if (!opt)
                opt = parse_option_line(line.substr(line.find('#')), line_no);
            continue;
        }
        if (in_noise_block)
            continue;
        if (!opt)
            throw TouchstoneError(TouchstoneError::Kind::MissingOptionLine,
                                  "line " + std::to_string(line_no) + ": data before option line");

        std::vector<double> values;
        values.reserve(tokens.size());
        for (auto tok : tokens) {
            auto v = to_double(tok);
            if (!v)
                throw TouchstoneError(TouchstoneError::Kind::BadRowArity,
                                      "line " + std::to_string(line_no) + ": non-numeric field '" +
                                          std::string(tok) + "'");
            values.push_back(*v);
        }

        const double f = values.front() * opt->freq_scale;
        if (values.size() == 5 && !net.freqs.empty() && f <= net.freqs.back()) {
            in_noise_block = true;
            const std::string msg = "line " + std::to_string(line_no) + ": noise parameters ignored";
            log().warn("touchstone: {}", msg);
            if (warnings)
                warnings->push_back(msg);
            continue;
        }
        if (values.size() != 9)
            throw TouchstoneError(TouchstoneError::Kind::BadRowArity,
                                  "line " + std::to_string(line_no) + ": expected 9 values, got " +
                                      std::to_string(values.size()));
        if (!net.freqs.empty() && !(f > net.freqs.back()))
            throw TouchstoneError(TouchstoneError::Kind::NonMonotonicFrequency,
                                  "line " + std::to_string(line_no) + ": frequency not increasing");

        net.freqs.push_back(f);
        net.s11.push_back(decode_pair(values[1], values[2], opt->format));
        net.s21.push_back(decode_pair(values[3], values[4], opt->format));
        net.s12.push_back(decode_pair(values[5], values[6], opt->format));
        net.s22.push_back(decode_pair(values[7], values[8], opt->format));
    }

    if (!opt)
        throw TouchstoneError(TouchstoneError::Kind::MissingOptionLine, "no option line found");
    net.ref_impedance = opt->impedance;
    net.source_format = opt->format;
    return net;
}

TwoPortNetwork parse_touchstone(std::string_view text, Warnings* warnings)
{
    std::istringstream in{std::string(text)};
    return parse_touchstone(in, warnings);
}

TwoPortNetwork load_touchstone(const std::filesystem::path& path, Warnings* warnings)
{
    std::ifstream in(path);
    if (!in)
        throw TouchstoneError(TouchstoneError::Kind::FileNotFound, "cannot open " + path.string());
    try {
        return parse_touchstone(in, warnings);
    }
    catch (const TouchstoneError& e) {
        throw TouchstoneError(e.kind(), path.string() + ": " + e.what());
    }
}

std::string format_touchstone(const TwoPortNetwork& net, SParamFormat format, FrequencyUnit unit)
{
    double scale = 1e9;
    const char* unit_name = "GHz";
    switch (unit) {
    case FrequencyUnit::Hz: scale = 1.0; unit_name = "Hz"; break;
    case FrequencyUnit::kHz: scale = 1e3; unit_name = "kHz"; break;
    case FrequencyUnit::MHz: scale = 1e6; unit_name = "MHz"; break;
    case FrequencyUnit::GHz: break;
    }
    const char* fmt_name = format == SParamFormat::RI ? "RI" : format == SParamFormat::MA ? "MA" : "DB";

    std::string out = "! written by stripesim\n# ";
    out += unit_name;
    out += " S ";
    out += fmt_name;
    out += " R ";
    append_number(out, net.ref_impedance);
    out += '\n';

    auto encode = [&](cd s) {
        double a = 0.0, b = 0.0;
        if (format == SParamFormat::RI) {
            a = s.real();
            b = s.imag();
        }
        else {
            a = format == SParamFormat::MA ? std::abs(s) : 20.0 * std::log10(std::abs(s));
            b = std::arg(s) * 180.0 / kPi;
        }
        out += ' ';
        append_number(out, a);
        out += ' ';
        append_number(out, b);
    };
    for (std::size_t i = 0; i < net.size(); ++i) {
        append_number(out, net.freqs[i] / scale);
        encode(net.s11[i]);
        encode(net.s21[i]);
        encode(net.s12[i]);
        encode(net.s22[i]);
        out += '\n';
    }
    return out;
}

FrequencyResponse interpolate_s21(const TwoPortNetwork& net, const SubcarrierGrid& grid, Warnings* warnings)
{
    if (net.freqs.empty())
        throw TouchstoneError(TouchstoneError::Kind::EmptyNetwork, "network has no data points");

    FrequencyResponse fr{grid, CVector(grid.q())};
    const auto& f = net.freqs;
    bool clamped = false;
    for (std::size_t q = 0; q < grid.q(); ++q) {
        const double fq = grid.frequency(q);
        if (fq <= f.front()) {
            clamped |= fq < f.front();
            fr.h[q] = net.s21.front();
            continue;
        }
        if (fq >= f.back()) {
            clamped |= fq > f.back();
            fr.h[q] = net.s21.back();
            continue;
        }
        const auto hi = static_cast<std::size_t>(std::upper_bound(f.begin(), f.end(), fq) - f.begin());
        const std::size_t lo = hi - 1;
        const double t = (fq - f[lo]) / (f[hi] - f[lo]);
        const cd a = net.s21[lo];
        const cd b = net.s21[hi];
        fr.h[q] = {a.real() + t * (b.real() - a.real()), a.imag() + t * (b.imag() - a.imag())};
    }
    if (clamped) {
        const std::string msg = "S21 trace does not cover the subcarrier grid; endpoint values extrapolated";
        log().warn("touchstone: {}", msg);
        if (warnings)
            warnings->push_back(msg);
    }
    return fr;
}

FrequencyResponse flat_response(const SubcarrierGrid& grid, cd value)
{
    return {grid, CVector(grid.q(), value)};
}

ImpulseResponse to_impulse_response(const FrequencyResponse& fr, std::size_t taps)
{
    const std::size_t q = fr.h.size();
    if (taps < 1 || taps > q)
        throw DomainError("impulse response length must be in [1, Q], got " + std::to_string(taps));

    CVector h = fft::ifftshift(fr.h);
    fft::inverse(h);
    const double inv_q = 1.0 / static_cast<double>(q);
    double total = 0.0, kept = 0.0;
    for (std::size_t n = 0; n < q; ++n) {
        h[n] *= inv_q;
        const double e = std::norm(h[n]);
        total += e;
        if (n < taps)
            kept += e;
    }
    h.resize(taps);
    return {std::move(h), fr.grid.critical_rate(), total > 0.0 ? kept / total : 1.0};
}

std::size_t effective_length(const FrequencyResponse& fr, double fraction)
{
    const auto full = to_impulse_response(fr, fr.h.size());
    double total = 0.0;
    for (const auto& v : full.h)
        total += std::norm(v);
    if (total == 0.0)
        return 1;
    double acc = 0.0;
    for (std::size_t n = 0; n < full.h.size(); ++n) {
        acc += std::norm(full.h[n]);
        if (acc >= fraction * total)
            return n + 1;
    }
    return full.h.size();
}

} // namespace stripesim
