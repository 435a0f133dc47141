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

#include "stripesim/config.hpp"

#include "stripesim/errors.hpp"
#include "stripesim/log.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <exception>
#include <map>
#include <set>
#include <sstream>

namespace stripesim {
namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

void warn(Warnings* warnings, std::string message)
{
    log().warn("{}", message);
    if (warnings)
        warnings->push_back(std::move(message));
}

// ----- Mapping access with case-insensitive keys -----------------------------

class Section {
public:
    Section(const YAML::Node& node, std::string path, Warnings* warnings)
        : path_(std::move(path)), warnings_(warnings), exceptions_(std::uncaught_exceptions())
    {
        if (!node.IsMap())
            throw SchemaError(describe() + " must be a mapping");
        for (const auto& kv : node) {
            const std::string key = lower(kv.first.as<std::string>());
            if (entries_.count(key))
                throw SchemaError("duplicate key '" + key + "' in " + describe());
            entries_.emplace(key, kv.second);
            order_.push_back(key);
        }
    }

    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    ~Section()
    {
        // Keys after a failing one were never read; they are not unknown.
        if (std::uncaught_exceptions() > exceptions_)
            return;
        for (const auto& key : order_)
            if (!used_.count(key))
                warn(warnings_, "ignoring unknown key '" + key + "' in " + describe());
    }

    bool has(std::string_view key) const { return entries_.count(std::string(key)) != 0; }

    /// First present key among the aliases, or an undefined node.
    YAML::Node get(std::initializer_list<std::string_view> keys)
    {
        for (auto key : keys) {
            auto it = entries_.find(std::string(key));
            if (it != entries_.end()) {
                used_.insert(it->first);
                return it->second;
            }
        }
        return YAML::Node(YAML::NodeType::Undefined);
    }

    YAML::Node require(std::initializer_list<std::string_view> keys)
    {
        YAML::Node n = get(keys);
        if (!n.IsDefined() || n.IsNull())
            throw SchemaError("missing required key '" + std::string(*keys.begin()) + "' in " + describe());
        return n;
    }

    std::string child(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
    Warnings* warnings() const { return warnings_; }

private:
    std::string describe() const { return path_.empty() ? "document root" : "'" + path_ + "'"; }

    std::string path_;
    Warnings* warnings_;
    int exceptions_;
    std::map<std::string, YAML::Node> entries_;
    std::vector<std::string> order_;
    std::set<std::string> used_;
};

bool present(const YAML::Node& n) { return n.IsDefined() && !n.IsNull(); }

double to_double(const YAML::Node& n, const std::string& what)
{
    if (!n.IsScalar())
        throw SchemaError("'" + what + "' must be a number");
    double v = 0.0;
    try {
        v = n.as<double>();
    } catch (const YAML::Exception&) {
        throw SchemaError("'" + what + "' must be a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v))
        throw SchemaError("'" + what + "' must be finite");
    return v;
}

double positive(const YAML::Node& n, const std::string& what)
{
    const double v = to_double(n, what);
    if (!(v > 0.0))
        throw SchemaError("'" + what + "' must be positive");
    return v;
}

std::size_t to_count(const YAML::Node& n, const std::string& what)
{
    const double v = to_double(n, what);
    if (v < 0.0 || v != std::floor(v) || v > 1e12)
        throw SchemaError("'" + what + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string to_string_value(const YAML::Node& n, const std::string& what)
{
    if (!n.IsScalar())
        throw SchemaError("'" + what + "' must be a string");
    return n.Scalar();
}

bool to_bool(const YAML::Node& n, const std::string& what)
{
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw SchemaError("'" + what + "' must be true or false");
    }
}

Vec3 to_vec3(const YAML::Node& n, const std::string& what, Warnings* warnings)
{
    if (n.IsSequence()) {
        if (n.size() != 3)
            throw SchemaError("'" + what + "' must have three coordinates");
        return {to_double(n[0], what + "[0]"), to_double(n[1], what + "[1]"), to_double(n[2], what + "[2]")};
    }
    if (n.IsMap()) {
        Section s(n, what, warnings);
        return {to_double(s.require({"x"}), what + ".x"), to_double(s.require({"y"}), what + ".y"),
                to_double(s.require({"z"}), what + ".z")};
    }
    throw SchemaError("'" + what + "' must be a list [x, y, z] or a mapping {x, y, z}");
}

cd to_complex(const YAML::Node& n, const std::string& what)
{
    if (n.IsSequence()) {
        if (n.size() != 2)
            throw SchemaError("'" + what + "' must be [re, im]");
        return {to_double(n[0], what + "[0]"), to_double(n[1], what + "[1]")};
    }
    return {to_double(n, what), 0.0};
}

YAML::Node parse_document(std::string_view text)
{
    try {
        YAML::Node root = YAML::Load(std::string(text));
        if (!root.IsDefined() || root.IsNull())
            throw SchemaError("empty configuration document");
        return root;
    } catch (const YAML::ParserException& e) {
        throw ParseError(std::string("malformed YAML: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Wraps yaml-cpp conversion errors raised while walking the tree.
template <typename F>
auto guarded(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const YAML::ParserException& e) {
        throw ParseError(std::string("malformed YAML: ") + e.what());
    } catch (const YAML::Exception& e) {
        throw SchemaError(std::string("invalid configuration: ") + e.what());
    }
}

// ----- Environment ------------------------------------------------------------

Node parse_node(const YAML::Node& n, const std::string& what, Warnings* warnings)
{
    auto kind_from = [&](const std::string& tag) {
        const std::string t = lower(tag);
        if (t == "central_unit" || t == "cu")
            return NodeKind::CentralUnit;
        if (t == "radio_unit" || t == "ru")
            return NodeKind::RadioUnit;
        throw SchemaError("unknown node kind '" + tag + "' in " + what);
    };

    if (!n.IsMap())
        throw SchemaError("'" + what + "' must be a mapping");
    // Short form: {central_unit: [x, y, z]}
    if (n.size() == 1) {
        const auto kv = *n.begin();
        const std::string key = lower(kv.first.as<std::string>());
        if (key != "kind" && key != "position")
            return {kind_from(key), to_vec3(kv.second, what + "." + key, warnings)};
    }
    Section s(n, what, warnings);
    Node node;
    node.kind = kind_from(to_string_value(s.require({"kind", "type"}), s.child("kind")));
    if (YAML::Node p = s.get({"position", "pos"}); present(p))
        node.position = to_vec3(p, s.child("position"), warnings);
    else
        node.position = {to_double(s.require({"x"}), s.child("x")), to_double(s.require({"y"}), s.child("y")),
                         to_double(s.require({"z"}), s.child("z"))};
    return node;
}

Vec3 axis_for(const std::string& tag)
{
    if (tag == "x")
        return {1.0, 0.0, 0.0};
    if (tag == "y")
        return {0.0, 1.0, 0.0};
    return {0.0, 0.0, 1.0};
}

std::vector<std::vector<Node>> generate_stripes(const StripeLayout& layout, const Vec3& axis)
{
    if (!layout.start_position)
        throw SchemaError("stripe_config needs start_position when radio_stripes is not given");
    if (layout.n_stripes < 1 || layout.n_rus < 1)
        throw SchemaError("stripe_config needs n_stripes >= 1 and n_rus >= 1");
    if (!(layout.inter_ru_spacing > 0.0))
        throw SchemaError("stripe_config.inter_ru_spacing must be positive");
    if (layout.n_stripes > 1 && !(layout.inter_stripe_spacing > 0.0))
        throw SchemaError("stripe_config.inter_stripe_spacing must be positive");

    Vec3 across = Vec3{0.0, 0.0, 1.0}.cross(axis);
    if (across.norm() < 1e-12)
        across = {1.0, 0.0, 0.0};
    across = across.normalized();

    std::vector<std::vector<Node>> stripes(layout.n_stripes);
    for (std::size_t s = 0; s < layout.n_stripes; ++s) {
        const Vec3 head = *layout.start_position + across * (layout.inter_stripe_spacing * static_cast<double>(s));
        stripes[s].push_back({NodeKind::CentralUnit, head});
        for (std::size_t i = 1; i <= layout.n_rus; ++i)
            stripes[s].push_back({NodeKind::RadioUnit, head + axis * (layout.inter_ru_spacing * static_cast<double>(i))});
    }
    return stripes;
}

bool inside(const Vec3& p, const Vec3& room)
{
    constexpr double eps = 1e-9;
    return p.x >= -eps && p.y >= -eps && p.z >= -eps && p.x <= room.x + eps && p.y <= room.y + eps &&
           p.z <= room.z + eps;
}

std::string format_point(const Vec3& p)
{
    std::ostringstream ss;
    ss << "(" << p.x << ", " << p.y << ", " << p.z << ")";
    return ss.str();
}

void check_geometry(const EnvironmentConfig& env)
{
    if (env.radio_stripes.empty())
        throw GeometryError("no radio stripes configured");
    for (std::size_t s = 0; s < env.radio_stripes.size(); ++s) {
        const auto& stripe = env.radio_stripes[s];
        if (stripe.empty() || stripe.front().kind != NodeKind::CentralUnit)
            throw GeometryError("stripe " + std::to_string(s) + " does not start with a central unit");
        if (stripe.size() < 2)
            throw GeometryError("stripe " + std::to_string(s) + " has no radio units");
        for (std::size_t i = 0; i < stripe.size(); ++i) {
            if (i > 0 && stripe[i].kind == NodeKind::CentralUnit)
                throw GeometryError("stripe " + std::to_string(s) + " has more than one central unit");
            if (!inside(stripe[i].position, env.room))
                throw GeometryError("stripe " + std::to_string(s) + " node " + std::to_string(i) + " at " +
                                    format_point(stripe[i].position) + " lies outside the room");
            if (i > 0 && distance(stripe[i].position, stripe[i - 1].position) <= 0.0)
                throw GeometryError("stripe " + std::to_string(s) + " has coincident nodes " + std::to_string(i - 1) +
                                    " and " + std::to_string(i));
        }
    }
    for (std::size_t u = 0; u < env.ue_positions.size(); ++u)
        if (!inside(env.ue_positions[u], env.room))
            throw GeometryError("UE " + std::to_string(u) + " at " + format_point(env.ue_positions[u]) +
                                " lies outside the room");
}

PatternKind parse_pattern(const std::string& tag)
{
    const std::string t = lower(tag);
    if (t == "isotropic" || t == "iso")
        return PatternKind::Isotropic;
    if (t == "tr38901" || t == "38.901" || t == "38901" || t == "3gpp" || t == "tr38.901")
        return PatternKind::Tr38901;
    throw UnsupportedModel("unknown antenna pattern '" + tag + "'");
}

EnvironmentConfig parse_environment_node(const YAML::Node& root, Warnings* warnings)
{
    EnvironmentConfig env;
    Section top(root, "", warnings);

    const YAML::Node room = top.require({"room", "room_size"});
    env.room = to_vec3(room, "room", warnings);
    if (!(env.room.x > 0.0 && env.room.y > 0.0 && env.room.z > 0.0))
        throw SchemaError("room extents must be positive");

    if (YAML::Node sc = top.get({"stripe_config"}); present(sc)) {
        Section s(sc, "stripe_config", warnings);
        auto& l = env.stripe_config;
        if (auto n = s.get({"n_stripes"}); present(n))
            l.n_stripes = to_count(n, "stripe_config.n_stripes");
        if (auto n = s.get({"n_rus"}); present(n))
            l.n_rus = to_count(n, "stripe_config.n_rus");
        if (auto n = s.get({"inter_ru_spacing"}); present(n))
            l.inter_ru_spacing = to_double(n, "stripe_config.inter_ru_spacing");
        if (auto n = s.get({"inter_stripe_spacing"}); present(n))
            l.inter_stripe_spacing = to_double(n, "stripe_config.inter_stripe_spacing");
        if (auto n = s.get({"start_position", "start"}); present(n))
            l.start_position = to_vec3(n, "stripe_config.start_position", warnings);
        if (auto n = s.get({"end_position", "end"}); present(n))
            l.end_position = to_vec3(n, "stripe_config.end_position", warnings);
        if (auto n = s.get({"orientation"}); present(n)) {
            l.orientation = lower(to_string_value(n, "stripe_config.orientation"));
            if (l.orientation != "x" && l.orientation != "y" && l.orientation != "z" && l.orientation != "auto")
                throw SchemaError("stripe_config.orientation must be x, y, z or auto");
        }
    }

    if (YAML::Node rs = top.get({"radio_stripes"}); present(rs)) {
        if (!rs.IsSequence())
            throw SchemaError("'radio_stripes' must be a list of stripes");
        for (std::size_t s = 0; s < rs.size(); ++s) {
            const std::string what = "radio_stripes[" + std::to_string(s) + "]";
            YAML::Node nodes = rs[s];
            if (nodes.IsMap()) {
                Section st(nodes, what, warnings);
                nodes = st.require({"nodes"});
            }
            if (!nodes.IsSequence())
                throw SchemaError("'" + what + "' must be a list of nodes");
            std::vector<Node> stripe;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                stripe.push_back(parse_node(nodes[i], what + "[" + std::to_string(i) + "]", warnings));
            env.radio_stripes.push_back(std::move(stripe));
        }
    } else {
        env.radio_stripes = generate_stripes(env.stripe_config, env.stripe_axis());
    }

    if (YAML::Node ues = top.get({"ue_positions", "ues", "users"}); present(ues)) {
        if (!ues.IsSequence())
            throw SchemaError("'ue_positions' must be a list");
        for (std::size_t u = 0; u < ues.size(); ++u)
            env.ue_positions.push_back(to_vec3(ues[u], "ue_positions[" + std::to_string(u) + "]", warnings));
    }

    if (YAML::Node band = top.get({"sub_thz", "subthz"}); present(band)) {
        Section s(band, "sub_thz", warnings);
        SubThzBand b;
        b.fc = positive(s.require({"fc"}), "sub_thz.fc");
        b.bw = positive(s.require({"bw", "bandwidth"}), "sub_thz.bw");
        b.num_subcarriers = to_count(s.require({"num_subcarriers", "q"}), "sub_thz.num_subcarriers");
        if (!is_power_of_two(b.num_subcarriers) || b.num_subcarriers < 2)
            throw SchemaError("sub_thz.num_subcarriers must be a power of two, got " + std::to_string(b.num_subcarriers));
        env.sub_thz = b;
    }

    if (YAML::Node ant = top.get({"antenna", "antennas"}); present(ant)) {
        Section s(ant, "antenna", warnings);
        auto& a = env.antenna;
        if (auto n = s.get({"n_antennas", "ru_antennas"}); present(n))
            a.n_antennas = to_count(n, "antenna.n_antennas");
        if (auto n = s.get({"ue_antennas", "n_ue_antennas"}); present(n))
            a.ue_antennas = to_count(n, "antenna.ue_antennas");
        if (auto n = s.get({"polarization"}); present(n))
            a.polarization = to_string_value(n, "antenna.polarization");
        if (auto n = s.get({"pattern"}); present(n))
            a.pattern = parse_pattern(to_string_value(n, "antenna.pattern"));
        if (auto n = s.get({"ru_boresight"}); present(n))
            a.ru_boresight = to_vec3(n, "antenna.ru_boresight", warnings);
        if (auto n = s.get({"ue_boresight"}); present(n))
            a.ue_boresight = to_vec3(n, "antenna.ue_boresight", warnings);
        if (a.n_antennas < 1 || a.ue_antennas < 1)
            throw SchemaError("antenna counts must be at least 1");
        if (a.ru_boresight.norm() == 0.0 || a.ue_boresight.norm() == 0.0)
            throw SchemaError("antenna boresight vectors must be nonzero");
    }

    env.central_unit_fiber_length =
        positive(top.require({"central_unit_fiber_length", "cu_fiber_length"}), "central_unit_fiber_length");

    if (YAML::Node sub10 = top.get({"sub10ghz", "sub_10ghz"}); sub10.IsDefined()) {
        YAML::Emitter e;
        e << sub10;
        env.sub10ghz_yaml = e.c_str();
    }

    check_geometry(env);
    return env;
}

// ----- Waveform ---------------------------------------------------------------

WaveformConfig parse_waveform_node(const YAML::Node& root, std::optional<std::size_t> num_subcarriers,
                                   Warnings* warnings)
{
    WaveformConfig wf;
    Section s(root, "", warnings);

    if (auto n = s.get({"waveform_type", "waveform"}); present(n)) {
        const std::string t = lower(to_string_value(n, "waveform_type"));
        if (t != "cp-ofdm" && t != "cp_ofdm" && t != "cpofdm" && t != "ofdm")
            throw UnsupportedModel("unsupported waveform_type '" + n.Scalar() + "' (only cp-ofdm)");
        wf.waveform_type = "cp-ofdm";
    }
    wf.n_ofdm_symbols = to_count(s.require({"n_ofdm_symbols"}), "n_ofdm_symbols");
    if (wf.n_ofdm_symbols < 1)
        throw SchemaError("n_ofdm_symbols must be at least 1");
    wf.qam_order = static_cast<unsigned>(to_count(s.require({"qam_order"}), "qam_order"));
    bits_per_symbol(wf.qam_order);
    if (auto n = s.get({"oversampling_factor", "oversampling"}); present(n))
        wf.oversampling_factor = to_count(n, "oversampling_factor");
    if (wf.oversampling_factor < 1)
        throw SchemaError("oversampling_factor must be at least 1");
    wf.cp_length = to_count(s.require({"cp_length"}), "cp_length");
    wf.pilot_spacing = to_count(s.require({"pilot_spacing"}), "pilot_spacing");
    if (wf.pilot_spacing < 1)
        throw SchemaError("pilot_spacing must be at least 1");
    if (auto n = s.get({"pilot_mode"}); present(n)) {
        const std::string m = lower(to_string_value(n, "pilot_mode"));
        if (m == "scattered" || m == "comb")
            wf.pilot_mode = PilotMode::Scattered;
        else if (m == "block")
            wf.pilot_mode = PilotMode::Block;
        else
            throw UnsupportedMode("pilot_mode must be scattered or block, got '" + n.Scalar() + "'");
    }
    if (wf.pilot_mode == PilotMode::Block && wf.n_ofdm_symbols < 2)
        throw SchemaError("block pilots need at least two OFDM symbols");
    if (auto n = s.get({"tx_power", "tx_power_dbm"}); present(n))
        wf.tx_power_dbm = to_double(n, "tx_power");
    wf.tx_power_w = dbm_to_watts(wf.tx_power_dbm);
    if (auto n = s.get({"average_pilots"}); present(n))
        wf.average_pilots = to_bool(n, "average_pilots");
    if (auto n = s.get({"num_subcarriers"}); present(n))
        wf.num_subcarriers = to_count(n, "num_subcarriers");

    if (num_subcarriers)
        wf.validate_against(*num_subcarriers);
    else if (wf.num_subcarriers)
        wf.validate_against(*wf.num_subcarriers);
    return wf;
}

// ----- Components -------------------------------------------------------------

std::string amp_mode_tag(AmplifierMode m)
{
    switch (m) {
    case AmplifierMode::Ideal: return "ideal";
    case AmplifierMode::Tanh: return "tanh";
    case AmplifierMode::Atan: return "atan";
    case AmplifierMode::Polynomial: return "polynomial";
    case AmplifierMode::SoftLimiter: return "soft_limiter";
    }
    return "ideal";
}

AmplifierParams parse_amplifier(const YAML::Node& n, const std::string& what, Warnings* warnings)
{
    AmplifierParams p;
    Section s(n, what, warnings);
    if (auto m = s.get({"model", "mode"}); present(m)) {
        const std::string t = lower(to_string_value(m, s.child("model")));
        if (t == "ideal" || t == "linear")
            p.mode = AmplifierMode::Ideal;
        else if (t == "tanh")
            p.mode = AmplifierMode::Tanh;
        else if (t == "atan" || t == "arctan")
            p.mode = AmplifierMode::Atan;
        else if (t == "polynomial" || t == "poly")
            p.mode = AmplifierMode::Polynomial;
        else if (t == "soft_limiter" || t == "softlimiter" || t == "limiter")
            p.mode = AmplifierMode::SoftLimiter;
        else
            throw UnsupportedModel("unknown amplifier model '" + m.Scalar() + "' in " + what);
    }
    if (auto v = s.get({"gain_db", "gain"}); present(v))
        p.gain_db = to_double(v, s.child("gain_db"));
    if (auto v = s.get({"sat_amplitude", "saturation", "a_sat"}); present(v))
        p.sat_amplitude = positive(v, s.child("sat_amplitude"));
    if (auto v = s.get({"coeffs", "poly_coeffs", "coefficients"}); present(v)) {
        if (!v.IsSequence())
            throw SchemaError("'" + s.child("coeffs") + "' must be a list");
        for (std::size_t i = 0; i < v.size(); ++i)
            p.poly_coeffs.push_back(to_complex(v[i], s.child("coeffs") + "[" + std::to_string(i) + "]"));
    }
    if (p.mode == AmplifierMode::Polynomial && p.poly_coeffs.empty())
        throw SchemaError("polynomial amplifier '" + what + "' needs coeffs");
    if (auto v = s.get({"nf_db", "noise_figure", "nf"}); present(v)) {
        p.nf_db = to_double(v, s.child("nf_db"));
        if (p.nf_db < 0.0)
            throw SchemaError("'" + s.child("nf_db") + "' must be non-negative");
    }
    if (auto v = s.get({"bandwidth", "noise_bandwidth"}); present(v))
        p.bandwidth = positive(v, s.child("bandwidth"));
    if (auto v = s.get({"temperature"}); present(v))
        p.temperature = positive(v, s.child("temperature"));
    return p;
}

std::string linear_model_tag(LinearModel m)
{
    switch (m) {
    case LinearModel::Ideal: return "ideal";
    case LinearModel::FixedDamping: return "fixed_damping";
    case LinearModel::S2pFilter: return "s2p_filter";
    }
    return "ideal";
}

LinearElementParams parse_linear(const YAML::Node& n, const std::string& what, const std::filesystem::path& base_dir,
                                 Warnings* warnings)
{
    LinearElementParams p;
    Section s(n, what, warnings);
    if (auto m = s.get({"model", "mode"}); present(m)) {
        const std::string t = lower(to_string_value(m, s.child("model")));
        if (t == "ideal")
            p.model = LinearModel::Ideal;
        else if (t == "fixed_damping" || t == "damping" || t == "fixed")
            p.model = LinearModel::FixedDamping;
        else if (t == "s2p_filter" || t == "s2p" || t == "filter")
            p.model = LinearModel::S2pFilter;
        else
            throw UnsupportedModel("unknown model '" + m.Scalar() + "' in " + what);
    }
    if (auto v = s.get({"loss_db", "damping_db", "loss"}); present(v))
        p.loss_db = to_double(v, s.child("loss_db"));
    if (auto v = s.get({"loss_db_per_m"}); present(v))
        p.loss_db_per_m = to_double(v, s.child("loss_db_per_m"));
    if (auto v = s.get({"domain"}); present(v)) {
        const std::string t = lower(to_string_value(v, s.child("domain")));
        if (t == "frequency" || t == "freq")
            p.domain = ApplyDomain::Frequency;
        else if (t == "time")
            p.domain = ApplyDomain::Time;
        else
            throw UnsupportedMode("domain must be frequency or time in " + what);
    }
    if (auto v = s.get({"length", "length_m"}); present(v)) {
        p.length_m = to_double(v, s.child("length"));
        if (p.length_m < 0.0)
            throw SchemaError("'" + s.child("length") + "' must be non-negative");
    }
    if (auto v = s.get({"group_velocity", "velocity"}); present(v))
        p.group_velocity = positive(v, s.child("group_velocity"));
    if (auto v = s.get({"taps", "impulse_taps"}); present(v)) {
        p.taps = to_count(v, s.child("taps"));
        if (p.taps < 1)
            throw SchemaError("'" + s.child("taps") + "' must be at least 1");
    }
    if (auto v = s.get({"file", "s2p", "path"}); present(v)) {
        std::filesystem::path f = to_string_value(v, s.child("file"));
        if (f.is_relative())
            f = base_dir / f;
        p.file = std::filesystem::absolute(f).lexically_normal().string();
    }
    if (p.model == LinearModel::S2pFilter) {
        if (p.file.empty())
            throw SchemaError("s2p_filter element '" + what + "' needs a file");
        Warnings local;
        p.network = std::make_shared<const TwoPortNetwork>(load_touchstone(p.file, &local));
        for (auto& w : local)
            warn(warnings, what + ": " + w);
    }
    return p;
}

DacParams parse_dac(const YAML::Node& n, Warnings* warnings)
{
    DacParams p;
    Section s(n, "dac", warnings);
    if (auto m = s.get({"model", "mode"}); present(m)) {
        const std::string t = lower(to_string_value(m, "dac.model"));
        if (t == "ideal")
            p.mode = DacMode::Ideal;
        else if (t == "quantizer" || t == "uniform" || t == "uniform_quantizer")
            p.mode = DacMode::Quantizer;
        else
            throw UnsupportedModel("unknown DAC model '" + m.Scalar() + "'");
    }
    if (auto v = s.get({"bits", "resolution"}); present(v)) {
        const auto b = to_count(v, "dac.bits");
        if (b < 1 || b > 24)
            throw SchemaError("dac.bits must lie in 1..24");
        p.bits = static_cast<unsigned>(b);
    }
    if (auto v = s.get({"clip_amplitude", "clip", "clip_level"}); present(v))
        p.clip_amplitude = positive(v, "dac.clip_amplitude");
    if (auto v = s.get({"clip_db_above_rms"}); present(v))
        p.clip_db_above_rms = to_double(v, "dac.clip_db_above_rms");
    return p;
}

OscillatorParams parse_oscillator(const YAML::Node& n, Warnings* warnings)
{
    OscillatorParams p;
    Section s(n, "oscillator", warnings);
    if (auto m = s.get({"model", "mode"}); present(m)) {
        const std::string t = lower(to_string_value(m, "oscillator.model"));
        if (t == "ideal")
            p.mode = OscillatorMode::Ideal;
        else if (t == "cfo")
            p.mode = OscillatorMode::Cfo;
        else if (t == "wiener" || t == "wiener_phase_noise")
            p.mode = OscillatorMode::Wiener;
        else if (t == "ar1" || t == "ar(1)")
            p.mode = OscillatorMode::Ar1;
        else
            throw UnsupportedModel("unknown oscillator model '" + m.Scalar() + "'");
    }
    if (auto v = s.get({"cfo_hz", "cfo"}); present(v))
        p.cfo_hz = to_double(v, "oscillator.cfo_hz");
    if (auto v = s.get({"ar_rho", "rho"}); present(v)) {
        p.ar_rho = to_double(v, "oscillator.ar_rho");
        if (std::abs(p.ar_rho) > 1.0)
            throw SchemaError("oscillator.ar_rho must lie in [-1, 1]");
    }
    if (auto v = s.get({"innovation_std", "sigma", "phase_noise_std"}); present(v)) {
        p.innovation_std = to_double(v, "oscillator.innovation_std");
        if (p.innovation_std < 0.0)
            throw SchemaError("oscillator.innovation_std must be non-negative");
    }
    if (auto v = s.get({"initial_phase", "initial_phase_rad"}); present(v))
        p.initial_phase = to_double(v, "oscillator.initial_phase");
    return p;
}

IqParams parse_iq(const YAML::Node& n, Warnings* warnings)
{
    IqParams p;
    Section s(n, "iq_modem", warnings);
    if (auto v = s.get({"gain_mismatch", "g"}); present(v))
        p.gain_mismatch = positive(v, "iq_modem.gain_mismatch");
    if (auto v = s.get({"phase_mismatch_rad"}); present(v))
        p.phase_mismatch = to_double(v, "iq_modem.phase_mismatch_rad");
    else if (auto d = s.get({"phase_mismatch_deg", "phase_mismatch"}); present(d))
        p.phase_mismatch = to_double(d, "iq_modem.phase_mismatch_deg") * kPi / 180.0;
    if (auto v = s.get({"dc_offset"}); present(v))
        p.dc_offset = to_complex(v, "iq_modem.dc_offset");
    return p;
}

CalibrationParams parse_calibration(const YAML::Node& n, Warnings* warnings)
{
    CalibrationParams p;
    Section s(n, "calibration", warnings);
    p.enabled = true;
    if (auto v = s.get({"enabled"}); present(v))
        p.enabled = to_bool(v, "calibration.enabled");
    if (auto v = s.get({"target_power", "target_power_dbm"}); present(v))
        p.target_power_dbm = to_double(v, "calibration.target_power");
    if (auto v = s.get({"max_gain", "max_gain_db"}); present(v))
        p.max_gain_db = to_double(v, "calibration.max_gain");
    return p;
}

ReceiverParams parse_receiver(const YAML::Node& n, Warnings* warnings)
{
    ReceiverParams p;
    Section s(n, "receiver", warnings);
    p.thermal = true;
    if (auto m = s.get({"model", "mode"}); present(m)) {
        const std::string t = lower(to_string_value(m, "receiver.model"));
        if (t == "ideal" || t == "none")
            p.thermal = false;
        else if (t == "thermal" || t == "awgn")
            p.thermal = true;
        else
            throw UnsupportedModel("unknown receiver model '" + m.Scalar() + "'");
    }
    if (auto v = s.get({"nf_db", "noise_figure"}); present(v))
        p.nf_db = to_double(v, "receiver.nf_db");
    if (auto v = s.get({"temperature"}); present(v))
        p.temperature = positive(v, "receiver.temperature");
    return p;
}

ComponentBank parse_components_node(const YAML::Node& root, const std::filesystem::path& base_dir, Warnings* warnings)
{
    ComponentBank bank;
    Section s(root, "", warnings);
    if (auto n = s.get({"boost_amplifier", "booster_amplifier", "booster"}); present(n))
        bank.boost_amplifier = parse_amplifier(n, "boost_amplifier", warnings);
    if (auto n = s.get({"antenna_amplifier"}); present(n))
        bank.antenna_amplifier = parse_amplifier(n, "antenna_amplifier", warnings);
    if (auto n = s.get({"cu_amplifier", "pa"}); present(n))
        bank.cu_amplifier = parse_amplifier(n, "cu_amplifier", warnings);
    if (auto n = s.get({"fiber", "pmf"}); present(n))
        bank.fiber = parse_linear(n, "fiber", base_dir, warnings);
    if (auto n = s.get({"coupler"}); present(n))
        bank.coupler = parse_linear(n, "coupler", base_dir, warnings);
    if (auto n = s.get({"dac"}); present(n))
        bank.dac = parse_dac(n, warnings);
    if (auto n = s.get({"oscillator", "lo"}); present(n))
        bank.oscillator = parse_oscillator(n, warnings);
    if (auto n = s.get({"iq_modem", "iq"}); present(n))
        bank.iq_modem = parse_iq(n, warnings);
    if (auto n = s.get({"calibration"}); present(n))
        bank.calibration = parse_calibration(n, warnings);
    if (auto n = s.get({"receiver"}); present(n))
        bank.receiver = parse_receiver(n, warnings);
    return bank;
}

// ----- Emission -----------------------------------------------------------------

YAML::Emitter& emit_vec3(YAML::Emitter& e, const Vec3& v)
{
    e << YAML::Flow << YAML::BeginSeq << v.x << v.y << v.z << YAML::EndSeq;
    return e;
}

void emit_complex(YAML::Emitter& e, cd v)
{
    e << YAML::Flow << YAML::BeginSeq << v.real() << v.imag() << YAML::EndSeq;
}

void emit_amplifier(YAML::Emitter& e, const char* key, const AmplifierParams& p)
{
    e << YAML::Key << key << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << amp_mode_tag(p.mode);
    e << YAML::Key << "gain_db" << YAML::Value << p.gain_db;
    e << YAML::Key << "sat_amplitude" << YAML::Value << p.sat_amplitude;
    if (!p.poly_coeffs.empty()) {
        e << YAML::Key << "coeffs" << YAML::Value << YAML::BeginSeq;
        for (auto c : p.poly_coeffs)
            emit_complex(e, c);
        e << YAML::EndSeq;
    }
    e << YAML::Key << "nf_db" << YAML::Value << p.nf_db;
    if (p.bandwidth)
        e << YAML::Key << "bandwidth" << YAML::Value << *p.bandwidth;
    e << YAML::Key << "temperature" << YAML::Value << p.temperature;
    e << YAML::EndMap;
}

void emit_linear(YAML::Emitter& e, const char* key, const LinearElementParams& p)
{
    e << YAML::Key << key << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << linear_model_tag(p.model);
    e << YAML::Key << "loss_db" << YAML::Value << p.loss_db;
    e << YAML::Key << "loss_db_per_m" << YAML::Value << p.loss_db_per_m;
    e << YAML::Key << "domain" << YAML::Value << (p.domain == ApplyDomain::Time ? "time" : "frequency");
    e << YAML::Key << "length" << YAML::Value << p.length_m;
    e << YAML::Key << "group_velocity" << YAML::Value << p.group_velocity;
    e << YAML::Key << "taps" << YAML::Value << p.taps;
    if (!p.file.empty())
        e << YAML::Key << "file" << YAML::Value << p.file;
    e << YAML::EndMap;
}

std::string osc_mode_tag(OscillatorMode m)
{
    switch (m) {
    case OscillatorMode::Ideal: return "ideal";
    case OscillatorMode::Cfo: return "cfo";
    case OscillatorMode::Wiener: return "wiener";
    case OscillatorMode::Ar1: return "ar1";
    }
    return "ideal";
}

void begin_document(YAML::Emitter& e)
{
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
}

} // namespace

// ----- Public API -----------------------------------------------------------------

Vec3 EnvironmentConfig::stripe_axis() const
{
    const std::string& tag = stripe_config.orientation;
    if (tag == "x" || tag == "y" || tag == "z")
        return axis_for(tag);
    if (stripe_config.start_position && stripe_config.end_position) {
        const Vec3 d = *stripe_config.end_position - *stripe_config.start_position;
        if (d.norm() > 0.0)
            return d.normalized();
    }
    if (!radio_stripes.empty() && radio_stripes.front().size() >= 2) {
        const Vec3 d = radio_stripes.front()[1].position - radio_stripes.front()[0].position;
        if (d.norm() > 0.0)
            return d.normalized();
    }
    return {1.0, 0.0, 0.0};
}

bool operator==(const AmplifierParams& a, const AmplifierParams& b)
{
    return a.mode == b.mode && a.gain_db == b.gain_db && a.sat_amplitude == b.sat_amplitude &&
           a.poly_coeffs == b.poly_coeffs && a.nf_db == b.nf_db && a.bandwidth == b.bandwidth &&
           a.temperature == b.temperature;
}

bool operator==(const LinearElementParams& a, const LinearElementParams& b)
{
    const bool same_network = (!a.network && !b.network) || (a.network && b.network && *a.network == *b.network);
    return a.model == b.model && a.loss_db == b.loss_db && a.loss_db_per_m == b.loss_db_per_m &&
           a.domain == b.domain && a.length_m == b.length_m && a.group_velocity == b.group_velocity &&
           a.taps == b.taps && a.file == b.file && same_network;
}

bool operator==(const DacParams& a, const DacParams& b)
{
    return a.mode == b.mode && a.bits == b.bits && a.clip_amplitude == b.clip_amplitude &&
           a.clip_db_above_rms == b.clip_db_above_rms;
}

bool operator==(const OscillatorParams& a, const OscillatorParams& b)
{
    return a.mode == b.mode && a.cfo_hz == b.cfo_hz && a.ar_rho == b.ar_rho && a.innovation_std == b.innovation_std &&
           a.initial_phase == b.initial_phase;
}

bool operator==(const IqParams& a, const IqParams& b)
{
    return a.gain_mismatch == b.gain_mismatch && a.phase_mismatch == b.phase_mismatch && a.dc_offset == b.dc_offset;
}

bool operator==(const ComponentBank& a, const ComponentBank& b)
{
    return a.boost_amplifier == b.boost_amplifier && a.antenna_amplifier == b.antenna_amplifier &&
           a.cu_amplifier == b.cu_amplifier && a.fiber == b.fiber && a.coupler == b.coupler && a.dac == b.dac &&
           a.oscillator == b.oscillator && a.iq_modem == b.iq_modem && a.calibration == b.calibration &&
           a.receiver == b.receiver;
}

bool operator==(const WaveformConfig& a, const WaveformConfig& b)
{
    return a.waveform_type == b.waveform_type && a.n_ofdm_symbols == b.n_ofdm_symbols && a.qam_order == b.qam_order &&
           a.oversampling_factor == b.oversampling_factor && a.cp_length == b.cp_length &&
           a.pilot_spacing == b.pilot_spacing && a.pilot_mode == b.pilot_mode && a.tx_power_dbm == b.tx_power_dbm &&
           a.tx_power_w == b.tx_power_w && a.average_pilots == b.average_pilots &&
           a.num_subcarriers == b.num_subcarriers;
}

EnvironmentConfig parse_environment(std::string_view yaml, Warnings* warnings)
{
    return guarded([&] { return parse_environment_node(parse_document(yaml), warnings); });
}

EnvironmentConfig load_environment(const std::filesystem::path& path, Warnings* warnings)
{
    return parse_environment(read_file(path), warnings);
}

WaveformConfig parse_waveform(std::string_view yaml, std::optional<std::size_t> num_subcarriers, Warnings* warnings)
{
    return guarded([&] { return parse_waveform_node(parse_document(yaml), num_subcarriers, warnings); });
}

WaveformConfig load_waveform(const std::filesystem::path& path, std::optional<std::size_t> num_subcarriers,
                             Warnings* warnings)
{
    return parse_waveform(read_file(path), num_subcarriers, warnings);
}

ComponentBank parse_components(std::string_view yaml, const std::filesystem::path& base_dir, Warnings* warnings)
{
    return guarded([&] { return parse_components_node(parse_document(yaml), base_dir, warnings); });
}

ComponentBank load_components(const std::filesystem::path& path, Warnings* warnings)
{
    return parse_components(read_file(path), path.parent_path(), warnings);
}

std::string to_yaml(const EnvironmentConfig& env)
{
    YAML::Emitter e;
    begin_document(e);
    e << YAML::Key << "room" << YAML::Value;
    emit_vec3(e, env.room);

    const auto& l = env.stripe_config;
    e << YAML::Key << "stripe_config" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_stripes" << YAML::Value << l.n_stripes;
    e << YAML::Key << "n_rus" << YAML::Value << l.n_rus;
    e << YAML::Key << "inter_ru_spacing" << YAML::Value << l.inter_ru_spacing;
    e << YAML::Key << "inter_stripe_spacing" << YAML::Value << l.inter_stripe_spacing;
    if (l.start_position) {
        e << YAML::Key << "start_position" << YAML::Value;
        emit_vec3(e, *l.start_position);
    }
    if (l.end_position) {
        e << YAML::Key << "end_position" << YAML::Value;
        emit_vec3(e, *l.end_position);
    }
    e << YAML::Key << "orientation" << YAML::Value << l.orientation;
    e << YAML::EndMap;

    e << YAML::Key << "radio_stripes" << YAML::Value << YAML::BeginSeq;
    for (const auto& stripe : env.radio_stripes) {
        e << YAML::BeginSeq;
        for (const auto& node : stripe) {
            e << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "kind" << YAML::Value
              << (node.kind == NodeKind::CentralUnit ? "central_unit" : "radio_unit");
            e << YAML::Key << "position" << YAML::Value;
            emit_vec3(e, node.position);
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "ue_positions" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : env.ue_positions)
        emit_vec3(e, p);
    e << YAML::EndSeq;

    if (env.sub_thz) {
        e << YAML::Key << "sub_thz" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "fc" << YAML::Value << env.sub_thz->fc;
        e << YAML::Key << "bw" << YAML::Value << env.sub_thz->bw;
        e << YAML::Key << "num_subcarriers" << YAML::Value << env.sub_thz->num_subcarriers;
        e << YAML::EndMap;
    }

    const auto& a = env.antenna;
    e << YAML::Key << "antenna" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_antennas" << YAML::Value << a.n_antennas;
    e << YAML::Key << "ue_antennas" << YAML::Value << a.ue_antennas;
    e << YAML::Key << "polarization" << YAML::Value << a.polarization;
    e << YAML::Key << "pattern" << YAML::Value << (a.pattern == PatternKind::Tr38901 ? "tr38901" : "isotropic");
    e << YAML::Key << "ru_boresight" << YAML::Value;
    emit_vec3(e, a.ru_boresight);
    e << YAML::Key << "ue_boresight" << YAML::Value;
    emit_vec3(e, a.ue_boresight);
    e << YAML::EndMap;

    e << YAML::Key << "central_unit_fiber_length" << YAML::Value << env.central_unit_fiber_length;
    if (!env.sub10ghz_yaml.empty())
        e << YAML::Key << "sub10ghz" << YAML::Value << YAML::Load(env.sub10ghz_yaml);
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::string to_yaml(const WaveformConfig& wf)
{
    YAML::Emitter e;
    begin_document(e);
    e << YAML::Key << "waveform_type" << YAML::Value << wf.waveform_type;
    e << YAML::Key << "n_ofdm_symbols" << YAML::Value << wf.n_ofdm_symbols;
    e << YAML::Key << "qam_order" << YAML::Value << wf.qam_order;
    e << YAML::Key << "oversampling_factor" << YAML::Value << wf.oversampling_factor;
    e << YAML::Key << "cp_length" << YAML::Value << wf.cp_length;
    e << YAML::Key << "pilot_spacing" << YAML::Value << wf.pilot_spacing;
    e << YAML::Key << "pilot_mode" << YAML::Value << (wf.pilot_mode == PilotMode::Block ? "block" : "scattered");
    e << YAML::Key << "tx_power" << YAML::Value << wf.tx_power_dbm;
    e << YAML::Key << "average_pilots" << YAML::Value << wf.average_pilots;
    if (wf.num_subcarriers)
        e << YAML::Key << "num_subcarriers" << YAML::Value << *wf.num_subcarriers;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::string to_yaml(const ComponentBank& bank)
{
    YAML::Emitter e;
    begin_document(e);
    emit_amplifier(e, "boost_amplifier", bank.boost_amplifier);
    emit_amplifier(e, "antenna_amplifier", bank.antenna_amplifier);
    emit_amplifier(e, "cu_amplifier", bank.cu_amplifier);
    emit_linear(e, "fiber", bank.fiber);
    emit_linear(e, "coupler", bank.coupler);

    e << YAML::Key << "dac" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << (bank.dac.mode == DacMode::Quantizer ? "quantizer" : "ideal");
    e << YAML::Key << "bits" << YAML::Value << bank.dac.bits;
    e << YAML::Key << "clip_amplitude" << YAML::Value << bank.dac.clip_amplitude;
    if (bank.dac.clip_db_above_rms)
        e << YAML::Key << "clip_db_above_rms" << YAML::Value << *bank.dac.clip_db_above_rms;
    e << YAML::EndMap;

    const auto& o = bank.oscillator;
    e << YAML::Key << "oscillator" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << osc_mode_tag(o.mode);
    e << YAML::Key << "cfo_hz" << YAML::Value << o.cfo_hz;
    e << YAML::Key << "ar_rho" << YAML::Value << o.ar_rho;
    e << YAML::Key << "innovation_std" << YAML::Value << o.innovation_std;
    e << YAML::Key << "initial_phase" << YAML::Value << o.initial_phase;
    e << YAML::EndMap;

    e << YAML::Key << "iq_modem" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "gain_mismatch" << YAML::Value << bank.iq_modem.gain_mismatch;
    e << YAML::Key << "phase_mismatch_rad" << YAML::Value << bank.iq_modem.phase_mismatch;
    e << YAML::Key << "dc_offset" << YAML::Value;
    emit_complex(e, bank.iq_modem.dc_offset);
    e << YAML::EndMap;

    e << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "enabled" << YAML::Value << bank.calibration.enabled;
    e << YAML::Key << "target_power" << YAML::Value << bank.calibration.target_power_dbm;
    e << YAML::Key << "max_gain" << YAML::Value << bank.calibration.max_gain_db;
    e << YAML::EndMap;

    e << YAML::Key << "receiver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << (bank.receiver.thermal ? "thermal" : "ideal");
    e << YAML::Key << "nf_db" << YAML::Value << bank.receiver.nf_db;
    e << YAML::Key << "temperature" << YAML::Value << bank.receiver.temperature;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

bool ValidationReport::has_error(std::string_view code) const
{
    return std::any_of(errors.begin(), errors.end(), [&](const auto& i) { return i.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const
{
    return std::any_of(warnings.begin(), warnings.end(), [&](const auto& i) { return i.code == code; });
}

SubcarrierGrid resolve_grid(const EnvironmentConfig& env, const WaveformConfig& wf,
                            const std::optional<DatasetShape>& dataset)
{
    if (env.sub_thz)
        return SubcarrierGrid(env.sub_thz->fc, env.sub_thz->bw, env.sub_thz->num_subcarriers, wf.oversampling_factor);
    if (dataset)
        return SubcarrierGrid(dataset->fc, dataset->bw, dataset->q, wf.oversampling_factor);
    throw SchemaError("no subcarrier grid: environment has no sub_thz block and no dataset is attached");
}

ValidationReport validate_cross(const EnvironmentConfig& env, const WaveformConfig& wf, const ComponentBank& comp,
                                const std::optional<DatasetShape>& dataset)
{
    ValidationReport report;
    auto error = [&](std::string code, std::string msg) { report.errors.push_back({std::move(code), std::move(msg)}); };
    auto warning = [&](std::string code, std::string msg) {
        report.warnings.push_back({std::move(code), std::move(msg)});
    };

    if (!env.sub_thz && !dataset) {
        error("MissingGrid", "sub_thz grid parameters are required when no dataset is attached");
        return report;
    }
    if (env.sub_thz && dataset) {
        const auto& b = *env.sub_thz;
        if (b.num_subcarriers != dataset->q || b.fc != dataset->fc || b.bw != dataset->bw)
            error("GridMismatch", "environment grid (Q=" + std::to_string(b.num_subcarriers) +
                                      ") does not match the dataset grid (Q=" + std::to_string(dataset->q) + ")");
    }
    if (dataset) {
        if (dataset->n_stripes < env.n_stripes())
            error("DatasetShape", "dataset covers " + std::to_string(dataset->n_stripes) + " stripes, environment has " +
                                      std::to_string(env.n_stripes()));
        for (std::size_t s = 0; s < env.n_stripes(); ++s)
            if (dataset->n_rus < env.n_rus(s)) {
                error("DatasetShape", "dataset covers " + std::to_string(dataset->n_rus) + " RUs, stripe " +
                                          std::to_string(s) + " has " + std::to_string(env.n_rus(s)));
                break;
            }
        if (dataset->n_tx != env.antenna.n_antennas)
            error("AntennaMismatch", "dataset has " + std::to_string(dataset->n_tx) + " RU antennas, environment has " +
                                         std::to_string(env.antenna.n_antennas));
        if (dataset->n_rx != env.antenna.ue_antennas)
            error("AntennaMismatch", "dataset has " + std::to_string(dataset->n_rx) + " UE antennas, environment has " +
                                         std::to_string(env.antenna.ue_antennas));
    }

    const SubcarrierGrid grid = resolve_grid(env, wf, dataset);
    try {
        wf.validate_against(grid.q());
    } catch (const SchemaError& e) {
        error("WaveformGrid", e.what());
        return report;
    }
    if (data_capacity(wf, grid.q()) == 0)
        error("NoDataSymbols", "the pilot layout leaves no data resource elements");

    const std::size_t cp_span = wf.cp_length * wf.oversampling_factor;
    auto check_isi = [&](const LinearElementParams& p, const char* name, double length) {
        if (p.model != LinearModel::S2pFilter)
            return;
        std::size_t span = 1;
        try {
            const LinearElement element(p, grid, length);
            span = effective_length(element.wide_response());
            if (p.domain == ApplyDomain::Time)
                span = std::min(span, element.impulse().h.size());
        } catch (const Error& e) {
            error("ComponentResponse", std::string(name) + ": " + e.what());
            return;
        }
        if (cp_span < span)
            warning("InterSymbolInterferenceRisk", std::string(name) + " impulse response spans " +
                                                       std::to_string(span) + " samples, cyclic prefix covers " +
                                                       std::to_string(cp_span));
    };
    check_isi(comp.fiber, "fiber", env.central_unit_fiber_length);
    check_isi(comp.coupler, "coupler", comp.coupler.length_m);

    if (env.ue_positions.empty())
        warning("NoUsers", "environment lists no UE positions");
    return report;
}

} // namespace stripesim
