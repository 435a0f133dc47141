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

#include "stripesim/cli.hpp"

#include "stripesim/config.hpp"
#include "stripesim/dataset.hpp"
#include "stripesim/errors.hpp"
#include "stripesim/io.hpp"
#include "stripesim/log.hpp"
#include "stripesim/metrics.hpp"
#include "stripesim/stripe.hpp"
#include "stripesim/touchstone.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace stripesim {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct LinkArgs {
    std::string env_path;
    std::string waveform_path;
    std::string components_path;
    std::string channel = "los";
    std::size_t tdl_taps = 8;
    double tdl_beta = 0.5;
    double tolerance = 1e-3;
    std::size_t ue = 0;
    std::size_t stripe = 0;
    std::size_t ru = 0;
    std::string direction = "dl";
    std::uint64_t seed = 0;
    std::optional<double> snr_db;
    bool taps = false;
    std::size_t tap_decimation = 1;
    bool dump_channel = false;
    bool error_spectrum = false;
    std::string metric = "nmse_cu";
    std::size_t jobs = 1;
    std::string out = ".";
};

Json options_json(const LinkArgs& a)
{
    Json j;
    j["channel"] = a.channel;
    j["tdl_taps"] = a.tdl_taps;
    j["tdl_beta"] = a.tdl_beta;
    j["tolerance"] = a.tolerance;
    j["ue"] = a.ue;
    j["stripe"] = a.stripe;
    j["ru"] = a.ru;
    j["direction"] = a.direction;
    j["seed"] = a.seed;
    j["snr_db"] = a.snr_db ? Json(*a.snr_db) : Json(nullptr);
    j["taps"] = a.taps;
    j["tap_decimation"] = a.tap_decimation;
    j["dump_channel"] = a.dump_channel;
    j["error_spectrum"] = a.error_spectrum;
    j["metric"] = a.metric;
    j["jobs"] = a.jobs;
    return j;
}

LinkArgs options_from_json(const Json& j)
{
    LinkArgs a;
    a.channel = j.at("channel").get<std::string>();
    a.tdl_taps = j.at("tdl_taps").get<std::size_t>();
    a.tdl_beta = j.at("tdl_beta").get<double>();
    a.tolerance = j.at("tolerance").get<double>();
    a.ue = j.at("ue").get<std::size_t>();
    a.stripe = j.at("stripe").get<std::size_t>();
    a.ru = j.at("ru").get<std::size_t>();
    a.direction = j.at("direction").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("snr_db").is_null())
        a.snr_db = j.at("snr_db").get<double>();
    a.taps = j.at("taps").get<bool>();
    a.tap_decimation = j.at("tap_decimation").get<std::size_t>();
    a.dump_channel = j.at("dump_channel").get<bool>();
    a.error_spectrum = j.at("error_spectrum").get<bool>();
    a.metric = j.at("metric").get<std::string>();
    a.jobs = j.at("jobs").get<std::size_t>();
    return a;
}

struct Inputs {
    EnvironmentConfig env;
    WaveformConfig wf;
    ComponentBank comp;
    std::shared_ptr<CfrDataset> dataset;
    ChannelSource source;
};

void report_warnings(const Warnings& w)
{
    for (const auto& msg : w)
        log().warn("{}", msg);
}

std::optional<std::size_t> env_subcarriers(const EnvironmentConfig& env)
{
    if (env.sub_thz)
        return env.sub_thz->num_subcarriers;
    return std::nullopt;
}

ChannelSource parse_channel(const LinkArgs& a, std::shared_ptr<CfrDataset>& dataset)
{
    ChannelSource src;
    src.tdl = TdlParams{a.tdl_taps, a.tdl_beta};
    src.tolerance = a.tolerance;
    const std::string& tag = a.channel;
    if (tag == "identity")
        src.model = ChannelModel::Identity;
    else if (tag == "los")
        src.model = ChannelModel::Los;
    else if (tag == "rayleigh")
        src.model = ChannelModel::Rayleigh;
    else if (tag == "tdl")
        src.model = ChannelModel::Tdl;
    else if (tag.rfind("dataset:", 0) == 0) {
        const fs::path dir = tag.substr(8);
        if (!fs::is_directory(dir))
            throw ConfigError("dataset directory " + dir.string() + " does not exist");
        dataset = std::make_shared<CfrDataset>(read_dataset(dir));
        src.model = ChannelModel::Dataset;
        src.dataset = dataset.get();
    } else {
        throw UnsupportedModel("channel must be identity, los, rayleigh, tdl or dataset:PATH, got '" + tag + "'");
    }
    return src;
}

void finish_inputs(Inputs& in, const LinkArgs& a)
{
    in.source = parse_channel(a, in.dataset);
    std::optional<DatasetShape> shape;
    if (in.dataset)
        shape = in.dataset->header().shape();
    const auto report = validate_cross(in.env, in.wf, in.comp, shape);
    for (const auto& w : report.warnings)
        log().warn("{}: {}", w.code, w.message);
    if (!report.ok()) {
        std::string msg = "configuration rejected:";
        for (const auto& e : report.errors)
            msg += "\n  " + e.code + ": " + e.message;
        throw ConfigError(msg);
    }
}

Inputs load_inputs(const LinkArgs& a, bool need_channel = true)
{
    Inputs in;
    Warnings w;
    in.env = load_environment(a.env_path, &w);
    in.wf = a.waveform_path.empty() ? WaveformConfig{} : load_waveform(a.waveform_path, env_subcarriers(in.env), &w);
    in.comp = a.components_path.empty() ? ComponentBank{} : load_components(a.components_path, &w);
    report_warnings(w);
    if (need_channel)
        finish_inputs(in, a);
    return in;
}

Inputs inputs_from_manifest(const Json& m, const LinkArgs& a)
{
    const Json& c = m.at("configs");
    Inputs in;
    in.env = parse_environment(c.at("environment").get<std::string>());
    in.wf = parse_waveform(c.at("waveform").get<std::string>(), env_subcarriers(in.env));
    in.comp = parse_components(c.at("components").get<std::string>(), fs::current_path());
    finish_inputs(in, a);
    return in;
}

// ----- Output bookkeeping --------------------------------------------------------

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& text)
    {
        write_text_atomic(dir_ / name, text);
        const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
        files_.push_back(Json{{"name", name}, {"crc32", crc}, {"bytes", text.size()}});
    }

    const fs::path& path() const { return dir_; }
    Json files() const { return files_; }

private:
    fs::path dir_;
    Json files_ = Json::array();
};

Json config_snapshot(const Inputs& in)
{
    return Json{{"environment", to_yaml(in.env)}, {"waveform", to_yaml(in.wf)}, {"components", to_yaml(in.comp)}};
}

void write_manifest(OutputDir& out, const std::string& command, const Inputs& in, const LinkArgs& a,
                    std::chrono::steady_clock::time_point start, Json extra = Json::object())
{
    Json m;
    m["tool"] = "stripesim";
    m["version"] = STRIPESIM_VERSION;
    m["command"] = command;
    m["seed"] = a.seed;
    m["options"] = options_json(a);
    m["configs"] = config_snapshot(in);
    for (auto& [k, v] : extra.items())
        m[k] = v;
    m["outputs"] = out.files();
    m["duration_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_atomic(out.path() / "manifest.json", m.dump(2) + "\n");
}

std::string gains_csv(const std::vector<std::pair<std::size_t, CalibrationResult>>& results)
{
    CsvTable t({"stripe_id", "ru_id", "gain_db", "clipped"});
    for (const auto& [stripe, r] : results)
        for (std::size_t i = 0; i < r.gains_db.size(); ++i)
            t.add_row({std::to_string(stripe), std::to_string(i), format_double(r.gains_db[i]),
                       r.clipped[i] ? "true" : "false"});
    return t.str();
}

std::string channel_csv(const ChannelRealization& ch)
{
    CsvTable t({"q", "frequency_hz", "rx", "tx", "re", "im"});
    for (std::size_t q = 0; q < ch.q(); ++q)
        for (std::size_t k = 0; k < ch.n_rx; ++k)
            for (std::size_t m = 0; m < ch.n_tx; ++m) {
                const cd h = ch.at(q, k, m);
                t.add_row({std::to_string(q), format_double(ch.grid.frequency(q)), std::to_string(k),
                           std::to_string(m), format_double(h.real()), format_double(h.imag())});
            }
    return t.str();
}

LinkOptions link_options(const LinkArgs& a)
{
    LinkOptions o;
    o.ue_index = a.ue;
    o.stripe_id = a.stripe;
    o.active_ru = a.ru;
    o.direction = parse_direction(a.direction);
    o.seed = a.seed;
    o.record_taps = a.taps;
    o.snr_db = a.snr_db;
    o.error_spectrum = a.error_spectrum;
    return o;
}

// ----- Commands -------------------------------------------------------------------

int cmd_run(const Inputs& in, const LinkArgs& a)
{
    const auto start = std::chrono::steady_clock::now();
    const LinkOptions o = link_options(a);
    const LinkResult r = run_link(in.env, in.wf, in.comp, in.source, o);

    OutputDir out(a.out);
    const RunIds ids{a.stripe, a.ru, a.ue, a.seed, to_string(o.direction)};
    out.write("metrics.csv", metrics_csv(r.metrics, ids));
    if (a.taps) {
        CsvTable stages({"stage", "label"});
        for (std::size_t i = 0; i < r.stage_taps.size(); ++i)
            stages.add_row({std::to_string(i), r.stage_taps[i].label});
        out.write("stages.csv", stages.str());
        const auto am = am_am_extract(r.stage_taps, a.tap_decimation);
        out.write("am_am.csv", am_curves_csv(am));
        const auto pm = am_pm_extract(r.stage_taps, a.tap_decimation);
        out.write("am_pm.csv", am_curves_csv(pm));
    }
    if (a.dump_channel)
        out.write("channel.csv", channel_csv(r.channel));
    if (r.metrics.error_spectrum_db) {
        CsvTable t({"q", "error_db"});
        for (std::size_t q = 0; q < r.metrics.error_spectrum_db->size(); ++q)
            t.add_row({std::to_string(q), format_double((*r.metrics.error_spectrum_db)[q])});
        out.write("error_spectrum.csv", t.str());
    }
    if (r.calibration)
        out.write("gains.csv", gains_csv({{a.stripe, *r.calibration}}));
    write_manifest(out, "run", in, a, start);

    std::cout << "nmse_db=" << format_double(r.metrics.nmse_db) << " ber=" << format_double(r.metrics.ber) << "\n";
    return kExitOk;
}

struct SweepCell {
    std::size_t stripe_id = 0;
    std::size_t ru_id = 0;
    MetricReport metrics;
};

double metric_score(const MetricReport& r, const std::string& metric)
{
    if (metric == "sndr_cu")
        return -r.sndr_db;
    if (metric == "ber")
        return r.ber;
    return r.nmse_db;
}

int cmd_sweep_ru(const Inputs& in, const LinkArgs& a)
{
    const auto start = std::chrono::steady_clock::now();
    std::vector<SweepCell> cells;
    for (std::size_t s = 0; s < in.env.n_stripes(); ++s)
        for (std::size_t r = 0; r < in.env.n_rus(s); ++r)
            cells.push_back({s, r, {}});

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                LinkArgs cell = a;
                cell.stripe = cells[i].stripe_id;
                cell.ru = cells[i].ru_id;
                cell.taps = false;
                cell.error_spectrum = false;
                LinkOptions o = link_options(cell);
                o.seed = derive_seed(a.seed, {cell.stripe, cell.ru}, "sweep_cell");
                cells[i].metrics = run_link(in.env, in.wf, in.comp, in.source, o).metrics;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = cells.size();
            }
        }
    };
    std::size_t jobs = a.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.jobs;
    jobs = std::min(jobs, std::max<std::size_t>(cells.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    std::sort(cells.begin(), cells.end(), [](const SweepCell& x, const SweepCell& y) {
        return std::pair(x.stripe_id, x.ru_id) < std::pair(y.stripe_id, y.ru_id);
    });
    CsvTable t({"ru_id", "stripe_id", "nmse_cu", "sndr_cu", "ber"});
    for (const auto& c : cells)
        t.add_row({std::to_string(c.ru_id), std::to_string(c.stripe_id), format_double(c.metrics.nmse_db),
                   format_double(c.metrics.sndr_db), format_double(c.metrics.ber)});

    const auto best = std::min_element(cells.begin(), cells.end(), [&](const SweepCell& x, const SweepCell& y) {
        return metric_score(x.metrics, a.metric) < metric_score(y.metrics, a.metric);
    });

    OutputDir out(a.out);
    out.write("heatmap.csv", t.str());
    Json extra;
    if (best != cells.end()) {
        extra["best"] = Json{{"metric", a.metric}, {"stripe_id", best->stripe_id}, {"ru_id", best->ru_id}};
        std::cout << "best " << a.metric << ": stripe_id=" << best->stripe_id << " ru_id=" << best->ru_id << "\n";
    }
    write_manifest(out, "sweep-ru", in, a, start, extra);
    return kExitOk;
}

struct CalibrateArgs {
    std::optional<double> target_dbm;
    std::optional<double> max_gain_db;
};

int cmd_calibrate(const Inputs& in, const LinkArgs& a, const CalibrateArgs& c)
{
    const auto start = std::chrono::steady_clock::now();
    const SubcarrierGrid grid = resolve_grid(in.env, in.wf);
    const double target = c.target_dbm.value_or(in.comp.calibration.target_power_dbm);
    const double max_gain = c.max_gain_db.value_or(in.comp.calibration.max_gain_db);

    std::vector<std::pair<std::size_t, CalibrationResult>> results;
    for (std::size_t s = 0; s < in.env.n_stripes(); ++s) {
        StripeTopology topo = build_stripe(in.env, in.comp, s, grid, in.wf, a.seed);
        results.emplace_back(s, calibrate_gains(topo, target, max_gain, a.seed));
    }
    OutputDir out(a.out);
    out.write("gains.csv", gains_csv(results));
    Json extra{{"calibration", Json{{"target_power_dbm", target}, {"max_gain_db", max_gain}}}};
    write_manifest(out, "calibrate", in, a, start, extra);
    return kExitOk;
}

struct S2pArgs {
    std::string file;
    std::string magnitude = "voltage";
    std::string param = "s21";
    std::string out;
};

int cmd_inspect_s2p(const S2pArgs& a)
{
    Warnings w;
    const TwoPortNetwork net = load_touchstone(a.file, &w);
    report_warnings(w);
    const CVector& s = a.param == "s11" ? net.s11 : a.param == "s12" ? net.s12 : a.param == "s22" ? net.s22 : net.s21;
    const double scale = a.magnitude == "power" ? 10.0 : 20.0;
    CsvTable t({"frequency_hz", "magnitude_db", "phase_deg"});
    for (std::size_t i = 0; i < net.size(); ++i)
        t.add_row({format_double(net.freqs[i]), format_double(scale * std::log10(std::abs(s[i]))),
                   format_double(std::arg(s[i]) * 180.0 / kPi)});
    if (a.out.empty())
        std::cout << t.str();
    else
        write_text_atomic(a.out, t.str());
    return kExitOk;
}

struct GenArgs {
    std::string env_path;
    std::string waveform_path;
    std::string model = "los";
    double beta = 0.5;
    std::size_t taps = 8;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_channels(const GenArgs& a)
{
    Warnings w;
    const EnvironmentConfig env = load_environment(a.env_path, &w);
    const WaveformConfig wf =
        a.waveform_path.empty() ? WaveformConfig{} : load_waveform(a.waveform_path, env_subcarriers(env), &w);
    report_warnings(w);
    const SubcarrierGrid grid = resolve_grid(env, wf);
    SyntheticSpec spec;
    spec.model = a.model == "tdl" ? SyntheticModel::Tdl : SyntheticModel::Los;
    spec.tdl = TdlParams{a.taps, a.beta};
    const CfrDataset ds = generate_synthetic(env, grid, spec, a.seed);
    const auto manifest = write_dataset(ds, a.out);
    std::cout << "wrote " << manifest.files.size() << " files to " << a.out << "\n";
    return kExitOk;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir)
{
    std::ifstream f(manifest_path);
    if (!f)
        throw ConfigError("cannot open manifest " + manifest_path);
    Json m;
    try {
        m = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest " + manifest_path + ": " + e.what());
    }
    try {
        const std::string command = m.at("command").get<std::string>();
        LinkArgs a = options_from_json(m.at("options"));
        a.out = out_dir;
        if (command == "calibrate") {
            Inputs in = inputs_from_manifest(m, a);
            const Json& cal = m.at("calibration");
            return cmd_calibrate(in, a,
                                 {cal.at("target_power_dbm").get<double>(), cal.at("max_gain_db").get<double>()});
        }
        Inputs in = inputs_from_manifest(m, a);
        if (command == "run")
            return cmd_run(in, a);
        if (command == "sweep-ru")
            return cmd_sweep_ru(in, a);
        throw ConfigError("manifest command '" + command + "' cannot be replayed");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("manifest " + manifest_path + ": " + e.what());
    }
}

void add_link_flags(CLI::App* cmd, LinkArgs& a, bool with_ru)
{
    cmd->add_option("--env", a.env_path, "environment YAML")->required()->check(CLI::ExistingFile);
    cmd->add_option("--waveform", a.waveform_path, "waveform YAML")->check(CLI::ExistingFile);
    cmd->add_option("--components", a.components_path, "component bank YAML")->check(CLI::ExistingFile);
    cmd->add_option("--channel", a.channel, "identity | los | rayleigh | tdl | dataset:PATH")->capture_default_str();
    cmd->add_option("--tdl-taps", a.tdl_taps, "TDL tap count")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--tdl-beta", a.tdl_beta, "TDL power decay per tap")->capture_default_str();
    cmd->add_option("--tolerance", a.tolerance, "dataset UE position tolerance (m)")->capture_default_str();
    cmd->add_option("--ue", a.ue, "UE index")->capture_default_str();
    cmd->add_option("--stripe", a.stripe, "stripe index")->capture_default_str();
    if (with_ru)
        cmd->add_option("--ru", a.ru, "active RU index")->capture_default_str();
    cmd->add_option("--direction", a.direction, "dl | ul")
        ->capture_default_str()
        ->check(CLI::IsMember({"dl", "ul"}));
    cmd->add_option("--seed", a.seed, "master seed")->capture_default_str();
    cmd->add_option("--snr-db", a.snr_db, "white noise on the combined received grid");
    cmd->add_option("--out", a.out, "output directory")->capture_default_str();
}

} // namespace

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"stripesim: waveform-level simulation of sub-THz radio stripes", "stripesim"};
    app.set_version_flag("--version", std::string(STRIPESIM_VERSION));
    app.require_subcommand(1);

    LinkArgs run_args;
    auto* run = app.add_subcommand("run", "simulate one link");
    add_link_flags(run, run_args, true);
    run->add_flag("--taps", run_args.taps, "write per-stage AM/AM and AM/PM tap CSVs");
    run->add_option("--tap-decimation", run_args.tap_decimation, "keep every n-th tap sample")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_flag("--dump-channel", run_args.dump_channel, "write the channel as channel.csv");
    run->add_flag("--error-spectrum", run_args.error_spectrum, "write the per-subcarrier error spectrum");

    LinkArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep-ru", "run every (stripe, RU) activation and write heatmap.csv");
    add_link_flags(sweep, sweep_args, false);
    sweep->add_option("--metric", sweep_args.metric, "metric used to pick the best RU")
        ->capture_default_str()
        ->check(CLI::IsMember({"nmse_cu", "sndr_cu", "ber"}));
    sweep->add_option("--jobs", sweep_args.jobs, "worker threads (0 = all cores)")->capture_default_str();

    LinkArgs cal_args;
    CalibrateArgs cal_extra;
    auto* cal = app.add_subcommand("calibrate", "set booster gains on every stripe and write gains.csv");
    cal->add_option("--env", cal_args.env_path, "environment YAML")->required()->check(CLI::ExistingFile);
    cal->add_option("--components", cal_args.components_path, "component bank YAML")->check(CLI::ExistingFile);
    cal->add_option("--waveform", cal_args.waveform_path, "waveform YAML")->check(CLI::ExistingFile);
    cal->add_option("--target-dbm", cal_extra.target_dbm, "booster output target (dBm)");
    cal->add_option("--max-gain-db", cal_extra.max_gain_db, "booster gain limit (dB)");
    cal->add_option("--seed", cal_args.seed, "master seed")->capture_default_str();
    cal->add_option("--out", cal_args.out, "output directory")->capture_default_str();

    S2pArgs s2p_args;
    auto* s2p = app.add_subcommand("inspect-s2p", "tabulate one S-parameter of a Touchstone file");
    s2p->add_option("--file", s2p_args.file, "Touchstone .s2p file")->required();
    s2p->add_option("--magnitude", s2p_args.magnitude, "read |S| as a power or a voltage ratio")
        ->capture_default_str()
        ->check(CLI::IsMember({"power", "voltage"}));
    s2p->add_option("--param", s2p_args.param, "s11 | s21 | s12 | s22")
        ->capture_default_str()
        ->check(CLI::IsMember({"s11", "s21", "s12", "s22"}));
    s2p->add_option("--out", s2p_args.out, "CSV path (stdout when omitted)");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen-channels", "write a synthetic CFR1 channel dataset");
    gen->add_option("--env", gen_args.env_path, "environment YAML")->required()->check(CLI::ExistingFile);
    gen->add_option("--waveform", gen_args.waveform_path, "waveform YAML")->check(CLI::ExistingFile);
    gen->add_option("--model", gen_args.model, "los | tdl")->capture_default_str()->check(CLI::IsMember({"los", "tdl"}));
    gen->add_option("--beta", gen_args.beta, "TDL power decay per tap")->capture_default_str();
    gen->add_option("--taps-L", gen_args.taps, "TDL tap count")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_args.seed, "master seed")->capture_default_str();
    gen->add_option("--out", gen_args.out, "dataset directory")->required();

    std::string replay_manifest, replay_out = ".";
    auto* replay = app.add_subcommand("replay", "re-execute a run from its manifest.json");
    replay->add_option("--manifest", replay_manifest, "manifest.json of an earlier run")->required();
    replay->add_option("--out", replay_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (run->parsed())
            return cmd_run(load_inputs(run_args), run_args);
        if (sweep->parsed())
            return cmd_sweep_ru(load_inputs(sweep_args), sweep_args);
        if (cal->parsed())
            return cmd_calibrate(load_inputs(cal_args, false), cal_args, cal_extra);
        if (s2p->parsed())
            return cmd_inspect_s2p(s2p_args);
        if (gen->parsed())
            return cmd_gen_channels(gen_args);
        if (replay->parsed())
            return cmd_replay(replay_manifest, replay_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}

int run_cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    argv.push_back("stripesim");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace stripesim
