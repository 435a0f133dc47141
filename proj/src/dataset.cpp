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

#include "stripesim/dataset.hpp"

#include "stripesim/errors.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

namespace stripesim {
namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'C', 'F', 'R', '1'};
constexpr const char* kMetadataFile = "metadata.json";
constexpr const char* kManifestFile = "manifest.json";

// ----- Little-endian encoding --------------------------------------------------

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    return v;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t done = 0;
    while (done < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1U << 30));
        crc = crc32(crc, bytes.data() + done, chunk);
        done += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

json header_json(const CfrHeader& h)
{
    return {{"n_stripes", h.n_stripes}, {"n_rus", h.n_rus}, {"n_rx", h.n_rx}, {"n_tx", h.n_tx},
            {"q", h.q},                 {"fc", h.fc},       {"bw", h.bw}};
}

CfrHeader header_from_json(const json& j)
{
    CfrHeader h;
    h.n_stripes = j.at("n_stripes").get<std::uint32_t>();
    h.n_rus = j.at("n_rus").get<std::uint32_t>();
    h.n_rx = j.at("n_rx").get<std::uint32_t>();
    h.n_tx = j.at("n_tx").get<std::uint32_t>();
    h.q = j.at("q").get<std::uint32_t>();
    h.fc = j.at("fc").get<double>();
    h.bw = j.at("bw").get<double>();
    return h;
}

std::size_t checked_tensor_size(const CfrHeader& h)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 16;
    std::uint64_t n = 1;
    for (std::uint64_t d : {h.n_stripes, h.n_rus, h.n_rx, h.n_tx, h.q}) {
        if (d != 0 && n > limit / d)
            throw FormatError("CFR1 dimensions overflow");
        n *= d;
    }
    return static_cast<std::size_t>(n);
}

} // namespace

std::size_t CfrHeader::tensor_size() const { return checked_tensor_size(*this); }

std::size_t CfrHeader::index(std::size_t stripe, std::size_t ru, std::size_t k, std::size_t m, std::size_t qi) const
{
    return (((stripe * n_rus + ru) * n_rx + k) * n_tx + m) * q + qi;
}

DatasetShape CfrHeader::shape() const { return {n_stripes, n_rus, n_rx, n_tx, q, fc, bw}; }

CfrDataset::CfrDataset(CfrHeader header, std::vector<UeMetadata> ues, std::vector<CVector> tensors)
    : header_(header), ues_(std::move(ues)), tensors_(std::move(tensors))
{
    if (tensors_.size() != ues_.size())
        throw DimensionError("dataset needs one tensor per UE");
    const std::size_t n = header_.tensor_size();
    for (const auto& t : tensors_)
        if (t.size() != n)
            throw DimensionError("tensor size does not match the dataset header");
    for (std::size_t i = 0; i < ues_.size(); ++i)
        for (std::size_t j = i + 1; j < ues_.size(); ++j)
            if (ues_[i].ue_id == ues_[j].ue_id)
                throw DimensionError("duplicate UE id " + std::to_string(ues_[i].ue_id));
}

std::size_t CfrDataset::position_of(std::uint32_t ue_id) const
{
    for (std::size_t i = 0; i < ues_.size(); ++i)
        if (ues_[i].ue_id == ue_id)
            return i;
    throw IndexError("unknown UE id " + std::to_string(ue_id));
}

CVector CfrDataset::tensor(std::uint32_t ue_id) const
{
    const std::size_t i = position_of(ue_id);
    if (!lazy())
        return tensors_[i];

    const auto path = directory_ / files_[i];
    files_opened_->fetch_add(1);
    const auto bytes = read_file(path);
    CfrHeader file_header;
    CVector t = decode_cfr1(bytes, &file_header);
    if (crc32_of(bytes) != crcs_[i])
        throw ChecksumError("checksum mismatch for " + path.string());
    if (!(file_header == header_))
        throw FormatError("header of " + path.string() + " disagrees with the dataset metadata");
    return t;
}

std::string channel_file_name(std::uint32_t ue_id)
{
    std::string digits = std::to_string(ue_id);
    if (digits.size() < 6)
        digits.insert(0, 6 - digits.size(), '0');
    return "ue_" + digits + ".cfr";
}

std::vector<std::uint8_t> encode_cfr1(const CfrHeader& h, const CVector& tensor)
{
    const std::size_t n = h.tensor_size();
    if (tensor.size() != n)
        throw DimensionError("tensor size does not match the CFR1 header");
    std::vector<std::uint8_t> out;
    out.reserve(kCfrHeaderBytes + 8 * n);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    for (std::uint32_t v : {h.n_stripes, h.n_rus, h.n_rx, h.n_tx, h.q})
        put_u32(out, v);
    put_u64(out, std::bit_cast<std::uint64_t>(h.fc));
    put_u64(out, std::bit_cast<std::uint64_t>(h.bw));
    for (const cd& v : tensor) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
    }
    return out;
}

CVector decode_cfr1(std::span<const std::uint8_t> bytes, CfrHeader* header)
{
    if (bytes.size() < kCfrHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("not a CFR1 file (bad magic)");
    CfrHeader h;
    h.n_stripes = get_u32(bytes, 4);
    h.n_rus = get_u32(bytes, 8);
    h.n_rx = get_u32(bytes, 12);
    h.n_tx = get_u32(bytes, 16);
    h.q = get_u32(bytes, 20);
    h.fc = std::bit_cast<double>(get_u64(bytes, 24));
    h.bw = std::bit_cast<double>(get_u64(bytes, 32));
    const std::size_t n = checked_tensor_size(h);
    if (bytes.size() != kCfrHeaderBytes + 8 * n)
        throw FormatError("CFR1 payload size does not match its header");
    CVector t(n);
    std::size_t at = kCfrHeaderBytes;
    for (auto& v : t) {
        const float re = std::bit_cast<float>(get_u32(bytes, at));
        const float im = std::bit_cast<float>(get_u32(bytes, at + 4));
        v = {re, im};
        at += 8;
    }
    if (header)
        *header = h;
    return t;
}

DatasetManifest write_dataset(const CfrDataset& dataset, const std::filesystem::path& directory)
{
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec)
        throw IoError("cannot create " + directory.string() + ": " + ec.message());

    DatasetManifest manifest;
    json ues = json::array();
    for (const auto& ue : dataset.ues()) {
        json j = {{"id", ue.ue_id},
                  {"x", ue.position.x},
                  {"y", ue.position.y},
                  {"z", ue.position.z},
                  {"file", channel_file_name(ue.ue_id)}};
        if (ue.grid_index) {
            j["grid_i"] = ue.grid_index->first;
            j["grid_j"] = ue.grid_index->second;
        }
        ues.push_back(std::move(j));
    }
    const json metadata = {{"format", "CFR1"}, {"header", header_json(dataset.header())}, {"ues", ues}};
    const auto meta_bytes = to_bytes(metadata.dump(2) + "\n");
    write_file(directory / kMetadataFile, meta_bytes);
    manifest.files.push_back({kMetadataFile, crc32_of(meta_bytes), meta_bytes.size()});

    for (const auto& ue : dataset.ues()) {
        const auto bytes = encode_cfr1(dataset.header(), dataset.tensor(ue.ue_id));
        const std::string name = channel_file_name(ue.ue_id);
        write_file(directory / name, bytes);
        manifest.files.push_back({name, crc32_of(bytes), bytes.size()});
    }

    json files = json::array();
    for (const auto& f : manifest.files)
        files.push_back({{"name", f.name}, {"crc32", f.crc32}, {"bytes", f.bytes}});
    const json mj = {{"format", "CFR1"}, {"files", files}};
    write_file(directory / kManifestFile, to_bytes(mj.dump(2) + "\n"));
    return manifest;
}

CfrDataset read_dataset(const std::filesystem::path& directory)
{
    json manifest;
    json metadata;
    std::vector<std::uint8_t> meta_bytes;
    try {
        const auto mbytes = read_file(directory / kManifestFile);
        manifest = json::parse(mbytes.begin(), mbytes.end());
        meta_bytes = read_file(directory / kMetadataFile);
        metadata = json::parse(meta_bytes.begin(), meta_bytes.end());
    } catch (const json::exception& e) {
        throw FormatError("dataset " + directory.string() + ": " + e.what());
    }

    CfrDataset ds;
    try {
        std::map<std::string, std::uint32_t> crcs;
        for (const auto& f : manifest.at("files"))
            crcs[f.at("name").get<std::string>()] = f.at("crc32").get<std::uint32_t>();
        auto meta_crc = crcs.find(kMetadataFile);
        if (meta_crc == crcs.end())
            throw FormatError("manifest does not list " + std::string(kMetadataFile));
        if (crc32_of(meta_bytes) != meta_crc->second)
            throw ChecksumError("checksum mismatch for " + (directory / kMetadataFile).string());

        ds.header_ = header_from_json(metadata.at("header"));
        ds.header_.tensor_size();
        for (const auto& u : metadata.at("ues")) {
            UeMetadata ue;
            ue.ue_id = u.at("id").get<std::uint32_t>();
            ue.position = {u.at("x").get<double>(), u.at("y").get<double>(), u.at("z").get<double>()};
            if (u.contains("grid_i") && u.contains("grid_j"))
                ue.grid_index = std::pair{u.at("grid_i").get<std::int64_t>(), u.at("grid_j").get<std::int64_t>()};
            const std::string file = u.value("file", channel_file_name(ue.ue_id));
            auto crc = crcs.find(file);
            if (crc == crcs.end())
                throw FormatError("manifest does not list " + file);
            for (const auto& other : ds.ues_)
                if (other.ue_id == ue.ue_id)
                    throw FormatError("duplicate UE id " + std::to_string(ue.ue_id));
            ds.ues_.push_back(ue);
            ds.files_.push_back(file);
            ds.crcs_.push_back(crc->second);
        }
    } catch (const json::exception& e) {
        throw FormatError("dataset " + directory.string() + ": " + e.what());
    }
    ds.directory_ = directory;
    ds.files_opened_ = std::make_shared<std::atomic<std::size_t>>(0);
    return ds;
}

std::uint32_t query_ue(const CfrDataset& dataset, const Vec3& position, double tolerance)
{
    const UeMetadata* best = nullptr;
    double best_d = 0.0;
    for (const auto& ue : dataset.ues()) {
        const double d = distance(ue.position, position);
        if (d > tolerance)
            continue;
        if (!best || d < best_d || (d == best_d && ue.ue_id < best->ue_id)) {
            best = &ue;
            best_d = d;
        }
    }
    if (!best)
        throw NotFound("no UE within " + std::to_string(tolerance) + " m of the requested position");
    return best->ue_id;
}

ChannelRealization get_channel(const CfrDataset& dataset, std::uint32_t ue_id, std::size_t stripe_id,
                               std::size_t ru_id, std::size_t oversampling)
{
    const auto& h = dataset.header();
    if (stripe_id >= h.n_stripes)
        throw IndexError("stripe_id " + std::to_string(stripe_id) + " out of range (" + std::to_string(h.n_stripes) +
                         " stripes)");
    if (ru_id >= h.n_rus)
        throw IndexError("ru_id " + std::to_string(ru_id) + " out of range (" + std::to_string(h.n_rus) + " RUs)");
    const CVector t = dataset.tensor(ue_id);

    ChannelRealization ch;
    ch.grid = SubcarrierGrid(h.fc, h.bw, h.q, oversampling);
    ch.n_rx = h.n_rx;
    ch.n_tx = h.n_tx;
    ch.provenance = ChannelProvenance::Dataset;
    ch.h.resize(static_cast<std::size_t>(h.q) * h.n_rx * h.n_tx);
    for (std::size_t k = 0; k < h.n_rx; ++k)
        for (std::size_t m = 0; m < h.n_tx; ++m)
            for (std::size_t q = 0; q < h.q; ++q)
                ch.at(q, k, m) = t[h.index(stripe_id, ru_id, k, m, q)];
    return ch;
}

std::vector<Vec3> ru_elements(const EnvironmentConfig& env, const SubcarrierGrid& grid, std::size_t stripe_id,
                              std::size_t ru_id)
{
    if (stripe_id >= env.n_stripes() || ru_id >= env.n_rus(stripe_id))
        throw IndexError("no RU " + std::to_string(ru_id) + " on stripe " + std::to_string(stripe_id));
    const Vec3 center = env.radio_stripes[stripe_id][ru_id + 1].position;
    return linear_array(center, env.antenna.n_antennas, env.stripe_axis(), kSpeedOfLight / grid.fc() / 2.0);
}

std::vector<Vec3> ue_elements(const EnvironmentConfig& env, const SubcarrierGrid& grid, const Vec3& position)
{
    return linear_array(position, env.antenna.ue_antennas, env.stripe_axis(), kSpeedOfLight / grid.fc() / 2.0);
}

AntennaPattern ru_pattern(const EnvironmentConfig& env)
{
    AntennaPattern p;
    p.kind = env.antenna.pattern;
    p.boresight = env.antenna.ru_boresight;
    return p;
}

AntennaPattern ue_pattern(const EnvironmentConfig& env)
{
    AntennaPattern p;
    p.kind = env.antenna.pattern;
    p.boresight = env.antenna.ue_boresight;
    return p;
}

ChannelRealization synthetic_channel(const EnvironmentConfig& env, const SubcarrierGrid& grid,
                                     const SyntheticSpec& spec, std::size_t ue_index, std::size_t stripe_id,
                                     std::size_t ru_id, std::uint64_t seed)
{
    if (ue_index >= env.ue_positions.size())
        throw IndexError("UE index " + std::to_string(ue_index) + " out of range");
    const Vec3& ue = env.ue_positions[ue_index];
    const auto tx = ru_elements(env, grid, stripe_id, ru_id);
    const auto rx = ue_elements(env, grid, ue);
    if (spec.model == SyntheticModel::Los)
        return los_channel(grid, tx, rx, ru_pattern(env), ue_pattern(env));

    const Vec3 ru = env.radio_stripes[stripe_id][ru_id + 1].position;
    LargeScale ls;
    ls.distance = distance(ru, ue);
    ls.antenna_gain = antenna_gain_38901(ue - ru, ru_pattern(env)) * antenna_gain_38901(ru - ue, ue_pattern(env));
    RngStream rng(seed, {ue_index, stripe_id, ru_id}, "tdl");
    return tdl_channel(grid, spec.tdl, tx.size(), rx.size(), rng, ls);
}

CfrDataset generate_synthetic(const EnvironmentConfig& env, const SubcarrierGrid& grid, const SyntheticSpec& spec,
                              std::uint64_t seed)
{
    CfrHeader h;
    h.n_stripes = static_cast<std::uint32_t>(env.n_stripes());
    for (std::size_t s = 0; s < env.n_stripes(); ++s)
        h.n_rus = std::max<std::uint32_t>(h.n_rus, static_cast<std::uint32_t>(env.n_rus(s)));
    h.n_rx = static_cast<std::uint32_t>(env.antenna.ue_antennas);
    h.n_tx = static_cast<std::uint32_t>(env.antenna.n_antennas);
    h.q = static_cast<std::uint32_t>(grid.q());
    h.fc = grid.fc();
    h.bw = grid.bw();

    std::vector<UeMetadata> ues;
    std::vector<CVector> tensors;
    for (std::size_t u = 0; u < env.ue_positions.size(); ++u) {
        ues.push_back({static_cast<std::uint32_t>(u), env.ue_positions[u], std::nullopt});
        CVector t(h.tensor_size());
        for (std::size_t s = 0; s < env.n_stripes(); ++s) {
            for (std::size_t r = 0; r < env.n_rus(s); ++r) {
                const auto ch = synthetic_channel(env, grid, spec, u, s, r, seed);
                for (std::size_t k = 0; k < h.n_rx; ++k)
                    for (std::size_t m = 0; m < h.n_tx; ++m)
                        for (std::size_t q = 0; q < h.q; ++q)
                            t[h.index(s, r, k, m, q)] = ch.at(q, k, m);
            }
        }
        tensors.push_back(std::move(t));
    }
    return CfrDataset(h, std::move(ues), std::move(tensors));
}

} // namespace stripesim
