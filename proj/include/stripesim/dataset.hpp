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

#include "stripesim/channel.hpp"
#include "stripesim/config.hpp"
#include "stripesim/geometry.hpp"
#include "stripesim/grid.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Per-UE channel frequency response datasets.
//
// On disk a dataset directory holds metadata.json (header and UE table), one CFR1 channel file
// per UE and manifest.json with the CRC32 of every file. A CFR1 file is little-endian:
//
//   offset  0  "CFR1"
//   offset  4  u32 n_stripes, n_rus, n_rx, n_tx, Q
//   offset 24  f64 fc, bw
//   offset 40  float32 (re, im) pairs, row-major stripe -> ru -> rx -> tx -> q
namespace stripesim {

inline constexpr std::size_t kCfrHeaderBytes = 40;

struct CfrHeader {
    std::uint32_t n_stripes = 0;
    std::uint32_t n_rus = 0;
    std::uint32_t n_rx = 0;
    std::uint32_t n_tx = 0;
    std::uint32_t q = 0;
    double fc = 0.0;
    double bw = 0.0;

    /// Complex entries per UE tensor.
    std::size_t tensor_size() const;
    /// Offset of H[q]_{k,m} for (stripe, ru) within a UE tensor.
    std::size_t index(std::size_t stripe, std::size_t ru, std::size_t k, std::size_t m, std::size_t qi) const;
    DatasetShape shape() const;
    bool operator==(const CfrHeader&) const = default;
};

struct UeMetadata {
    std::uint32_t ue_id = 0;
    Vec3 position;
    std::optional<std::pair<std::int64_t, std::int64_t>> grid_index;

    bool operator==(const UeMetadata&) const = default;
};

/// Either fully in memory (built or generated) or backed by a directory whose channel files are
/// read on demand. Lookups are const and safe to run concurrently.
class CfrDataset {
public:
    CfrDataset() = default;
    /// `tensors[i]` belongs to `ues[i]` and must hold header.tensor_size() entries.
    CfrDataset(CfrHeader header, std::vector<UeMetadata> ues, std::vector<CVector> tensors);

    const CfrHeader& header() const { return header_; }
    const std::vector<UeMetadata>& ues() const { return ues_; }
    bool lazy() const { return !directory_.empty(); }
    const std::filesystem::path& directory() const { return directory_; }

    /// Full tensor of one UE. Lazy datasets read and verify the file on every call.
    CVector tensor(std::uint32_t ue_id) const;

    /// Number of channel files opened so far (lazy datasets only).
    std::size_t files_opened() const { return files_opened_ ? files_opened_->load() : 0; }

    friend CfrDataset read_dataset(const std::filesystem::path& directory);

private:
    std::size_t position_of(std::uint32_t ue_id) const;

    CfrHeader header_;
    std::vector<UeMetadata> ues_;
    std::vector<CVector> tensors_;
    std::filesystem::path directory_;
    std::vector<std::string> files_;
    std::vector<std::uint32_t> crcs_;
    std::shared_ptr<std::atomic<std::size_t>> files_opened_;
};

struct DatasetManifest {
    struct Entry {
        std::string name;
        std::uint32_t crc32 = 0;
        std::uint64_t bytes = 0;
    };
    std::vector<Entry> files;
};

/// Channel file name for a UE id.
std::string channel_file_name(std::uint32_t ue_id);

/// Writes metadata.json, the channel files and manifest.json. Throws IoError.
DatasetManifest write_dataset(const CfrDataset& dataset, const std::filesystem::path& directory);

/// Loads the header and UE table; channel tensors are read on demand. Throws FormatError,
/// ChecksumError or IoError.
CfrDataset read_dataset(const std::filesystem::path& directory);

/// Encodes / decodes one CFR1 channel file.
std::vector<std::uint8_t> encode_cfr1(const CfrHeader& header, const CVector& tensor);
CVector decode_cfr1(std::span<const std::uint8_t> bytes, CfrHeader* header = nullptr);

/// Nearest UE within `tolerance` metres; equal distances go to the smaller id. Throws NotFound.
std::uint32_t query_ue(const CfrDataset& dataset, const Vec3& position, double tolerance);

/// H[q] between the RU (transmit side) and the UE (receive side). Throws IndexError.
ChannelRealization get_channel(const CfrDataset& dataset, std::uint32_t ue_id, std::size_t stripe_id,
                               std::size_t ru_id, std::size_t oversampling = 1);

// ----- Synthetic datasets ------------------------------------------------------

enum class SyntheticModel { Los, Tdl };

struct SyntheticSpec {
    SyntheticModel model = SyntheticModel::Los;
    TdlParams tdl;
};

/// RU element positions: n_antennas elements at half-wavelength spacing along the stripe axis.
std::vector<Vec3> ru_elements(const EnvironmentConfig& env, const SubcarrierGrid& grid, std::size_t stripe_id,
                              std::size_t ru_id);
std::vector<Vec3> ue_elements(const EnvironmentConfig& env, const SubcarrierGrid& grid, const Vec3& position);

AntennaPattern ru_pattern(const EnvironmentConfig& env);
AntennaPattern ue_pattern(const EnvironmentConfig& env);

/// The model channel for one (UE, stripe, RU) triple. TDL draws come from a stream keyed by
/// (seed, ue_index, stripe_id, ru_id).
ChannelRealization synthetic_channel(const EnvironmentConfig& env, const SubcarrierGrid& grid,
                                     const SyntheticSpec& spec, std::size_t ue_index, std::size_t stripe_id,
                                     std::size_t ru_id, std::uint64_t seed);

/// Evaluates synthetic_channel for every UE of the environment. UE ids are the list indices.
CfrDataset generate_synthetic(const EnvironmentConfig& env, const SubcarrierGrid& grid, const SyntheticSpec& spec,
                              std::uint64_t seed);

} // namespace stripesim
