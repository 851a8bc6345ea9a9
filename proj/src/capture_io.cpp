// SPDX-License-Identifier: Apache-2.0
//
// mmtrack: uplink mmWave trajectory tracking from multi-path Doppler differences
// Copyright (C) 2026 The mmtrack authors
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

#include "mmtrack/capture_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include <json.hpp>

#include "mmtrack/errors.hpp"

namespace mmtrack {

namespace {

using nlohmann::json;

constexpr const char* kSidecarName = "capture.json";

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

void swap_floats(std::span<float> values) {
    if constexpr (std::endian::native == std::endian::big) {
        for (float& f : values) {
            f = std::bit_cast<float>(to_little(std::bit_cast<std::uint32_t>(f)));
        }
    }
}

}  // namespace

void write_sidecar(const std::filesystem::path& dir, const CaptureSidecar& s) {
    json j;
    j["format"] = s.format;
    j["sample_period_s"] = s.sample_period_s;
    j["carrier_hz"] = s.carrier_hz;
    j["stream_length"] = s.stream_length;
    j["seed"] = s.seed;
    j["samples_per_interval"] = s.samples_per_interval;
    j["files"] = s.files;
    j["samples_stored"] = s.samples_stored;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / kSidecarName, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (dir / kSidecarName).string());
    }
    out << j.dump(2) << '\n';
}

CaptureSidecar read_sidecar(const std::filesystem::path& dir) {
    std::ifstream in(dir / kSidecarName);
    if (!in) {
        throw Error("missing capture sidecar " + (dir / kSidecarName).string());
    }
    CaptureSidecar s;
    try {
        const json j = json::parse(in);
        s.format = j.at("format").get<std::string>();
        s.sample_period_s = j.at("sample_period_s").get<double>();
        s.carrier_hz = j.at("carrier_hz").get<double>();
        s.stream_length = j.at("stream_length").get<std::uint64_t>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.samples_per_interval = j.at("samples_per_interval").get<std::size_t>();
        s.files = j.at("files").get<std::array<std::string, 3>>();
        s.samples_stored = j.value("samples_stored", true);
    } catch (const json::exception& e) {
        throw Error("malformed capture sidecar: " + std::string(e.what()));
    }
    if (s.format != "cf32le") {
        throw Error("unsupported capture format '" + s.format + "'");
    }
    return s;
}

CaptureWriter::CaptureWriter(const std::filesystem::path& dir, CaptureSidecar sidecar)
    : dir_(dir), sidecar_(std::move(sidecar)) {
    std::filesystem::create_directories(dir_);
    for (std::size_t i = 0; i < 3; ++i) {
        files_[i].open(dir_ / sidecar_.files[i], std::ios::binary | std::ios::trunc);
        if (!files_[i]) {
            throw Error("cannot open " + (dir_ / sidecar_.files[i]).string());
        }
    }
}

void CaptureWriter::write(std::array<std::span<const Sample>, 3> block) {
    const std::size_t n = block[0].size();
    buffer_.resize(2 * n);
    for (std::size_t i = 0; i < 3; ++i) {
        if (block[i].size() != n) {
            throw std::invalid_argument("capture blocks must have equal lengths");
        }
        for (std::size_t j = 0; j < n; ++j) {
            buffer_[2 * j] = static_cast<float>(block[i][j].real());
            buffer_[2 * j + 1] = static_cast<float>(block[i][j].imag());
        }
        swap_floats(buffer_);
        files_[i].write(reinterpret_cast<const char*>(buffer_.data()),
                        static_cast<std::streamsize>(buffer_.size() * sizeof(float)));
        if (!files_[i]) {
            throw Error("write failed for " + (dir_ / sidecar_.files[i]).string());
        }
    }
    written_ += n;
}

void CaptureWriter::close() {
    for (auto& f : files_) {
        f.close();
    }
    sidecar_.stream_length = written_;
    write_sidecar(dir_, sidecar_);
}

CaptureReader::CaptureReader(const std::filesystem::path& dir) : sidecar_(read_sidecar(dir)) {
    if (!sidecar_.samples_stored) {
        throw Error("capture in " + dir.string() + " was not stored; rerun with sample output enabled");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const auto path = dir / sidecar_.files[i];
        files_[i].open(path, std::ios::binary);
        if (!files_[i]) {
            throw Error("missing capture stream " + path.string());
        }
        const auto bytes = std::filesystem::file_size(path);
        if (bytes != sidecar_.stream_length * 2 * sizeof(float)) {
            throw Error("capture stream " + path.string() + " does not match the sidecar length");
        }
    }
}

std::size_t CaptureReader::read(std::array<std::span<Sample>, 3> out) {
    const std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(out[0].size(), sidecar_.stream_length - position_));
    buffer_.resize(2 * n);
    for (std::size_t i = 0; i < 3; ++i) {
        files_[i].read(reinterpret_cast<char*>(buffer_.data()),
                       static_cast<std::streamsize>(buffer_.size() * sizeof(float)));
        if (!files_[i]) {
            throw Error("short read from capture stream " + sidecar_.files[i]);
        }
        swap_floats(buffer_);
        for (std::size_t j = 0; j < n; ++j) {
            out[i][j] = Sample(buffer_[2 * j], buffer_[2 * j + 1]);
        }
    }
    position_ += n;
    return n;
}

void write_capture(const BasebandCapture& capture, const std::filesystem::path& dir) {
    CaptureSidecar s;
    s.sample_period_s = capture.sample_period_s;
    s.carrier_hz = capture.carrier_hz;
    s.seed = capture.seed;
    s.samples_per_interval = capture.samples_per_interval;
    CaptureWriter writer(dir, s);
    writer.write({capture.streams[0], capture.streams[1], capture.streams[2]});
    writer.close();
}

BasebandCapture read_capture(const std::filesystem::path& dir) {
    CaptureReader reader(dir);
    const CaptureSidecar& s = reader.sidecar();
    BasebandCapture capture;
    capture.sample_period_s = s.sample_period_s;
    capture.carrier_hz = s.carrier_hz;
    capture.seed = s.seed;
    capture.samples_per_interval = s.samples_per_interval;
    for (auto& stream : capture.streams) {
        stream.resize(static_cast<std::size_t>(s.stream_length));
    }
    reader.read({capture.streams[0], capture.streams[1], capture.streams[2]});
    return capture;
}

}  // namespace mmtrack
