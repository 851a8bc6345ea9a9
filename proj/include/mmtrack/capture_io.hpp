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

#ifndef MMTRACK_CAPTURE_IO_HPP
#define MMTRACK_CAPTURE_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "mmtrack/synth.hpp"

namespace mmtrack {

/// Metadata stored next to the per-path sample files as `capture.json`.
struct CaptureSidecar {
    std::string format = "cf32le";
    double sample_period_s = 0.0;
    double carrier_hz = 0.0;
    std::uint64_t stream_length = 0;
    std::uint64_t seed = 0;
    std::size_t samples_per_interval = 0;
    std::array<std::string, 3> files{"capture_path1.cf32", "capture_path2.cf32", "capture_path3.cf32"};
    /// False when only the metadata of a streamed capture was kept.
    bool samples_stored = true;
};

void write_sidecar(const std::filesystem::path& dir, const CaptureSidecar& sidecar);
/// Throws Error when the sidecar is missing or malformed.
CaptureSidecar read_sidecar(const std::filesystem::path& dir);

/// Streams interleaved little-endian float32 I/Q, one file per path.
class CaptureWriter {
public:
    /// Creates `dir` if needed and truncates the sample files.
    CaptureWriter(const std::filesystem::path& dir, CaptureSidecar sidecar);

    void write(std::array<std::span<const Sample>, 3> block);
    /// Writes the sidecar with the final stream length.
    void close();
    std::uint64_t written() const { return written_; }

private:
    std::filesystem::path dir_;
    CaptureSidecar sidecar_;
    std::array<std::ofstream, 3> files_;
    std::uint64_t written_ = 0;
    std::vector<float> buffer_;
};

/// Sequential reader over a capture directory.
class CaptureReader {
public:
    explicit CaptureReader(const std::filesystem::path& dir);

    const CaptureSidecar& sidecar() const { return sidecar_; }
    /// Fills up to out[0].size() samples per path; returns the count read (0 at the end).
    std::size_t read(std::array<std::span<Sample>, 3> out);

private:
    CaptureSidecar sidecar_;
    std::array<std::ifstream, 3> files_;
    std::uint64_t position_ = 0;
    std::vector<float> buffer_;
};

void write_capture(const BasebandCapture& capture, const std::filesystem::path& dir);
BasebandCapture read_capture(const std::filesystem::path& dir);

}  // namespace mmtrack

#endif  // MMTRACK_CAPTURE_IO_HPP
