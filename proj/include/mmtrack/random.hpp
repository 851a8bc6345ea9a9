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

#ifndef MMTRACK_RANDOM_HPP
#define MMTRACK_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

namespace mmtrack {

/// Independent substream identifiers derived from one user seed.
enum class Stream : std::uint64_t {
    kWaveform = 1,
    kNoise = 2,     // index = path number
    kCfoWalk = 3,
    kCfoOffset = 4,
    kAoa = 5,       // index = detection instant
    kSweep = 6,     // index = grid point
};

/// Mixes (seed, stream, index) into a 64-bit seed with splitmix64 finalizers.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

/// Standard normal variates addressable by absolute index.
///
/// Values are produced in fixed-size chunks, each from its own derived engine, so any range
/// can be regenerated without replaying the sequence from the start.
class IndexedNormal {
public:
    static constexpr std::uint64_t kChunk = 4096;

    explicit IndexedNormal(std::uint64_t seed) : seed_(seed) {}

    void fill(std::uint64_t start, std::span<double> out);

private:
    void load(std::uint64_t chunk);

    std::uint64_t seed_;
    std::uint64_t loaded_ = ~std::uint64_t{0};
    double buffer_[kChunk];
};

/// Uniform variates on [0, 1) addressable by absolute index, chunked like IndexedNormal.
class IndexedUniform {
public:
    static constexpr std::uint64_t kChunk = 4096;

    explicit IndexedUniform(std::uint64_t seed) : seed_(seed) {}

    void fill(std::uint64_t start, std::span<double> out);

private:
    void load(std::uint64_t chunk);

    std::uint64_t seed_;
    std::uint64_t loaded_ = ~std::uint64_t{0};
    double buffer_[kChunk];
};

}  // namespace mmtrack

#endif  // MMTRACK_RANDOM_HPP
