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

#include "mmtrack/random.hpp"

#include <algorithm>

namespace mmtrack {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename Fill>
void indexed_fill(std::uint64_t start, std::span<double> out, std::uint64_t chunk_size,
                  const double* buffer, Fill&& load) {
    std::uint64_t pos = start;
    std::size_t written = 0;
    while (written < out.size()) {
        const std::uint64_t chunk = pos / chunk_size;
        load(chunk);
        const std::uint64_t offset = pos - chunk * chunk_size;
        const std::uint64_t take = std::min<std::uint64_t>(chunk_size - offset, out.size() - written);
        std::copy(buffer + offset, buffer + offset + take, out.begin() + static_cast<std::ptrdiff_t>(written));
        written += take;
        pos += take;
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return splitmix64(h ^ index);
}

void IndexedNormal::load(std::uint64_t chunk) {
    if (chunk == loaded_) {
        return;
    }
    std::mt19937_64 engine(derive_seed(seed_, Stream::kWaveform, chunk));
    std::normal_distribution<double> normal;
    for (double& v : buffer_) {
        v = normal(engine);
    }
    loaded_ = chunk;
}

void IndexedNormal::fill(std::uint64_t start, std::span<double> out) {
    indexed_fill(start, out, kChunk, buffer_, [this](std::uint64_t c) { load(c); });
}

void IndexedUniform::load(std::uint64_t chunk) {
    if (chunk == loaded_) {
        return;
    }
    std::mt19937_64 engine(derive_seed(seed_, Stream::kWaveform, chunk));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (double& v : buffer_) {
        v = uniform(engine);
    }
    loaded_ = chunk;
}

void IndexedUniform::fill(std::uint64_t start, std::span<double> out) {
    indexed_fill(start, out, kChunk, buffer_, [this](std::uint64_t c) { load(c); });
}

}  // namespace mmtrack
