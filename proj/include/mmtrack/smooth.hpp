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

#ifndef MMTRACK_SMOOTH_HPP
#define MMTRACK_SMOOTH_HPP

#include <span>
#include <vector>

#include "mmtrack/detect.hpp"

namespace mmtrack {

struct SmootherConfig {
    std::size_t window = 11;
    std::size_t order = 2;
    bool fill_gaps = true;

    void validate() const;
};

/// Centered local polynomial (Savitzky-Golay style) smoothing over valid samples.
///
/// Each output is the value at k of a degree-`order` least-squares fit to the valid points in
/// [k - window/2, k + window/2], clipped at the series ends. The window widens symmetrically
/// while it holds fewer than order + 1 valid points. Invalid points come out as the fit value
/// when fill_gaps is set and as NaN otherwise. An empty `valid` marks every point valid.
std::vector<double> polynomial_smooth(std::span<const double> values, const std::vector<bool>& valid,
                                      const SmootherConfig& cfg);

/// Removes 2 pi jumps between consecutive samples.
std::vector<double> unwrap_phase(std::span<const double> rad);

/// Smooths both MDDoA tracks and the (unwrapped) AoA track. Validity flags are preserved.
DetectionSeries smooth_series(const DetectionSeries& raw, const SmootherConfig& cfg);

}  // namespace mmtrack

#endif  // MMTRACK_SMOOTH_HPP
