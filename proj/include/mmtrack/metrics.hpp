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

#ifndef MMTRACK_METRICS_HPP
#define MMTRACK_METRICS_HPP

#include <array>
#include <span>
#include <vector>

#include "mmtrack/track.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

inline constexpr std::array<double, 3> kReportedQuantiles{0.5, 0.9, 0.95};

struct QuantileRow {
    double p = 0.0;
    double err_m = 0.0;
};

/// Empirical distribution of position errors.
struct ErrorCdf {
    std::vector<double> sorted_errors_m;
    std::vector<QuantileRow> quantiles;

    /// Nearest-rank quantile: the ceil(p N)-th smallest sample.
    double quantile(double p) const;
};

/// Nearest-rank quantile of already sorted samples; p in (0, 1].
double nearest_rank(std::span<const double> sorted, double p);

/// Builds the CDF from unsorted samples. Throws InsufficientDataError when empty.
ErrorCdf error_cdf(std::vector<double> errors_m);

/// Euclidean error of every estimate against the truth at its time stamp.
std::vector<double> position_errors(const TrackEstimate& est, const Trajectory& truth);

/// Throws DurationMismatchError when an estimate time falls outside the truth.
ErrorCdf error_cdf(const TrackEstimate& est, const Trajectory& truth);

}  // namespace mmtrack

#endif  // MMTRACK_METRICS_HPP
