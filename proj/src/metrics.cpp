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

#include "mmtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mmtrack/errors.hpp"

namespace mmtrack {

double nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw InsufficientDataError("quantile of an empty sample");
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("quantile level must lie in (0, 1]");
    }
    const double rank = std::ceil(p * static_cast<double>(sorted.size()) - 1e-12);
    const std::size_t idx = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
}

double ErrorCdf::quantile(double p) const { return nearest_rank(sorted_errors_m, p); }

ErrorCdf error_cdf(std::vector<double> errors_m) {
    if (errors_m.empty()) {
        throw InsufficientDataError("error CDF needs at least one sample");
    }
    ErrorCdf cdf;
    std::sort(errors_m.begin(), errors_m.end());
    cdf.sorted_errors_m = std::move(errors_m);
    for (double p : kReportedQuantiles) {
        cdf.quantiles.push_back({p, cdf.quantile(p)});
    }
    return cdf;
}

std::vector<double> position_errors(const TrackEstimate& est, const Trajectory& truth) {
    std::vector<double> errors;
    errors.reserve(est.entries.size());
    for (const TrackEntry& e : est.entries) {
        if (!(e.t_s >= 0.0 && e.t_s <= truth.duration() * (1.0 + 1e-12))) {
            throw DurationMismatchError("estimate at t = " + std::to_string(e.t_s) +
                                        " s lies outside the ground truth");
        }
        const double t = std::min(e.t_s, truth.duration());
        errors.push_back((e.p_hat - truth.position(t)).norm());
    }
    return errors;
}

ErrorCdf error_cdf(const TrackEstimate& est, const Trajectory& truth) {
    if (est.entries.empty()) {
        throw InsufficientDataError("track estimate is empty");
    }
    return error_cdf(position_errors(est, truth));
}

}  // namespace mmtrack
