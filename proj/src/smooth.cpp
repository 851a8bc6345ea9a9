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

#include "mmtrack/smooth.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "mmtrack/errors.hpp"

namespace mmtrack {

void SmootherConfig::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("smoother.window", "must be an odd integer >= 3");
    }
    if (order >= window) {
        throw ConfigError("smoother.order", "must be below the window length");
    }
}

std::vector<double> polynomial_smooth(std::span<const double> values, const std::vector<bool>& valid,
                                      const SmootherConfig& cfg) {
    cfg.validate();
    const std::size_t n = values.size();
    if (!valid.empty() && valid.size() != n) {
        throw std::invalid_argument("validity mask length differs from the series");
    }
    auto is_valid = [&](std::size_t i) { return valid.empty() || valid[i]; };

    std::size_t total_valid = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total_valid += is_valid(i) ? 1 : 0;
    }
    const std::size_t needed = cfg.order + 1;
    if (total_valid < needed) {
        throw InsufficientDataError("smoothing needs " + std::to_string(needed) + " valid points, got " +
                                    std::to_string(total_valid));
    }

    const std::size_t half = cfg.window / 2;
    const double scale = static_cast<double>(half);
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> used;
    for (std::size_t k = 0; k < n; ++k) {
        if (!is_valid(k) && !cfg.fill_gaps) {
            continue;
        }
        std::size_t reach = half;
        for (;;) {
            const std::size_t lo = k >= reach ? k - reach : 0;
            const std::size_t hi = std::min(n - 1, k + reach);
            used.clear();
            for (std::size_t i = lo; i <= hi; ++i) {
                if (is_valid(i)) {
                    used.push_back(i);
                }
            }
            if (used.size() >= needed || (lo == 0 && hi == n - 1)) {
                break;
            }
            ++reach;
        }

        const auto rows = static_cast<Eigen::Index>(used.size());
        const auto cols = static_cast<Eigen::Index>(needed);
        Eigen::MatrixXd a(rows, cols);
        Eigen::VectorXd b(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const std::size_t i = used[static_cast<std::size_t>(r)];
            const double x = (static_cast<double>(i) - static_cast<double>(k)) / scale;
            double pw = 1.0;
            for (Eigen::Index c = 0; c < cols; ++c) {
                a(r, c) = pw;
                pw *= x;
            }
            b(r) = values[i];
        }
        const Eigen::VectorXd coeff = a.colPivHouseholderQr().solve(b);
        out[k] = coeff(0);
    }
    return out;
}

std::vector<double> unwrap_phase(std::span<const double> rad) {
    std::vector<double> out(rad.begin(), rad.end());
    double shift = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double jump = rad[i] - rad[i - 1];
        shift -= 2.0 * kPi * std::round(jump / (2.0 * kPi));
        out[i] = rad[i] + shift;
    }
    return out;
}

DetectionSeries smooth_series(const DetectionSeries& raw, const SmootherConfig& cfg) {
    const std::size_t n = raw.size();
    DetectionSeries out = raw;
    for (std::size_t path = 0; path < 2; ++path) {
        std::vector<double> values(n, 0.0);
        std::vector<bool> valid(n, false);
        for (std::size_t k = 0; k < n; ++k) {
            if (raw.records[k].mddoa_hz[path]) {
                values[k] = *raw.records[k].mddoa_hz[path];
                valid[k] = true;
            }
        }
        const std::vector<double> smoothed = polynomial_smooth(values, valid, cfg);
        for (std::size_t k = 0; k < n; ++k) {
            if (std::isnan(smoothed[k])) {
                out.records[k].mddoa_hz[path].reset();
            } else {
                out.records[k].mddoa_hz[path] = smoothed[k];
            }
        }
    }
    std::vector<double> aoa(n);
    for (std::size_t k = 0; k < n; ++k) {
        aoa[k] = raw.records[k].aoa_rad;
    }
    const std::vector<double> smoothed = polynomial_smooth(unwrap_phase(aoa), {}, cfg);
    for (std::size_t k = 0; k < n; ++k) {
        out.records[k].aoa_rad = wrap_angle(smoothed[k]);
    }
    return out;
}

}  // namespace mmtrack
