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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmtrack/errors.hpp"
#include "mmtrack/smooth.hpp"

namespace mmtrack {
namespace {

std::vector<double> polynomial(std::size_t n, std::vector<double> coeff) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double pw = 1.0;
        double v = 0.0;
        for (double c : coeff) {
            v += c * pw;
            pw *= static_cast<double>(k);
        }
        out[k] = v;
    }
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

TEST(SmootherConfig, Validation) {
    EXPECT_NO_THROW(SmootherConfig{}.validate());
    EXPECT_THROW((SmootherConfig{10, 2, true}.validate()), ConfigError);
    EXPECT_THROW((SmootherConfig{1, 0, true}.validate()), ConfigError);
    EXPECT_THROW((SmootherConfig{5, 5, true}.validate()), ConfigError);
    EXPECT_NO_THROW((SmootherConfig{3, 2, true}.validate()));
}

TEST(PolynomialSmooth, ConstantUnchanged) {
    const std::vector<double> c(40, -3.25);
    EXPECT_LE(max_abs_diff(polynomial_smooth(c, {}, SmootherConfig{}), c), 1e-12);
}

TEST(PolynomialSmooth, LinearUnchanged) {
    const auto line = polynomial(57, {2.0, -0.37});
    for (std::size_t order : {1u, 2u, 3u}) {
        EXPECT_LE(max_abs_diff(polynomial_smooth(line, {}, SmootherConfig{11, order, true}), line), 1e-9);
    }
}

TEST(PolynomialSmooth, ReproducesPolynomialsUpToOrderIncludingEnds) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int seed = 0; seed < 100; ++seed) {
        for (std::size_t order = 0; order <= 3; ++order) {
            std::vector<double> coeff;
            double scale = 1.0;
            for (std::size_t d = 0; d <= order; ++d) {
                coeff.push_back(u(rng) * scale);
                scale *= 0.05;
            }
            const auto p = polynomial(60, coeff);
            const SmootherConfig cfg{2 * order + 5, order, true};
            EXPECT_LE(max_abs_diff(polynomial_smooth(p, {}, cfg), p), 1e-9) << "order " << order;
        }
    }
}

TEST(PolynomialSmooth, VarianceReductionAcrossSeeds) {
    const double sigma = 0.5;
    const auto clean = polynomial(200, {1.0, 0.02});
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::normal_distribution<double> g(0.0, sigma);
        std::vector<double> noisy(clean);
        for (double& v : noisy) {
            v += g(rng);
        }
        const auto smoothed = polynomial_smooth(noisy, {}, SmootherConfig{11, 2, true});
        double sse = 0.0;
        for (std::size_t k = 0; k < clean.size(); ++k) {
            sse += (smoothed[k] - clean[k]) * (smoothed[k] - clean[k]);
        }
        EXPECT_LT(std::sqrt(sse / static_cast<double>(clean.size())), sigma) << "seed " << seed;
    }
}

TEST(PolynomialSmooth, ShiftEquivariance) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<double> x(80);
    for (double& v : x) {
        v = g(rng);
    }
    std::vector<bool> valid(x.size(), true);
    valid[10] = valid[11] = valid[40] = false;
    std::vector<double> shifted(x);
    for (double& v : shifted) {
        v += 17.5;
    }
    const auto a = polynomial_smooth(x, valid, SmootherConfig{});
    const auto b = polynomial_smooth(shifted, valid, SmootherConfig{});
    for (std::size_t k = 0; k < x.size(); ++k) {
        EXPECT_NEAR(b[k], a[k] + 17.5, 1e-9);
    }
}

TEST(PolynomialSmooth, GapFillConsistencyWhenAllValid) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<double> x(50);
    for (double& v : x) {
        v = g(rng);
    }
    const std::vector<bool> valid(x.size(), true);
    const auto on = polynomial_smooth(x, valid, SmootherConfig{11, 2, true});
    const auto off = polynomial_smooth(x, valid, SmootherConfig{11, 2, false});
    EXPECT_EQ(on, off);
}

TEST(PolynomialSmooth, GapsFilledOrLeftEmpty) {
    const auto line = polynomial(30, {0.5, 0.25});
    std::vector<double> corrupted(line);
    std::vector<bool> valid(line.size(), true);
    for (std::size_t k : {0u, 5u, 6u, 7u, 29u}) {
        corrupted[k] = 1e6;
        valid[k] = false;
    }
    const auto filled = polynomial_smooth(corrupted, valid, SmootherConfig{5, 1, true});
    EXPECT_LE(max_abs_diff(filled, line), 1e-9);
    const auto holes = polynomial_smooth(corrupted, valid, SmootherConfig{5, 1, false});
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (valid[k]) {
            EXPECT_NEAR(holes[k], line[k], 1e-9);
        } else {
            EXPECT_TRUE(std::isnan(holes[k]));
        }
    }
}

TEST(PolynomialSmooth, WideGapWidensWindow) {
    const auto quad = polynomial(40, {1.0, -0.1, 0.01});
    std::vector<bool> valid(quad.size(), true);
    for (std::size_t k = 12; k < 28; ++k) {
        valid[k] = false;
    }
    const auto out = polynomial_smooth(quad, valid, SmootherConfig{5, 2, true});
    EXPECT_LE(max_abs_diff(out, quad), 1e-8);
}

TEST(PolynomialSmooth, TooFewValidPoints) {
    const std::vector<double> x(10, 1.0);
    std::vector<bool> valid(10, false);
    valid[3] = valid[7] = true;
    EXPECT_THROW(polynomial_smooth(x, valid, SmootherConfig{5, 2, true}), InsufficientDataError);
    valid[8] = true;
    EXPECT_NO_THROW(polynomial_smooth(x, valid, SmootherConfig{5, 2, true}));
    EXPECT_THROW(polynomial_smooth(x, std::vector<bool>(3, true), SmootherConfig{}), std::invalid_argument);
}

TEST(UnwrapPhase, RemovesFullTurnJumps) {
    std::vector<double> truth;
    std::vector<double> wrapped;
    for (int k = 0; k < 100; ++k) {
        const double a = 2.5 + 0.05 * k;
        truth.push_back(a);
        wrapped.push_back(wrap_angle(a));
    }
    const auto un = unwrap_phase(wrapped);
    EXPECT_LE(max_abs_diff(un, truth), 1e-12);
    EXPECT_TRUE(unwrap_phase(std::vector<double>{}).empty());
}

DetectionSeries series_from(const std::vector<double>& f2, const std::vector<double>& f3,
                            const std::vector<double>& aoa) {
    DetectionSeries s;
    s.detection_interval_s = 0.05;
    for (std::size_t k = 0; k < f2.size(); ++k) {
        DetectionRecord r;
        r.k = k;
        r.t_s = 0.05 * static_cast<double>(k);
        if (!std::isnan(f2[k])) {
            r.mddoa_hz[0] = f2[k];
            r.valid[0] = true;
        }
        if (!std::isnan(f3[k])) {
            r.mddoa_hz[1] = f3[k];
            r.valid[1] = true;
        }
        r.aoa_rad = aoa[k];
        s.records.push_back(r);
    }
    return s;
}

TEST(SmoothSeries, AngleNearPiSurvivesWrap) {
    const std::size_t n = 40;
    std::vector<double> aoa(n);
    std::vector<double> truth(n);
    for (std::size_t k = 0; k < n; ++k) {
        truth[k] = kPi - 0.2 + 0.01 * static_cast<double>(k);
        aoa[k] = wrap_angle(truth[k]);
    }
    const auto line = polynomial(n, {10.0, 1.0});
    const DetectionSeries out = smooth_series(series_from(line, line, aoa), SmootherConfig{});
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(wrap_angle(out.records[k].aoa_rad - truth[k]), 0.0, 1e-9);
        EXPECT_GT(out.records[k].aoa_rad, -kPi);
        EXPECT_LE(out.records[k].aoa_rad, kPi);
    }
}

TEST(SmoothSeries, ValidityPreservedAndGapsFilled) {
    const std::size_t n = 30;
    auto f2 = polynomial(n, {5.0, 0.5});
    auto f3 = polynomial(n, {-5.0, 0.25});
    f2[4] = std::nan("");
    f3[20] = std::nan("");
    const DetectionSeries raw = series_from(f2, f3, std::vector<double>(n, 0.3));
    const DetectionSeries filled = smooth_series(raw, SmootherConfig{});
    EXPECT_FALSE(filled.records[4].valid[0]);
    ASSERT_TRUE(filled.records[4].mddoa_hz[0].has_value());
    EXPECT_NEAR(*filled.records[4].mddoa_hz[0], 7.0, 1e-9);
    EXPECT_FALSE(filled.records[20].valid[1]);
    const DetectionSeries holes = smooth_series(raw, SmootherConfig{11, 2, false});
    EXPECT_FALSE(holes.records[4].mddoa_hz[0].has_value());
    EXPECT_FALSE(holes.records[20].mddoa_hz[1].has_value());
    EXPECT_TRUE(holes.records[5].mddoa_hz[0].has_value());
}

}  // namespace
}  // namespace mmtrack
