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

#ifndef MMTRACK_SERIES_IO_HPP
#define MMTRACK_SERIES_IO_HPP

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmtrack/detect.hpp"
#include "mmtrack/metrics.hpp"
#include "mmtrack/track.hpp"
#include "mmtrack/trajectory.hpp"

namespace mmtrack {

/// Shortest round-trip text for a double; "nan" for NaN.
std::string format_number(double v);

/// Columns k, t_s, f_d2_hz, f_d3_hz, valid2, valid3, aoa_rad. Missing values are written as nan.
void write_detection_csv(std::ostream& out, const DetectionSeries& series);
void write_detection_csv(const std::filesystem::path& file, const DetectionSeries& series);

/// Inverse of write_detection_csv. The detection interval is recovered from t_s / k.
DetectionSeries read_detection_csv(std::istream& in);
DetectionSeries read_detection_csv(const std::filesystem::path& file);

/// Columns k, t_s, x_hat_m, y_hat_m, x_true_m, y_true_m, err_m, iterations, converged.
/// Coordinates are shifted by `origin` (the BS position of the original scenario frame).
void write_track_csv(std::ostream& out, const TrackEstimate& est, const Trajectory& truth, Point2 origin = {});

/// Columns rank, err_m, cdf.
void write_cdf_csv(std::ostream& out, const ErrorCdf& cdf);
/// Columns p, err_m.
void write_quantile_csv(std::ostream& out, const ErrorCdf& cdf);

/// Streams one CAF magnitude row per detection instant: k, t_s, then one column per in-band bin
/// whose centre frequency is given in the header.
class SpectrogramWriter {
public:
    SpectrogramWriter(const std::filesystem::path& file, const DetectorConfig& cfg, double detection_interval_s);

    void add(const CafSpectrum& spectrum);
    void close();

private:
    std::filesystem::path file_;
    std::ofstream out_;
    DetectorConfig cfg_;
    double detection_interval_s_;
    std::vector<std::size_t> columns_;
    bool header_written_ = false;
};

/// Writes `text` to `file`, creating parent directories.
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace mmtrack

#endif  // MMTRACK_SERIES_IO_HPP
