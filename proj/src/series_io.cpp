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

#include "mmtrack/series_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "mmtrack/errors.hpp"

namespace mmtrack {

namespace {

constexpr const char* kDetectionHeader = "k,t_s,f_d2_hz,f_d3_hz,valid2,valid3,aoa_rad";

std::ofstream open_output(const std::filesystem::path& file) {
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + file.string());
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_number(const std::string& text, std::size_t line) {
    if (text == "nan" || text == "NaN") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        throw Error(fmt::format("detection CSV line {}: bad number '{}'", line, text));
    }
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    return fmt::format("{}", v);
}

void write_detection_csv(std::ostream& out, const DetectionSeries& series) {
    out << kDetectionHeader << '\n';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const DetectionRecord& r : series.records) {
        out << r.k << ',' << format_number(r.t_s) << ',' << format_number(r.mddoa_hz[0].value_or(nan)) << ','
            << format_number(r.mddoa_hz[1].value_or(nan)) << ',' << (r.valid[0] ? 1 : 0) << ','
            << (r.valid[1] ? 1 : 0) << ',' << format_number(r.aoa_rad) << '\n';
    }
}

void write_detection_csv(const std::filesystem::path& file, const DetectionSeries& series) {
    std::ofstream out = open_output(file);
    write_detection_csv(out, series);
}

DetectionSeries read_detection_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kDetectionHeader) {
        throw Error(std::string("detection CSV must start with the header ") + kDetectionHeader);
    }
    DetectionSeries series;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 7) {
            throw Error(fmt::format("detection CSV line {}: expected 7 fields, got {}", lineno, f.size()));
        }
        DetectionRecord r;
        const double k = parse_number(f[0], lineno);
        if (!(k >= 0.0) || k != std::floor(k)) {
            throw Error(fmt::format("detection CSV line {}: bad index '{}'", lineno, f[0]));
        }
        r.k = static_cast<std::size_t>(k);
        r.t_s = parse_number(f[1], lineno);
        for (std::size_t i = 0; i < 2; ++i) {
            const double v = parse_number(f[2 + i], lineno);
            if (!std::isnan(v)) {
                r.mddoa_hz[i] = v;
            }
            r.valid[i] = parse_number(f[4 + i], lineno) != 0.0;
        }
        r.aoa_rad = parse_number(f[6], lineno);
        if (r.k != series.records.size()) {
            throw Error(fmt::format("detection CSV line {}: instants must be consecutive from 0", lineno));
        }
        if (series.detection_interval_s == 0.0 && r.k > 0) {
            series.detection_interval_s = r.t_s / static_cast<double>(r.k);
        }
        series.records.push_back(r);
    }
    return series;
}

DetectionSeries read_detection_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error("cannot read " + file.string());
    }
    return read_detection_csv(in);
}

void write_track_csv(std::ostream& out, const TrackEstimate& est, const Trajectory& truth, Point2 origin) {
    out << "k,t_s,x_hat_m,y_hat_m,x_true_m,y_true_m,err_m,iterations,converged\n";
    const std::vector<double> errors = position_errors(est, truth);
    for (std::size_t n = 0; n < est.entries.size(); ++n) {
        const TrackEntry& e = est.entries[n];
        const Point2 hat = e.p_hat + origin;
        const Point2 tru = truth.position(std::min(e.t_s, truth.duration())) + origin;
        out << e.k << ',' << format_number(e.t_s) << ',' << format_number(hat.x) << ',' << format_number(hat.y)
            << ',' << format_number(tru.x) << ',' << format_number(tru.y) << ',' << format_number(errors[n])
            << ',' << e.diagnostics.iterations << ',' << (e.diagnostics.converged ? 1 : 0) << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const ErrorCdf& cdf) {
    out << "rank,err_m,cdf\n";
    const double n = static_cast<double>(cdf.sorted_errors_m.size());
    for (std::size_t i = 0; i < cdf.sorted_errors_m.size(); ++i) {
        out << (i + 1) << ',' << format_number(cdf.sorted_errors_m[i]) << ','
            << format_number(static_cast<double>(i + 1) / n) << '\n';
    }
}

void write_quantile_csv(std::ostream& out, const ErrorCdf& cdf) {
    out << "p,err_m\n";
    for (const QuantileRow& q : cdf.quantiles) {
        out << format_number(q.p) << ',' << format_number(q.err_m) << '\n';
    }
}

SpectrogramWriter::SpectrogramWriter(const std::filesystem::path& file, const DetectorConfig& cfg,
                                     double detection_interval_s)
    : file_(file), out_(open_output(file)), cfg_(cfg), detection_interval_s_(detection_interval_s) {}

void SpectrogramWriter::add(const CafSpectrum& spectrum) {
    if (!header_written_) {
        out_ << "k,t_s";
        for (std::size_t j = 0; j < spectrum.size(); ++j) {
            const double f = spectrum.frequency(j);
            if (cfg_.max_abs_mddoa_hz <= 0.0 || std::abs(f) <= cfg_.max_abs_mddoa_hz) {
                columns_.push_back(j);
                out_ << ',' << format_number(f);
            }
        }
        out_ << '\n';
        header_written_ = true;
    }
    out_ << spectrum.k << ',' << format_number(static_cast<double>(spectrum.k) * detection_interval_s_);
    for (std::size_t j : columns_) {
        out_ << ',' << format_number(spectrum.magnitude.at(j));
    }
    out_ << '\n';
}

void SpectrogramWriter::close() {
    out_.close();
    if (!out_) {
        throw Error("write failed for " + file_.string());
    }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out = open_output(file);
    out << text;
    if (!out) {
        throw Error("write failed for " + file.string());
    }
}

}  // namespace mmtrack
