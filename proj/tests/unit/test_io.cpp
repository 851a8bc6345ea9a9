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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmtrack/capture_io.hpp"
#include "mmtrack/errors.hpp"
#include "mmtrack/series_io.hpp"

namespace mmtrack {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mmtrack_io_" + name);
    fs::remove_all(dir);
    return dir;
}

BasebandCapture small_capture() {
    RadioConfig cfg;
    cfg.sample_period_s = 1e-3;
    cfg.detection_interval_s = 0.01;
    cfg.snr_db = {10.0, 10.0, 10.0};
    cfg.cfo = {12.0, 0.01};
    return synthesize_capture([](double) { return std::array<double, 3>{1.0, 2.0, 3.0}; }, cfg, 0.05);
}

TEST(CaptureIo, RoundTripIsFloat32Exact) {
    const BasebandCapture capture = small_capture();
    const fs::path dir = scratch("roundtrip");
    write_capture(capture, dir);
    const BasebandCapture back = read_capture(dir);
    EXPECT_EQ(back.length(), capture.length());
    EXPECT_EQ(back.samples_per_interval, capture.samples_per_interval);
    EXPECT_EQ(back.sample_period_s, capture.sample_period_s);
    EXPECT_EQ(back.carrier_hz, capture.carrier_hz);
    EXPECT_EQ(back.seed, capture.seed);
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t n = 0; n < capture.length(); ++n) {
            const Sample& a = capture.streams[p][n];
            const Sample expected(static_cast<float>(a.real()), static_cast<float>(a.imag()));
            EXPECT_EQ(back.streams[p][n].real(), expected.real()) << p << " " << n;
            EXPECT_EQ(back.streams[p][n].imag(), expected.imag()) << p << " " << n;
        }
    }
    EXPECT_EQ(fs::file_size(dir / "capture_path1.cf32"), capture.length() * 8);
}

TEST(CaptureIo, LittleEndianLayout) {
    BasebandCapture capture;
    capture.sample_period_s = 1.0;
    capture.samples_per_interval = 1;
    for (auto& s : capture.streams) {
        s = {Sample(1.0, -2.0)};
    }
    const fs::path dir = scratch("layout");
    write_capture(capture, dir);
    std::ifstream in(dir / "capture_path2.cf32", std::ios::binary);
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    const unsigned char expected[8] = {0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
    for (int i = 0; i < 8; ++i) {
        EXPECT_EQ(bytes[i], expected[i]) << i;
    }
}

TEST(CaptureIo, StreamedWriterMatchesBulkWriter) {
    const BasebandCapture capture = small_capture();
    const fs::path dir = scratch("stream");
    CaptureSidecar sidecar;
    sidecar.sample_period_s = capture.sample_period_s;
    sidecar.carrier_hz = capture.carrier_hz;
    sidecar.samples_per_interval = capture.samples_per_interval;
    CaptureWriter writer(dir, sidecar);
    for (std::size_t start = 0; start < capture.length(); start += 7) {
        const std::size_t len = std::min<std::size_t>(7, capture.length() - start);
        writer.write({std::span<const Sample>(capture.streams[0]).subspan(start, len),
                      std::span<const Sample>(capture.streams[1]).subspan(start, len),
                      std::span<const Sample>(capture.streams[2]).subspan(start, len)});
    }
    writer.close();
    EXPECT_EQ(read_sidecar(dir).stream_length, capture.length());

    CaptureReader reader(dir);
    std::array<std::vector<Sample>, 3> buf;
    for (auto& b : buf) {
        b.resize(9);
    }
    std::size_t total = 0;
    for (;;) {
        const std::size_t got = reader.read({buf[0], buf[1], buf[2]});
        if (got == 0) {
            break;
        }
        for (std::size_t n = 0; n < got; ++n) {
            EXPECT_NEAR(std::abs(buf[2][n] - capture.streams[2][total + n]), 0.0, 1e-5);
        }
        total += got;
    }
    EXPECT_EQ(total, capture.length());
}

TEST(CaptureIo, MetadataOnlyCaptureCannotBeRead) {
    const fs::path dir = scratch("meta");
    CaptureSidecar sidecar;
    sidecar.sample_period_s = 1e-3;
    sidecar.samples_stored = false;
    write_sidecar(dir, sidecar);
    EXPECT_FALSE(read_sidecar(dir).samples_stored);
    EXPECT_THROW(CaptureReader{dir}, Error);
}

TEST(CaptureIo, MissingOrTruncatedFilesRejected) {
    EXPECT_THROW(read_sidecar(scratch("missing")), Error);
    const fs::path dir = scratch("truncated");
    write_capture(small_capture(), dir);
    fs::resize_file(dir / "capture_path3.cf32", 16);
    EXPECT_THROW(read_capture(dir), Error);
}

DetectionSeries sample_series() {
    DetectionSeries s;
    s.detection_interval_s = 0.05;
    for (std::size_t k = 0; k < 6; ++k) {
        DetectionRecord r;
        r.k = k;
        r.t_s = 0.05 * static_cast<double>(k);
        r.mddoa_hz = {12.345678 - static_cast<double>(k), -0.1 * static_cast<double>(k)};
        r.valid = {true, true};
        r.aoa_rad = 0.7853981633974483 + 1e-3 * static_cast<double>(k);
        s.records.push_back(r);
    }
    s.records[2].mddoa_hz[0].reset();
    s.records[2].valid[0] = false;
    s.records[4].valid[1] = false;
    return s;
}

TEST(DetectionCsv, RoundTrip) {
    const DetectionSeries s = sample_series();
    std::stringstream ss;
    write_detection_csv(ss, s);
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "k,t_s,f_d2_hz,f_d3_hz,valid2,valid3,aoa_rad");
    const DetectionSeries back = read_detection_csv(ss);
    EXPECT_DOUBLE_EQ(back.detection_interval_s, 0.05);
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_EQ(back.records[k].k, s.records[k].k);
        EXPECT_EQ(back.records[k].t_s, s.records[k].t_s);
        EXPECT_EQ(back.records[k].mddoa_hz, s.records[k].mddoa_hz);
        EXPECT_EQ(back.records[k].valid, s.records[k].valid);
        EXPECT_EQ(back.records[k].aoa_rad, s.records[k].aoa_rad);
    }
}

TEST(DetectionCsv, RejectsMalformedInput) {
    std::istringstream bad_header("k,t,f2\n0,0,1\n");
    EXPECT_THROW(read_detection_csv(bad_header), Error);
    std::istringstream gap("k,t_s,f_d2_hz,f_d3_hz,valid2,valid3,aoa_rad\n0,0,1,1,1,1,0\n2,0.1,1,1,1,1,0\n");
    EXPECT_THROW(read_detection_csv(gap), Error);
    std::istringstream text("k,t_s,f_d2_hz,f_d3_hz,valid2,valid3,aoa_rad\n0,0,x,1,1,1,0\n1,0.05,1,1,1,1,0\n");
    EXPECT_THROW(read_detection_csv(text), Error);
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(2.0), "2");
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(TrackCsv, ShiftsIntoScenarioFrame) {
    TrackEstimate est;
    est.p0_hat = {1.0, 2.0};
    TrackEntry e;
    e.k = 0;
    e.t_s = 0.0;
    e.p_hat = {1.0, 2.1};
    e.diagnostics.iterations = 3;
    e.diagnostics.converged = true;
    est.entries.push_back(e);
    std::ostringstream out;
    write_track_csv(out, est, Trajectory::stationary({1.0, 2.0}, 1.0), {10.0, 20.0});
    const std::string text = out.str();
    EXPECT_NE(text.find("k,t_s,x_hat_m,y_hat_m,x_true_m,y_true_m,err_m,iterations,converged"), std::string::npos);
    EXPECT_NE(text.find("0,0,11,22.1,11,22,"), std::string::npos);
    EXPECT_NE(text.find(",3,1"), std::string::npos);
}

TEST(SpectrogramCsv, InBandColumnsOnly) {
    const fs::path file = scratch("spectrogram") / "s.csv";
    DetectorConfig cfg;
    cfg.max_abs_mddoa_hz = 10.0;
    SpectrogramWriter writer(file, cfg, 0.05);
    CafSpectrum s;
    s.magnitude = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    s.bin_width_hz = 5.0;
    s.grid_start_hz = -20.0;
    writer.add(s);
    s.k = 1;
    writer.add(s);
    writer.close();
    std::ifstream in(file);
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "k,t_s,-10,-5,0,5,10");
    EXPECT_EQ(row, "0,0,3,4,5,6,7");
    std::getline(in, row);
    EXPECT_EQ(row, "1,0.05,3,4,5,6,7");
}

}  // namespace
}  // namespace mmtrack
