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

#ifndef MMTRACK_ERRORS_HPP
#define MMTRACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmtrack {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidWallError : public Error {
public:
    using Error::Error;
};

// Point coincides with the BS, a virtual BS, or the origin where a bearing is undefined.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

class DurationMismatchError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// Configuration problem; `field()` holds the dotted path of the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Pipeline failure tagged with the stage that raised it.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& message)
        : Error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace mmtrack

#endif  // MMTRACK_ERRORS_HPP
