// SPDX-License-Identifier: Apache-2.0
//
// stripesim: waveform-level simulator for sub-THz radio stripes
// Copyright (C) 2026 The stripesim authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace stripesim {

// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ----- Configuration family (CLI exit code 2) ------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SchemaError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class GeometryError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedModel : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedMode : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class TouchstoneError : public ConfigError {
public:
    enum class Kind {
        FileNotFound,
        MissingOptionLine,
        BadRowArity,
        NonMonotonicFrequency,
        UnknownFormat,
        EmptyNetwork,
    };

    TouchstoneError(Kind kind, const std::string& what) : ConfigError(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// ----- Runtime family (CLI exit code 3) ------------------------------------

class LengthError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ZeroSignal : public Error {
public:
    using Error::Error;
};

class NoPilots : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

} // namespace stripesim
