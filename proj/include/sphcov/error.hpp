// SPDX-License-Identifier: Apache-2.0
//
// sphcov - spherical coverage evaluation for millimeter-wave UE antenna designs
// Copyright (C) 2026 The sphcov authors
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

namespace sphcov
{

/// Invalid parameters or configuration (bad grid step, unknown design name, ...).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string &msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

    /// Same error with `context` (e.g. a file name) prepended to the message.
    ParseError with_context(const std::string &context) const { return ParseError(context + ": " + what(), line_, 0); }

private:
    ParseError(const std::string &full, std::size_t line, int) : std::runtime_error(full), line_(line) {}

    std::size_t line_;
};

} // namespace sphcov
