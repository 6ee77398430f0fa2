// Copyright 2026 The QLAM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlam {

enum class ErrorKind {
    Config,     ///< invalid sizes, flags, or configuration values
    Index,      ///< qubit or class index out of range
    Shape,      ///< length/dimension mismatch between arrays
    Numeric,    ///< non-finite value encountered
    Validation, ///< input data outside its documented domain
    Parse,      ///< malformed file contents
    Io,         ///< file could not be opened, read, or written
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every error raised by the library carries one category so the CLI can
/// map it to a distinct exit code.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Parse failure at a known byte offset.
class ParseError : public Error {
  public:
    ParseError(std::size_t offset, const std::string &what)
        : Error(ErrorKind::Parse,
                what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

#define QLAM_REQUIRE(cond, kind, msg)                                          \
    do {                                                                       \
        if (!(cond)) {                                                         \
            throw ::qlam::Error((kind), (msg));                                \
        }                                                                      \
    } while (0)

} // namespace qlam
