/*
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OTAFL_ERRORS_HPP_
#define OTAFL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace otafl {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar argument is outside its mathematical domain (alpha > 2, C <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Shapes disagree: dimension mismatch, empty vector, wrong number of gains.
class StructureError : public Error {
 public:
  using Error::Error;
};

// A theorem precondition does not hold (C <= sqrt(2) G, eta >= 2 / L, ...).
// `condition()` names the violated inequality.
class RegimeError : public Error {
 public:
  RegimeError(std::string condition, const std::string& detail)
      : Error("regime violation [" + condition + "]: " + detail),
        condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

// Malformed input file. Line/column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::string column = {})
      : Error(message), line_(line), column_(std::move(column)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Missing or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace otafl

#endif  // OTAFL_ERRORS_HPP_
