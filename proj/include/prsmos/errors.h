// include/prsmos/errors.h

// Copyright 2026 The prsmos Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PRSMOS_ERRORS_H_
#define PRSMOS_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prsmos {

// Base class of every error raised by the library. kind() is a stable,
// machine-readable tag that the CLI prints alongside the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  const char *kind() const noexcept override { return "parse"; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string &what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const char *kind() const noexcept override { return "validation"; }
  const std::string &field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "dimension"; }
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "duplicate_id"; }
};

class EmptySplitError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "empty_split"; }
};

// A correlation whose denominator vanishes (constant input, all ties).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "undefined_metric"; }
};

class KinkProximityError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "kink_proximity"; }
};

class StaleTraceError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "stale_trace"; }
};

class ZeroSelectionError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "zero_selection"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "io"; }
};

}  // namespace prsmos

#endif  // PRSMOS_ERRORS_H_
