/*
 * Copyright 2026 The MVICAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvicad {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two operands disagree. `axis()` names the offending axis.
class DimensionError : public Error {
 public:
  DimensionError(std::string axis, std::size_t expected, std::size_t actual)
      : Error("dimension mismatch on " + axis + ": expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        axis_(std::move(axis)) {}

  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be invertible is (numerically) singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t view)
      : Error(what + " (view " + std::to_string(view) + ")"), view_(view) {}

  std::size_t view() const noexcept { return view_; }

 private:
  std::size_t view_;
};

/// Failures while reading or writing datasets and reports.
class DataError : public Error {
 public:
  enum class Kind { io, missing_file, size_mismatch, non_finite, validation };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace mvicad
