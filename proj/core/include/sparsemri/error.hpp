// Copyright 2026 The sparsemri Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsemri {

/// Base class for every error raised by the library. `code()` is a short
/// machine-readable token used by the CLI's error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Operand sizes or grid shapes do not agree.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

/// A forward map was evaluated outside its domain (log of a non-positive
/// argument, non-positive Z). `index()` identifies the first offending entry.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t index)
      : Error("domain", what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A scalar parameter is out of its admissible range.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

/// A file could not be read or does not have the expected layout.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

/// The input carries no information for the requested quantity
/// (all-zero reference field, all-background proton density).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error("degenerate-input", what) {}
};

[[noreturn]] void throw_dimension(const std::string& context, std::size_t expected,
                                  std::size_t actual);

}  // namespace sparsemri
