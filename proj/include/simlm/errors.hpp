// errors.hpp
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
//
// Copyright 2026 The simlm Authors.
//
// \file
// Exception hierarchy shared by every simlm component.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simlm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input line. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid parameters or an experiment setup that cannot run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unknown word id or surface form.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Conditional P(.|w1) queried for a word with c(w1) = 0.
class UndefinedConditionalError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a measure or weight.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Empty neighbourhood or all-zero weights.
class DegenerateProfileError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace simlm
