// Copyright 2026 The unitforge Authors.
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

namespace unitforge {

// Base class for every error raised by the library. Subclasses map onto the
// CLI exit codes (see tools/unitforge_main.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable paths and malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage was requested before the stage it depends on.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(const std::string& what, std::string required_command)
      : Error(what), required_command_(std::move(required_command)) {}
  const std::string& required_command() const noexcept { return required_command_; }

 private:
  std::string required_command_;
};

// NaN/Inf appeared in a loss or parameter during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace unitforge
