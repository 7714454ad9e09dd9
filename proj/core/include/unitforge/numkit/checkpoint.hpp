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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unitforge/numkit/autodiff.hpp"

namespace unitforge::nk {

// Ordered collection of named trainable tensors. Insertion order is the
// optimizer order and the checkpoint order.
class ParamSet {
 public:
  Var& add(std::string name, Tensor init);
  Var& get(std::string_view name);
  const Var& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::vector<Var>& vars() noexcept { return vars_; }
  const std::vector<Var>& vars() const noexcept { return vars_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t scalar_count() const;

  void zero_grad();
  // Deep copy of the current values, in insertion order.
  std::vector<std::pair<std::string, Tensor>> snapshot() const;
  // Every stored name must be present with a matching shape.
  void load(const std::map<std::string, Tensor>& values);
  void load(const std::vector<std::pair<std::string, Tensor>>& values);

 private:
  std::vector<std::string> names_;
  std::vector<Var> vars_;
};

// Checkpoint layout: <dir>/manifest.json maps tensor name -> {shape, file};
// each file holds the raw little-endian float64 data in row-major order.
void save_tensors(const std::filesystem::path& dir,
                  const std::vector<std::pair<std::string, Tensor>>& tensors);
std::map<std::string, Tensor> load_tensors(const std::filesystem::path& dir);

// Raw little-endian float64 blob helpers (no header).
void write_f64_blob(const std::filesystem::path& file, std::span<const double> data);
std::vector<double> read_f64_blob(const std::filesystem::path& file);

}  // namespace unitforge::nk
