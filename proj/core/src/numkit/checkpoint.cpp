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

#include "unitforge/numkit/checkpoint.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

#include "unitforge/error.hpp"

namespace unitforge::nk {

static_assert(std::endian::native == std::endian::little,
              "blob formats assume a little-endian host");

Var& ParamSet::add(std::string name, Tensor init) {
  if (contains(name)) throw Error("duplicate parameter name: " + name);
  names_.push_back(std::move(name));
  vars_.push_back(parameter(std::move(init)));
  return vars_.back();
}

Var& ParamSet::get(std::string_view name) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return vars_[i];
  throw Error("unknown parameter: " + std::string(name));
}

const Var& ParamSet::get(std::string_view name) const {
  return const_cast<ParamSet*>(this)->get(name);
}

bool ParamSet::contains(std::string_view name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const Var& v : vars_) n += v.value().size();
  return n;
}

void ParamSet::zero_grad() {
  for (Var& v : vars_) v.zero_grad();
}

std::vector<std::pair<std::string, Tensor>> ParamSet::snapshot() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) out.emplace_back(names_[i], vars_[i].value());
  return out;
}

void ParamSet::load(const std::map<std::string, Tensor>& values) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto it = values.find(names_[i]);
    if (it == values.end()) throw IoError("checkpoint is missing tensor " + names_[i]);
    if (!it->second.same_shape(vars_[i].value())) {
      throw IoError("checkpoint tensor " + names_[i] + " has shape " + it->second.shape_str() +
                    ", expected " + vars_[i].value().shape_str());
    }
    vars_[i].mutable_value() = it->second;
  }
}

void ParamSet::load(const std::vector<std::pair<std::string, Tensor>>& values) {
  load(std::map<std::string, Tensor>(values.begin(), values.end()));
}

void write_f64_blob(const std::filesystem::path& file, std::span<const double> data) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + file.string());
}

std::vector<double> read_f64_blob(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (bytes % sizeof(double) != 0) throw IoError("truncated float64 blob: " + file.string());
  std::vector<double> data(bytes / sizeof(double));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("read failed: " + file.string());
  return data;
}

void save_tensors(const std::filesystem::path& dir,
                  const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  nlohmann::json manifest;
  manifest["format"] = "unitforge-tensors/1";
  manifest["tensors"] = nlohmann::json::object();
  for (const auto& [name, t] : tensors) {
    const std::string file = name + ".f64";
    write_f64_blob(dir / file, t.data());
    manifest["tensors"][name] = {{"shape", t.shape()}, {"file", file}};
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

std::map<std::string, Tensor> load_tensors(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("missing tensor manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed tensor manifest in " + dir.string() + ": " + e.what());
  }
  std::map<std::string, Tensor> out;
  for (const auto& [name, entry] : manifest.at("tensors").items()) {
    Shape shape = entry.at("shape").get<Shape>();
    std::vector<double> data = read_f64_blob(dir / entry.at("file").get<std::string>());
    if (data.size() != shape_size(shape)) throw IoError("tensor " + name + " size mismatch");
    out.emplace(name, Tensor(std::move(shape), std::move(data)));
  }
  return out;
}

}  // namespace unitforge::nk
