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

#include <array>
#include <filesystem>
#include <ostream>
#include <string>

#include "unitforge/config.hpp"

// File-backed pipeline stages behind the CLI commands. Every stage reads its
// inputs from the corpus/output directories of a RunConfig and writes its
// outputs there. Missing inputs raise PrerequisiteError naming the command
// that produces them.
//
// Output layout:
//   <corpus>/                      synth
//   <out>/uasr/generator/          train-uasr (+ loss_log.json)
//   <out>/units/<type>/            gen-units: units.txt, vocab.txt, model
//   <out>/models/<type>/           pretrain: backbone/, head/, state.json, loss_log.json
//   <out>/eval/<type>.json         eval
//   <out>/report.json, report.txt  report
namespace unitforge::pipeline {

inline constexpr std::array<const char*, 5> kUnitTypes{"mono", "lt", "pt", "pp", "pc"};

// Throws Error for anything outside kUnitTypes.
void check_unit_type(const std::string& type);

struct Layout {
  std::filesystem::path corpus;
  std::filesystem::path out;

  explicit Layout(const RunConfig& cfg) : corpus(cfg.corpus_dir), out(cfg.output_dir) {}

  std::filesystem::path uasr_dir() const { return out / "uasr"; }
  std::filesystem::path generator_dir() const { return uasr_dir() / "generator"; }
  std::filesystem::path units_dir(const std::string& type) const { return out / "units" / type; }
  std::filesystem::path unit_file(const std::string& type) const { return units_dir(type) / "units.txt"; }
  std::filesystem::path vocab_file(const std::string& type) const { return units_dir(type) / "vocab.txt"; }
  std::filesystem::path model_dir(const std::string& type) const { return out / "models" / type; }
  std::filesystem::path eval_file(const std::string& type) const { return out / "eval" / (type + ".json"); }
  std::filesystem::path report_json() const { return out / "report.json"; }
  std::filesystem::path report_text() const { return out / "report.txt"; }
};

void synth(const RunConfig& cfg, std::ostream* log = nullptr);
void train_uasr(const RunConfig& cfg, std::ostream* log = nullptr);
void gen_units(const RunConfig& cfg, const std::string& type, std::ostream* log = nullptr);
// On divergence the last periodic checkpoint stays in place with
// state.json "complete": false, and DivergenceError propagates.
void pretrain(const RunConfig& cfg, const std::string& type, std::ostream* log = nullptr);
void eval(const RunConfig& cfg, const std::string& type, std::ostream* log = nullptr);
// Collects every eval result into one report (one row per unit type, rows
// never evaluated carry an error). Returns the text table.
std::string report(const RunConfig& cfg, std::ostream* log = nullptr);
// Every stage for every unit type, in dependency order.
std::string run_all(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace unitforge::pipeline
