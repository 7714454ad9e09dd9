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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "unitforge/evalsynth/study.hpp"
#include "unitforge/evalsynth/synth.hpp"
#include "unitforge/uasr.hpp"

// One JSON document drives every CLI command. Stage seeds are not part of
// the document: each stage derives its seed from the run seed.
namespace unitforge {

struct RunConfig {
  std::uint64_t seed = 0;
  std::string preset = "desk";
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path output_dir = "run";
  evalsynth::HmmSynthConfig synth;
  uasr::UasrConfig uasr;
  evalsynth::UnitOptions units;
  PretrainConfig pretrain;
  evalsynth::ProbeOptions probe;
  std::size_t checkpoint_every = 100;  // pretrain updates between checkpoints

  // "desk": small feature-input backbone, a few hundred updates.
  // "paper": the full-size waveform backbone with the published masking,
  // optimizer and schedule values. Kept for inspection; it cannot train on
  // the feature corpus.
  static RunConfig preset_named(const std::string& name);

  bool runnable() const;
  void validate() const;

  // Seeded stage configs.
  evalsynth::HmmSynthConfig synth_config() const;
  uasr::UasrConfig uasr_config() const;
  evalsynth::UnitOptions unit_options() const;
  PretrainConfig pretrain_config() const;
  evalsynth::ProbeOptions probe_options() const;
  std::uint64_t eval_mask_seed() const;
};

// Keys absent from the document keep the preset value ("preset" picks the
// base, default "desk"). Unknown keys are an error. Relative paths resolve
// against `base_dir`.
RunConfig run_config_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);
// Paths are written as given (absolute after loading from a file).
std::string to_json_string(const RunConfig& cfg);

}  // namespace unitforge
