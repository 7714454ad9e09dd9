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
#include <vector>

#include "unitforge/corpus.hpp"

// Synthetic oracle corpus: phones drawn from a sparse bigram, durations from
// a shifted geometric law, frames from Gaussians whose mean depends on the
// centre phone and on the classes of both neighbours.
namespace unitforge::evalsynth {

struct HmmSynthConfig {
  int num_phones = 40;  // silence included
  int silence_id = 0;
  std::size_t feature_dim = 16;
  int num_classes = 4;  // context classes over the non-silence phones
  double class_sep = 3.0;
  double phone_sep = 2.0;
  double coupling = 1.0;  // 0 turns context effects off
  double noise_sd = 0.5;
  int min_duration = 2;
  double duration_continue = 0.5;  // geometric tail: P(one more frame)
  int max_duration = 8;
  int successors = 8;       // nonzero bigram entries per phone
  double pause_prob = 0.1;  // phone -> silence
  std::size_t num_utterances = 200;
  int min_phones = 10;
  int max_phones = 30;
  bool edge_silence = true;
  std::vector<int> active_phones;  // empty: every non-silence phone
  // Optional num_phones x num_phones override; rows must sum to 1.
  std::vector<std::vector<double>> bigram;
  std::size_t text_utterances = 400;
  double frame_rate = 50.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<int> phones_in_use() const;
  // Context classes + 1 (silence has its own class).
  int class_count() const { return num_classes + 1; }
  int num_states() const { return num_phones * class_count() * class_count(); }
};

struct OracleUtterance {
  std::string id;
  FeatureSeq feats;
  FrameLabels phones;
  FrameLabels states;
};

struct OracleCorpus {
  HmmSynthConfig config;
  std::vector<OracleUtterance> utts;
  std::vector<std::vector<int>> text;  // unpaired, silence-free phone sequences

  std::vector<FeatureSeq> features() const;
  std::vector<FrameLabels> phone_labels() const;
  std::vector<FrameLabels> state_labels() const;
};

// Class of each phone: 0 for silence, 1..num_classes otherwise.
std::vector<int> phone_classes(const HmmSynthConfig& cfg);
int true_state(int left, int center, int right, const std::vector<int>& classes, int class_count);

// The transition matrix the sampler uses (override or generated).
std::vector<std::vector<double>> synth_bigram(const HmmSynthConfig& cfg);
// Left eigenvector of a row-stochastic matrix for eigenvalue 1, by power iteration.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transitions);

OracleCorpus synth_corpus(const HmmSynthConfig& cfg);

// <dir>/manifest.json, feats/<id>.feat, phones.units, states.units, text.txt
void write_corpus(const std::filesystem::path& dir, const OracleCorpus& corpus, const PhonemeInventory& inventory);
OracleCorpus read_corpus(const std::filesystem::path& dir, const PhonemeInventory& inventory);

}  // namespace unitforge::evalsynth
