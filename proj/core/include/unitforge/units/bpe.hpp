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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unitforge/corpus.hpp"

// Alignment-preserving byte-pair merging over deduplicated phone sequences.
namespace unitforge::units {

struct BpeModel {
  int base_size = 40;
  int silence_id = 0;
  // Merge i joins the pair into token base_size + i.
  std::vector<std::pair<int, int>> merges;

  int vocab_size() const { return base_size + static_cast<int>(merges.size()); }
  // Base symbols spelled by a token.
  std::vector<int> spelling(int token) const;
  // Base names joined with "_".
  std::vector<std::string> names(const PhonemeInventory& inventory) const;
  // Applies the merges in order, each as one left-to-right pass.
  std::vector<int> encode(std::span<const int> symbols) const;
  void validate() const;
};

// Adjacent-pair counts are kept per sequence and updated only for the
// sequences a merge touches. Ties go to the smallest (left, right) pair.
// Stops at vocab_target tokens (base included) or when no pair occurs twice.
BpeModel train_bpe(const std::vector<std::vector<int>>& corpora, std::size_t vocab_target = 500,
                   int base_size = 40, int silence_id = 0);

// Replaces every left-to-right, non-overlapping (a, b) with `token`.
std::vector<int> apply_merge(std::span<const int> seq, std::pair<int, int> pair, int token);

FrameLabels label_pp(const FrameLabels& labels, const BpeModel& bpe);

}  // namespace unitforge::units
