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

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "unitforge/corpus.hpp"

namespace unitforge::units {

struct TriphoneKey {
  int left = 0;
  int center = 0;
  int right = 0;

  friend auto operator<=>(const TriphoneKey&, const TriphoneKey&) = default;
};

// HTK style "l-c+r".
std::string triphone_name(const TriphoneKey& key, const PhonemeInventory& inventory);

// Run i -> (symbol[i-1], symbol[i], symbol[i+1]); silence outside the sequence.
std::vector<TriphoneKey> runs_to_triphones(const RunLengthSeq& runs, int silence_id = 0);

struct LogicalTriphoneVocab {
  int base_size = 40;
  int silence_id = 0;
  std::vector<TriphoneKey> selected;  // rank order; id = base_size + rank

  int size() const { return base_size + static_cast<int>(selected.size()); }
  // -1 when the key was not selected.
  int id_of(const TriphoneKey& key) const;
  std::vector<std::string> names(const PhonemeInventory& inventory) const;
  // Rebuilds the lookup after `selected` changes.
  void reindex();

 private:
  std::map<TriphoneKey, int> index_;
};

// Top `k` triphones by run count over the corpus; ties by key order.
// Silence-centred triphones are never selected.
LogicalTriphoneVocab build_lt_vocab(const std::vector<RunLengthSeq>& corpus, std::size_t k = 500,
                                    int base_size = 40, int silence_id = 0);

FrameLabels label_lt(const FrameLabels& labels, const LogicalTriphoneVocab& vocab);

}  // namespace unitforge::units
