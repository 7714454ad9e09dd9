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


#include "unitforge/units/triphone.hpp"

#include <algorithm>

#include "unitforge/error.hpp"

namespace unitforge::units {

std::string triphone_name(const TriphoneKey& key, const PhonemeInventory& inventory) {
  return inventory.name_of(key.left) + "-" + inventory.name_of(key.center) + "+" + inventory.name_of(key.right);
}

std::vector<TriphoneKey> runs_to_triphones(const RunLengthSeq& runs, int silence_id) {
  const std::size_t n = runs.symbols.size();
  std::vector<TriphoneKey> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].left = i == 0 ? silence_id : runs.symbols[i - 1];
    out[i].center = runs.symbols[i];
    out[i].right = i + 1 == n ? silence_id : runs.symbols[i + 1];
  }
  return out;
}

int LogicalTriphoneVocab::id_of(const TriphoneKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> LogicalTriphoneVocab::names(const PhonemeInventory& inventory) const {
  if (inventory.size() != base_size) throw Error("inventory size does not match the vocabulary base");
  std::vector<std::string> out = inventory.symbols;
  for (const auto& key : selected) out.push_back(triphone_name(key, inventory));
  return out;
}

void LogicalTriphoneVocab::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (!index_.emplace(selected[i], base_size + static_cast<int>(i)).second) {
      throw Error("logical triphone vocabulary has a duplicate key");
    }
  }
}

LogicalTriphoneVocab build_lt_vocab(const std::vector<RunLengthSeq>& corpus, std::size_t k, int base_size,
                                    int silence_id) {
  std::map<TriphoneKey, std::size_t> counts;
  for (const auto& runs : corpus) {
    for (const auto& key : runs_to_triphones(runs, silence_id)) {
      if (key.center == silence_id) continue;
      ++counts[key];
    }
  }
  std::vector<std::pair<TriphoneKey, std::size_t>> ranked(counts.begin(), counts.end());
  // Stable on the map's key order, so equal counts stay lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  LogicalTriphoneVocab vocab;
  vocab.base_size = base_size;
  vocab.silence_id = silence_id;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) vocab.selected.push_back(ranked[i].first);
  vocab.reindex();
  return vocab;
}

FrameLabels label_lt(const FrameLabels& labels, const LogicalTriphoneVocab& vocab) {
  for (int id : labels.ids) {
    if (id < 0 || id >= vocab.base_size) {
      throw Error("label_lt: base label " + std::to_string(id) + " outside the " + std::to_string(vocab.base_size) +
                  "-phone inventory");
    }
  }
  FrameLabels out;
  out.utt_id = labels.utt_id;
  out.vocab_size = vocab.size();
  if (labels.ids.empty()) return out;
  const RunLengthSeq runs = dedup_runs(labels.ids);
  const auto keys = runs_to_triphones(runs, vocab.silence_id);
  out.ids.reserve(labels.ids.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    int id = keys[i].center;
    if (keys[i].center != vocab.silence_id) {
      const int tri = vocab.id_of(keys[i]);
      if (tri >= 0) id = tri;
    }
    out.ids.insert(out.ids.end(), static_cast<std::size_t>(runs.lengths[i]), id);
  }
  return out;
}

}  // namespace unitforge::units
