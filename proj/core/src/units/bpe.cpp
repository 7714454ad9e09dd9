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


#include "unitforge/units/bpe.hpp"

#include <map>
#include <set>

#include "unitforge/error.hpp"

namespace unitforge::units {

using Pair = std::pair<int, int>;

std::vector<int> apply_merge(std::span<const int> seq, Pair pair, int token) {
  std::vector<int> out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i + 1 < seq.size() && seq[i] == pair.first && seq[i + 1] == pair.second) {
      out.push_back(token);
      ++i;
    } else {
      out.push_back(seq[i]);
    }
  }
  return out;
}

std::vector<int> BpeModel::spelling(int token) const {
  if (token < 0 || token >= vocab_size()) throw Error("bpe: token " + std::to_string(token) + " out of range");
  if (token < base_size) return {token};
  const Pair& m = merges[static_cast<std::size_t>(token - base_size)];
  std::vector<int> out = spelling(m.first);
  const std::vector<int> right = spelling(m.second);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

std::vector<std::string> BpeModel::names(const PhonemeInventory& inventory) const {
  if (inventory.size() != base_size) throw Error("inventory size does not match the bpe base");
  std::vector<std::string> out = inventory.symbols;
  for (int t = base_size; t < vocab_size(); ++t) {
    std::string name;
    for (int p : spelling(t)) {
      if (!name.empty()) name += "_";
      name += inventory.name_of(p);
    }
    out.push_back(name);
  }
  return out;
}

std::vector<int> BpeModel::encode(std::span<const int> symbols) const {
  std::vector<int> seq(symbols.begin(), symbols.end());
  for (std::size_t i = 0; i < merges.size(); ++i) seq = apply_merge(seq, merges[i], base_size + static_cast<int>(i));
  return seq;
}

void BpeModel::validate() const {
  if (base_size <= 0 || silence_id < 0 || silence_id >= base_size) throw Error("bpe: bad base inventory");
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const int limit = base_size + static_cast<int>(i);
    const auto [a, b] = merges[i];
    if (a < 0 || b < 0 || a >= limit || b >= limit) throw Error("bpe: merge refers to a later token");
    if (a == silence_id || b == silence_id) throw Error("bpe: silence cannot merge");
  }
}

namespace {

using Counts = std::map<Pair, long>;

void count_pairs(const std::vector<int>& seq, int silence_id, long sign, Counts& counts) {
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] == silence_id || seq[i + 1] == silence_id) continue;
    const Pair p{seq[i], seq[i + 1]};
    auto& c = counts[p];
    c += sign;
    if (c == 0) counts.erase(p);
  }
}

}  // namespace

BpeModel train_bpe(const std::vector<std::vector<int>>& corpora, std::size_t vocab_target, int base_size,
                   int silence_id) {
  if (corpora.empty()) throw Error("train_bpe: empty corpora");
  BpeModel model;
  model.base_size = base_size;
  model.silence_id = silence_id;
  std::vector<std::vector<int>> seqs = corpora;
  for (const auto& seq : seqs) {
    for (int s : seq) {
      if (s < 0 || s >= base_size) throw Error("train_bpe: symbol " + std::to_string(s) + " out of range");
    }
  }
  Counts counts;
  std::map<Pair, std::set<std::size_t>> where;  // superset of sequences holding the pair
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    count_pairs(seqs[i], silence_id, 1, counts);
    for (std::size_t j = 0; j + 1 < seqs[i].size(); ++j) where[{seqs[i][j], seqs[i][j + 1]}].insert(i);
  }
  while (static_cast<std::size_t>(model.vocab_size()) < vocab_target) {
    Pair best{};
    long best_count = 0;
    for (const auto& [p, c] : counts) {
      if (c > best_count) {
        best = p;
        best_count = c;
      }
    }
    if (best_count < 2) break;
    const int token = model.vocab_size();
    model.merges.push_back(best);
    const std::set<std::size_t> touched = std::move(where[best]);
    where.erase(best);
    for (std::size_t i : touched) {
      count_pairs(seqs[i], silence_id, -1, counts);
      seqs[i] = apply_merge(seqs[i], best, token);
      count_pairs(seqs[i], silence_id, 1, counts);
      for (std::size_t j = 0; j + 1 < seqs[i].size(); ++j) {
        if (seqs[i][j] == token || seqs[i][j + 1] == token) where[{seqs[i][j], seqs[i][j + 1]}].insert(i);
      }
    }
  }
  return model;
}

FrameLabels label_pp(const FrameLabels& labels, const BpeModel& bpe) {
  FrameLabels out;
  out.utt_id = labels.utt_id;
  out.vocab_size = bpe.vocab_size();
  if (labels.ids.empty()) return out;
  for (int id : labels.ids) {
    if (id < 0 || id >= bpe.base_size) throw Error("label_pp: base label " + std::to_string(id) + " out of range");
  }
  const RunLengthSeq runs = dedup_runs(labels.ids);
  const std::vector<int> pieces = bpe.encode(runs.symbols);
  out.ids.reserve(labels.ids.size());
  std::size_t run = 0;
  for (int piece : pieces) {
    const std::size_t span = bpe.spelling(piece).size();
    for (std::size_t k = 0; k < span; ++k, ++run) {
      out.ids.insert(out.ids.end(), static_cast<std::size_t>(runs.lengths[run]), piece);
    }
  }
  return out;
}

}  // namespace unitforge::units
