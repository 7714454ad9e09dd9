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

#include "unitforge/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "unitforge/error.hpp"

namespace unitforge {

PhonemeInventory PhonemeInventory::standard() {
  PhonemeInventory inv;
  inv.symbols = {"sil", "aa", "ae", "ah", "ao", "aw", "ay", "b",  "ch", "d",
                 "dh",  "eh", "er", "ey", "f",  "g",  "hh", "ih", "iy", "jh",
                 "k",   "l",  "m",  "n",  "ng", "ow", "oy", "p",  "r",  "s",
                 "sh",  "t",  "th", "uh", "uw", "v",  "w",  "y",  "z",  "zh"};
  inv.silence_id = 0;
  return inv;
}

int PhonemeInventory::id_of(std::string_view name) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == name) return static_cast<int>(i);
  throw Error("unknown phone: " + std::string(name));
}

const std::string& PhonemeInventory::name_of(int id) const {
  if (id < 0 || id >= size()) throw Error("phone id out of range: " + std::to_string(id));
  return symbols[static_cast<std::size_t>(id)];
}

void PhonemeInventory::validate() const {
  if (symbols.empty()) throw Error("empty phoneme inventory");
  std::set<std::string> seen(symbols.begin(), symbols.end());
  if (seen.size() != symbols.size()) throw Error("phoneme inventory has duplicate symbols");
  if (silence_id < 0 || silence_id >= size()) throw Error("silence id out of range");
}

FeatureSeq::FeatureSeq(nk::Tensor f, double rate) : frames(std::move(f)), frame_rate(rate) {
  if (frames.rank() != 2 || frames.rows() == 0 || frames.cols() == 0) {
    throw Error("feature sequence must be a non-empty T x D matrix, got " + frames.shape_str());
  }
  if (!frames.all_finite()) throw Error("feature sequence has non-finite values");
}

void FrameLabels::validate() const {
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= vocab_size) {
      throw Error("utterance " + utt_id + ": label " + std::to_string(ids[t]) + " at frame " +
                  std::to_string(t) + " outside vocabulary of size " + std::to_string(vocab_size));
    }
  }
}

std::size_t RunLengthSeq::total_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), std::size_t{0},
                         [](std::size_t a, int b) { return a + static_cast<std::size_t>(b); });
}

RunLengthSeq dedup_runs(std::span<const int> ids) {
  if (ids.empty()) throw Error("empty label sequence");
  RunLengthSeq runs;
  for (int id : ids) {
    if (!runs.symbols.empty() && runs.symbols.back() == id) {
      ++runs.lengths.back();
    } else {
      runs.symbols.push_back(id);
      runs.lengths.push_back(1);
    }
  }
  return runs;
}

RunLengthSeq dedup_runs(const FrameLabels& labels) { return dedup_runs(labels.ids); }

std::vector<int> expand_run_ids(const RunLengthSeq& runs) {
  if (runs.symbols.size() != runs.lengths.size()) {
    throw Error("run-length sequence: symbols and lengths differ in size");
  }
  std::vector<int> ids;
  for (std::size_t i = 0; i < runs.symbols.size(); ++i) {
    if (runs.lengths[i] <= 0) {
      throw Error("run-length sequence: non-positive length at run " + std::to_string(i));
    }
    if (i > 0 && runs.symbols[i] == runs.symbols[i - 1]) {
      throw Error("run-length sequence: adjacent runs share symbol " +
                  std::to_string(runs.symbols[i]));
    }
    ids.insert(ids.end(), static_cast<std::size_t>(runs.lengths[i]), runs.symbols[i]);
  }
  return ids;
}

FrameLabels expand_runs(const RunLengthSeq& runs, std::string utt_id, int vocab_size) {
  FrameLabels out;
  out.utt_id = std::move(utt_id);
  out.ids = expand_run_ids(runs);
  if (vocab_size <= 0) {
    vocab_size = out.ids.empty() ? 0 : *std::max_element(out.ids.begin(), out.ids.end()) + 1;
  }
  out.vocab_size = vocab_size;
  return out;
}

void validate_alignment(const FrameLabels& labels, const FeatureSeq& feats) {
  const std::size_t frames = feats.frames.rank() == 2 ? feats.frames.rows() : 0;
  if (labels.ids.size() != frames) {
    throw Error("utterance " + labels.utt_id + ": " + std::to_string(labels.ids.size()) +
                " labels vs " + std::to_string(frames) + " feature frames");
  }
  labels.validate();
}

}  // namespace unitforge
