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
#include <string_view>
#include <vector>

#include "unitforge/numkit/tensor.hpp"

namespace unitforge {

// Ordered phone names; ids are positions. The standard inventory is 39
// ARPAbet phones plus one silence token (40 symbols, silence id 0).
struct PhonemeInventory {
  std::vector<std::string> symbols;
  int silence_id = 0;

  static PhonemeInventory standard();

  int size() const noexcept { return static_cast<int>(symbols.size()); }
  int id_of(std::string_view name) const;
  const std::string& name_of(int id) const;
  // Throws when symbols repeat or silence_id is out of range.
  void validate() const;
};

inline constexpr double kSampleRate = 16000.0;

struct Utterance {
  std::string id;
  std::vector<double> samples;  // at kSampleRate
};

// T x D frames at `frame_rate` Hz.
struct FeatureSeq {
  nk::Tensor frames;
  double frame_rate = 50.0;

  FeatureSeq() = default;
  FeatureSeq(nk::Tensor f, double rate);

  std::size_t num_frames() const { return frames.rows(); }
  std::size_t dim() const { return frames.cols(); }
};

struct FrameLabels {
  std::string utt_id;
  std::vector<int> ids;
  int vocab_size = 0;

  std::size_t size() const noexcept { return ids.size(); }
  // Throws when an id falls outside [0, vocab_size).
  void validate() const;
};

// Deduplicated label sequence: adjacent symbols differ, lengths are positive.
struct RunLengthSeq {
  std::vector<int> symbols;
  std::vector<int> lengths;

  std::size_t size() const noexcept { return symbols.size(); }
  std::size_t total_length() const;
  friend bool operator==(const RunLengthSeq&, const RunLengthSeq&) = default;
};

RunLengthSeq dedup_runs(std::span<const int> ids);
RunLengthSeq dedup_runs(const FrameLabels& labels);

std::vector<int> expand_run_ids(const RunLengthSeq& runs);
// vocab_size <= 0 means "max symbol + 1".
FrameLabels expand_runs(const RunLengthSeq& runs, std::string utt_id = {}, int vocab_size = 0);

// Frame counts must match and every id must be in range; the error message
// carries both lengths.
void validate_alignment(const FrameLabels& labels, const FeatureSeq& feats);

}  // namespace unitforge
