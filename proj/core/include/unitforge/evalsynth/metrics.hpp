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
#include <map>
#include <utility>
#include <vector>

#include "unitforge/corpus.hpp"

// Frame-level agreement between a unit labelling and a reference labelling.
// Every function checks that the two corpora are frame-aligned.
namespace unitforge::evalsynth {

struct Contingency {
  std::map<std::pair<int, int>, std::size_t> joint;  // (unit, truth) -> frames
  std::map<int, std::size_t> units;
  std::map<int, std::size_t> truth;
  std::size_t total = 0;
};

Contingency contingency(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);

// sum over units of the modal truth count, over total frames.
double purity(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);
double inverse_purity(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);
// I(U;T) / max(H(U), H(T)); 1 when both sides are constant.
double nmi(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);
double nmi(const Contingency& c);

struct VocabUsage {
  std::size_t used = 0;     // distinct ids that occur
  double perplexity = 0.0;  // exp of the unigram entropy
};
VocabUsage vocab_usage(const std::vector<FrameLabels>& units);

// Greedy one-to-one unit -> truth mapping by descending joint count (ties by
// ids); fraction of frames whose mapped unit equals the truth.
double mapped_accuracy(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);

// Fraction of true boundaries (label changes) at which the units also change.
double boundary_recall(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth);

}  // namespace unitforge::evalsynth
