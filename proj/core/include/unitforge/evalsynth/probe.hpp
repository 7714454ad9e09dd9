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
#include <vector>

#include "unitforge/corpus.hpp"

namespace unitforge::evalsynth {

struct ProbeOptions {
  double test_fraction = 0.2;
  std::size_t steps = 300;  // full-batch Adam updates
  double lr = 0.05;
  std::uint64_t seed = 0;
  // block probed by score_model; negative means the middle block, same as pc
  int layer = -1;
};

struct ProbeResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t train_frames = 0;
  std::size_t test_frames = 0;
};

// Softmax regression on frozen, train-standardised features; utterances are
// split train/test by a seeded shuffle. Throws on single-class truth.
ProbeResult linear_probe(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& truth,
                         const ProbeOptions& opts = {});

}  // namespace unitforge::evalsynth
