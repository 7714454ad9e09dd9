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
#include "unitforge/numkit/autodiff.hpp"
#include "unitforge/rng.hpp"

namespace unitforge {

// Span masking: every frame independently starts a span with probability
// start_prob; a span covers span_len frames, truncated at the sequence end.
struct MaskSpec {
  double start_prob = 0.08;
  std::size_t span_len = 10;

  void validate() const;
};

struct MaskSet {
  std::vector<bool> masked;

  std::size_t size() const noexcept { return masked.size(); }
  std::size_t count() const;
  bool empty_mask() const { return count() == 0; }
};

MaskSet sample_mask(std::size_t num_frames, const MaskSpec& spec, std::uint64_t seed);
MaskSet sample_mask(std::size_t num_frames, const MaskSpec& spec, Rng& rng);

// Cosine-similarity softmax head over C target units:
//   p(c | h_t) = softmax_c( cos(W^T h_t, e_c) / temperature )
struct PredictorHead {
  nk::Var projection;  // model_dim x embed_dim
  nk::Var embeddings;  // num_units x embed_dim
  double temperature = 0.1;

  static PredictorHead init(std::size_t model_dim, std::size_t embed_dim, std::size_t num_units,
                            double temperature, std::uint64_t seed);

  std::size_t model_dim() const { return projection.value().rows(); }
  std::size_t embed_dim() const { return projection.value().cols(); }
  std::size_t num_units() const { return embeddings.value().rows(); }
  std::vector<nk::Var> params() const { return {projection, embeddings}; }
  void validate() const;
};

// T x C log-probabilities as a graph node.
nk::Var unit_log_probs(const nk::Var& hidden, const PredictorHead& head);
// T x C probabilities; rows sum to 1.
nk::Tensor unit_distribution(const FeatureSeq& hidden, const PredictorHead& head);

// -sum_{t in M} log p(z_t | h_t); zero when the mask is empty.
nk::Var masked_nll(const nk::Var& hidden, const FrameLabels& targets, const MaskSet& mask,
                   const PredictorHead& head);
double masked_nll(const FeatureSeq& hidden, const FrameLabels& targets, const MaskSet& mask,
                  const PredictorHead& head);

// Per-frame argmax of unit_distribution; ties go to the lowest unit id.
FrameLabels predict_units(const FeatureSeq& hidden, const PredictorHead& head,
                          std::string utt_id = {});

}  // namespace unitforge
