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

#include "unitforge/objective.hpp"

#include <algorithm>
#include <cmath>

#include "unitforge/error.hpp"
#include "unitforge/numkit/ops.hpp"

namespace unitforge {

void MaskSpec::validate() const {
  if (!(start_prob >= 0.0 && start_prob <= 1.0)) throw Error("mask start_prob must be in [0, 1]");
  if (span_len < 1) throw Error("mask span_len must be at least 1");
}

std::size_t MaskSet::count() const {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), true));
}

MaskSet sample_mask(std::size_t num_frames, const MaskSpec& spec, Rng& rng) {
  spec.validate();
  if (num_frames == 0) throw Error("sample_mask: sequence must have at least one frame");
  MaskSet m;
  m.masked.assign(num_frames, false);
  for (std::size_t i = 0; i < num_frames; ++i) {
    if (!rng.bernoulli(spec.start_prob)) continue;
    const std::size_t end = std::min(num_frames, i + spec.span_len);
    for (std::size_t t = i; t < end; ++t) m.masked[t] = true;
  }
  return m;
}

MaskSet sample_mask(std::size_t num_frames, const MaskSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return sample_mask(num_frames, spec, rng);
}

PredictorHead PredictorHead::init(std::size_t model_dim, std::size_t embed_dim,
                                  std::size_t num_units, double temperature, std::uint64_t seed) {
  if (num_units == 0 || model_dim == 0 || embed_dim == 0) {
    throw Error("predictor head dimensions must be positive");
  }
  Rng rng(seed);
  nk::Tensor w = nk::Tensor::matrix(model_dim, embed_dim);
  const double ws = 1.0 / std::sqrt(static_cast<double>(model_dim));
  for (double& v : w.data()) v = rng.normal(0.0, ws);
  nk::Tensor e = nk::Tensor::matrix(num_units, embed_dim);
  for (double& v : e.data()) v = rng.normal(0.0, 1.0);
  PredictorHead head{nk::parameter(std::move(w)), nk::parameter(std::move(e)), temperature};
  head.validate();
  return head;
}

void PredictorHead::validate() const {
  if (!(temperature > 0.0)) throw Error("predictor head temperature must be positive");
  if (projection.value().rank() != 2 || embeddings.value().rank() != 2 ||
      projection.value().cols() != embeddings.value().cols()) {
    throw Error("predictor head: projection " + projection.value().shape_str() +
                " and embeddings " + embeddings.value().shape_str() + " disagree");
  }
}

nk::Var unit_log_probs(const nk::Var& hidden, const PredictorHead& head) {
  head.validate();
  if (hidden.value().rank() != 2 || hidden.value().cols() != head.model_dim()) {
    throw Error("predictor head expects " + std::to_string(head.model_dim()) +
                "-dim hidden states, got " + hidden.value().shape_str());
  }
  const nk::Var proj = nk::l2_normalize_rows(nk::matmul(hidden, head.projection));
  const nk::Var codes = nk::l2_normalize_rows(head.embeddings);
  return nk::log_softmax_rows(nk::matmul_nt(proj, codes), head.temperature);
}

nk::Tensor unit_distribution(const FeatureSeq& hidden, const PredictorHead& head) {
  nk::Tensor lp = unit_log_probs(nk::constant(hidden.frames), head).value();
  for (double& v : lp.data()) v = std::exp(v);
  return lp;
}

nk::Var masked_nll(const nk::Var& hidden, const FrameLabels& targets, const MaskSet& mask,
                   const PredictorHead& head) {
  const std::size_t frames = hidden.value().rows();
  if (targets.ids.size() != frames || mask.size() != frames) {
    throw Error("masked_nll: " + std::to_string(frames) + " frames, " +
                std::to_string(targets.ids.size()) + " targets, " + std::to_string(mask.size()) +
                " mask entries");
  }
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t t = 0; t < frames; ++t) {
    if (!mask.masked[t]) continue;
    const int z = targets.ids[t];
    if (z < 0 || static_cast<std::size_t>(z) >= head.num_units()) {
      throw Error("masked_nll: label " + std::to_string(z) + " out of range for " +
                  std::to_string(head.num_units()) + " units");
    }
    picks.emplace_back(t, static_cast<std::size_t>(z));
  }
  if (picks.empty()) return nk::constant(nk::Tensor::scalar(0.0));
  return nk::scale(nk::sum(nk::pick(unit_log_probs(hidden, head), picks)), -1.0);
}

double masked_nll(const FeatureSeq& hidden, const FrameLabels& targets, const MaskSet& mask,
                  const PredictorHead& head) {
  return masked_nll(nk::constant(hidden.frames), targets, mask, head).value().item();
}

FrameLabels predict_units(const FeatureSeq& hidden, const PredictorHead& head, std::string utt_id) {
  const nk::Tensor lp = unit_log_probs(nk::constant(hidden.frames), head).value();
  FrameLabels out;
  out.utt_id = std::move(utt_id);
  out.vocab_size = static_cast<int>(head.num_units());
  out.ids.reserve(lp.rows());
  for (std::size_t t = 0; t < lp.rows(); ++t) {
    auto row = lp.row(t);
    // max_element returns the first maximum.
    out.ids.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return out;
}

}  // namespace unitforge
