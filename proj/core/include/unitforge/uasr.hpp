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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "unitforge/corpus.hpp"
#include "unitforge/numkit/checkpoint.hpp"
#include "unitforge/numkit/optim.hpp"
#include "unitforge/rng.hpp"
#include "unitforge/units/kmeans.hpp"

// Adversarial unsupervised phoneme labeler: a convolutional generator maps
// feature frames to phone posteriors, a convolutional discriminator tells
// generator output from (silence-padded) unpaired phone text.
namespace unitforge::uasr {

struct GeneratorConfig {
  std::size_t input_dim = 16;
  std::size_t hidden_dim = 64;
  std::size_t kernel = 3;
  std::size_t train_stride = 3;
  std::size_t num_classes = 40;
  std::size_t aux_classes = 32;  // k-means ids predicted from the hidden layer
  double leaky_slope = 0.1;

  void validate() const;
};

struct GeneratorOutput {
  nk::Var logits;      // T' x num_classes
  nk::Var hidden;      // T' x hidden_dim, after the nonlinearity
  nk::Var aux_logits;  // T' x aux_classes
  std::size_t stride = 1;
};

class Generator {
 public:
  Generator(GeneratorConfig cfg, std::uint64_t seed);

  const GeneratorConfig& config() const noexcept { return cfg_; }
  nk::ParamSet& params() noexcept { return params_; }
  const nk::ParamSet& params() const noexcept { return params_; }

  GeneratorOutput forward(const nk::Var& feats, std::size_t stride) const;

  void save(const std::filesystem::path& dir) const;
  static Generator load(const std::filesystem::path& dir);

 private:
  GeneratorConfig cfg_;
  nk::ParamSet params_;
};

// Logits with the training stride unless overridden. Throws when the
// sequence is shorter than the kernel.
nk::Tensor generator_forward(const FeatureSeq& feats, const Generator& g,
                             std::optional<std::size_t> stride_override = std::nullopt);

struct DiscriminatorConfig {
  std::size_t num_classes = 40;
  std::size_t hidden_dim = 32;
  std::size_t kernel = 3;  // odd; layers keep the length via zero padding
  std::size_t num_layers = 3;
  double leaky_slope = 0.1;

  void validate() const;
};

class Discriminator {
 public:
  Discriminator(DiscriminatorConfig cfg, std::uint64_t seed);

  const DiscriminatorConfig& config() const noexcept { return cfg_; }
  nk::ParamSet& params() noexcept { return params_; }
  const nk::ParamSet& params() const noexcept { return params_; }

  // x: T x num_classes distribution sequence -> scalar realness logit.
  nk::Var score(const nk::Var& x) const;
  // d score / d x as a differentiable graph in the discriminator weights.
  nk::Var input_gradient(const nk::Var& x) const;

 private:
  DiscriminatorConfig cfg_;
  nk::ParamSet params_;
};

struct UasrWeights {
  double gradient_penalty = 1.5;
  double smoothness = 0.5;
  double diversity = 3.0;
  double aux = 0.3;

  void validate() const;
};

// Silence inserted independently at each of the n + 1 boundaries.
std::vector<int> insert_silence(std::span<const int> seq, double p_sil, int silence_id, Rng& rng);

// One-hot rows for a phone id sequence.
nk::Tensor one_hot(std::span<const int> ids, std::size_t num_classes);

// Mean over pairs of (|grad_x D(x_hat)| - 1)^2 at x_hat = a*real + (1-a)*fake,
// a ~ U(0,1) per pair; each pair is cropped to its shorter length.
nk::Var gradient_penalty(const Discriminator& d, std::span<const nk::Tensor> real,
                         std::span<const nk::Var> fake, Rng& rng);

// sum_t |o_t - o_{t+1}|^2
nk::Var segment_smoothness(const nk::Var& probs);
// sum_c pbar_c log pbar_c, pbar = mean output distribution over the batch.
nk::Var phoneme_diversity(std::span<const nk::Var> probs);
// Mean cross-entropy of aux logits against cluster ids.
nk::Var aux_ssl_loss(const nk::Var& aux_logits, std::span<const int> cluster_ids);
// Cluster id of the input frame at the centre of each generator window.
std::vector<int> aux_targets(const FeatureSeq& feats, const units::KMeansModel& clusters,
                             std::size_t kernel, std::size_t stride);

struct LossBreakdown {
  double d_real = 0.0;   // mean softplus(-D(real))
  double d_fake = 0.0;   // mean softplus(D(fake))
  double d_penalty = 0.0;
  double d_total = 0.0;  // d_real + d_fake + lambda * d_penalty
  double g_adv = 0.0;    // mean softplus(-D(fake))
  double g_smooth = 0.0;
  double g_diversity = 0.0;
  double g_aux = 0.0;
  double g_total = 0.0;  // g_adv + gamma*smooth + eta*diversity + delta*aux
  double d_accuracy = 0.0;
};

// Averages each run of frames sharing an argmax into one row.
nk::Var pool_runs(const nk::Var& probs);

struct UasrOptions {
  std::size_t batch_size = 8;
  bool pool_runs = true;  // discriminator sees run-pooled generator output
  double g_lr = 1e-3;
  double d_lr = 5e-4;
  nk::AdamConfig adam{0.5, 0.98, 1e-6, 0.0};
};

struct AudioItem {
  const FeatureSeq* feats = nullptr;
  std::span<const int> aux_ids;  // may be empty when the aux weight is 0
};

struct UasrModels {
  Generator generator;
  Discriminator discriminator;
  nk::AdamState g_state;
  nk::AdamState d_state;

  UasrModels(const GeneratorConfig& g, const DiscriminatorConfig& d, const nk::AdamConfig& adam,
             std::uint64_t seed);
};

// One discriminator update followed by one generator update.
LossBreakdown adversarial_step(std::span<const AudioItem> audio, std::span<const std::vector<int>> text,
                               UasrModels& models, const UasrWeights& w, const UasrOptions& opts, Rng& rng);

struct UasrConfig {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  UasrWeights weights;
  UasrOptions options;
  double silence_prob = 0.25;
  int silence_id = 0;
  std::size_t steps = 1500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct UasrResult {
  Generator generator;
  std::vector<LossBreakdown> log;
};

struct GeneratorHook {
  std::size_t every = 0;
  std::function<void(const Generator&, std::size_t)> save;
};

// Throws DivergenceError on a non-finite loss.
UasrResult train_uasr(const std::vector<FeatureSeq>& corpus, const std::vector<std::vector<int>>& text,
                      const UasrConfig& cfg, const GeneratorHook& hook = {});

// Stride-1 argmax labels, edge-replicated to exactly feats.num_frames().
FrameLabels frame_phoneme_labels(const Generator& g, const FeatureSeq& feats, std::string utt_id = {});

}  // namespace unitforge::uasr
