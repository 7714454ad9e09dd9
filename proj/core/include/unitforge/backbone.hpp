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
#include <string>
#include <vector>

#include "unitforge/corpus.hpp"
#include "unitforge/numkit/checkpoint.hpp"
#include "unitforge/objective.hpp"

namespace unitforge {

struct ConvLayerSpec {
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t channels = 1;
};

// Convolutional front end. Each layer is a valid conv1d followed by GELU.
struct EncoderConfig {
  std::size_t input_channels = 1;
  double input_rate = kSampleRate;
  std::vector<ConvLayerSpec> layers;

  // 7 layers, kernels (10,3,3,3,3,2,2), strides (5,2,2,2,2,2,2), 512 channels:
  // 16 kHz in, 50 Hz out.
  static EncoderConfig paper();
  // Same kernels and strides with narrow channels; for waveform tests.
  static EncoderConfig desk_waveform(std::size_t channels = 16);
  // One kernel-1 layer over precomputed feature frames (frame rate preserved).
  static EncoderConfig features(std::size_t input_dim, std::size_t channels, double frame_rate = 50.0);

  std::size_t output_dim() const;
  std::size_t total_stride() const;
  double output_rate() const { return input_rate / static_cast<double>(total_stride()); }
  void validate() const;
};

enum class PositionalScheme { kLearnedAbsolute, kNone };

struct ContextConfig {
  std::size_t num_layers = 12;
  std::size_t model_dim = 768;
  std::size_t ffn_dim = 3072;
  std::size_t num_heads = 8;
  PositionalScheme positional = PositionalScheme::kLearnedAbsolute;
  std::size_t max_positions = 1024;

  void validate() const;
};

struct BackboneConfig {
  EncoderConfig encoder;
  bool feature_norm = true;  // layer norm on encoder output
  ContextConfig context;

  static BackboneConfig paper();
  // Small feature-input model used for the unit comparison study.
  static BackboneConfig desk(std::size_t feature_dim);

  std::size_t model_dim() const { return context.model_dim; }
  void validate() const;
};

std::string to_json_string(const BackboneConfig& cfg);
BackboneConfig backbone_config_from_json(const std::string& text);

// Smallest input length that yields one output frame.
std::size_t receptive_field(const EncoderConfig& cfg);
// Frame count after the encoder; throws when the input is shorter than the
// receptive field.
std::size_t output_length(std::size_t num_samples, const EncoderConfig& cfg);
// Learnable scalars in the backbone (predictor head excluded).
std::size_t param_count(const BackboneConfig& cfg);

// Encoder -> projection -> mask -> positional embedding -> post-LN
// transformer. All forward methods build graph nodes so the same code path
// serves training and inference.
class Backbone {
 public:
  Backbone(BackboneConfig cfg, std::uint64_t seed);

  const BackboneConfig& config() const noexcept { return cfg_; }
  nk::ParamSet& params() noexcept { return params_; }
  const nk::ParamSet& params() const noexcept { return params_; }

  // input: T_in x input_channels -> T x encoder.output_dim()
  nk::Var encode(const nk::Var& input) const;
  FeatureSeq encode(const Utterance& utt) const;
  FeatureSeq encode(const FeatureSeq& feats) const;

  // Projects to model_dim, then overwrites masked rows with the mask embedding.
  nk::Var project_and_mask(const nk::Var& feats, const MaskSet& mask) const;
  FeatureSeq project_and_mask(const FeatureSeq& feats, const MaskSet& mask) const;

  nk::Var transformer_block(const nk::Var& x, std::size_t layer) const;
  // Adds positions, normalizes, runs every block. When `layers` is given it
  // receives the output of each block in order.
  nk::Var context_forward(const nk::Var& x, std::vector<nk::Var>* layers = nullptr) const;
  FeatureSeq context_forward(const FeatureSeq& x) const;

  // encode + project_and_mask + context_forward on raw encoder input.
  nk::Var forward(const nk::Var& input, const MaskSet& mask,
                  std::vector<nk::Var>* layers = nullptr) const;
  // Unmasked forward returning the output of transformer block `layer`.
  FeatureSeq layer_features(const FeatureSeq& input, std::size_t layer) const;

  // <dir>/config.json plus the tensor checkpoint layout.
  void save(const std::filesystem::path& dir) const;
  static Backbone load(const std::filesystem::path& dir);

 private:
  nk::Var input_var(const FeatureSeq& feats) const;

  BackboneConfig cfg_;
  nk::ParamSet params_;
};

}  // namespace unitforge
