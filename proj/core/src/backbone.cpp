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

#include "unitforge/backbone.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/numkit/ops.hpp"
#include "unitforge/rng.hpp"

namespace unitforge {
namespace {

constexpr std::size_t kPaperKernels[] = {10, 3, 3, 3, 3, 2, 2};
constexpr std::size_t kPaperStrides[] = {5, 2, 2, 2, 2, 2, 2};

std::string layer_prefix(std::size_t i) { return "context.layer" + std::to_string(i) + "."; }

nk::Tensor random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
  nk::Tensor t = nk::Tensor::matrix(rows, cols);
  for (double& v : t.data()) v = rng.normal(0.0, stddev);
  return t;
}

nk::Tensor filled(std::size_t n, double v) { return nk::Tensor(nk::Shape{n}, v); }

}  // namespace

EncoderConfig EncoderConfig::paper() {
  EncoderConfig cfg;
  for (std::size_t i = 0; i < 7; ++i) cfg.layers.push_back({kPaperKernels[i], kPaperStrides[i], 512});
  return cfg;
}

EncoderConfig EncoderConfig::desk_waveform(std::size_t channels) {
  EncoderConfig cfg;
  for (std::size_t i = 0; i < 7; ++i) {
    cfg.layers.push_back({kPaperKernels[i], kPaperStrides[i], channels});
  }
  return cfg;
}

EncoderConfig EncoderConfig::features(std::size_t input_dim, std::size_t channels, double frame_rate) {
  EncoderConfig cfg;
  cfg.input_channels = input_dim;
  cfg.input_rate = frame_rate;
  cfg.layers.push_back({1, 1, channels});
  return cfg;
}

std::size_t EncoderConfig::output_dim() const {
  if (layers.empty()) throw Error("encoder has no layers");
  return layers.back().channels;
}

std::size_t EncoderConfig::total_stride() const {
  std::size_t s = 1;
  for (const auto& l : layers) s *= l.stride;
  return s;
}

void EncoderConfig::validate() const {
  if (layers.empty()) throw Error("encoder has no layers");
  if (input_channels == 0) throw Error("encoder input_channels must be positive");
  if (!(input_rate > 0.0)) throw Error("encoder input_rate must be positive");
  for (const auto& l : layers) {
    if (l.kernel == 0 || l.stride == 0 || l.channels == 0) {
      throw Error("encoder layer kernel, stride and channels must be positive");
    }
  }
}

void ContextConfig::validate() const {
  if (model_dim == 0 || num_heads == 0 || model_dim % num_heads != 0) {
    throw Error("model_dim " + std::to_string(model_dim) + " not divisible by num_heads " +
                std::to_string(num_heads));
  }
  if (ffn_dim == 0) throw Error("ffn_dim must be positive");
  if (positional == PositionalScheme::kLearnedAbsolute && max_positions == 0) {
    throw Error("max_positions must be positive for learned positions");
  }
}

BackboneConfig BackboneConfig::paper() {
  BackboneConfig cfg;
  cfg.encoder = EncoderConfig::paper();
  cfg.context = ContextConfig{12, 768, 3072, 8, PositionalScheme::kLearnedAbsolute, 1024};
  return cfg;
}

BackboneConfig BackboneConfig::desk(std::size_t feature_dim) {
  BackboneConfig cfg;
  cfg.encoder = EncoderConfig::features(feature_dim, 32);
  cfg.context = ContextConfig{2, 32, 64, 4, PositionalScheme::kLearnedAbsolute, 1024};
  return cfg;
}

void BackboneConfig::validate() const {
  encoder.validate();
  context.validate();
}

std::string to_json_string(const BackboneConfig& cfg) {
  nlohmann::json j;
  j["encoder"]["input_channels"] = cfg.encoder.input_channels;
  j["encoder"]["input_rate"] = cfg.encoder.input_rate;
  j["encoder"]["layers"] = nlohmann::json::array();
  for (const auto& l : cfg.encoder.layers) {
    j["encoder"]["layers"].push_back({{"kernel", l.kernel}, {"stride", l.stride}, {"channels", l.channels}});
  }
  j["feature_norm"] = cfg.feature_norm;
  j["context"] = {{"num_layers", cfg.context.num_layers},
                  {"model_dim", cfg.context.model_dim},
                  {"ffn_dim", cfg.context.ffn_dim},
                  {"num_heads", cfg.context.num_heads},
                  {"positional", cfg.context.positional == PositionalScheme::kNone ? "none" : "learned_absolute"},
                  {"max_positions", cfg.context.max_positions}};
  return j.dump(2);
}

BackboneConfig backbone_config_from_json(const std::string& text) {
  BackboneConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& e = j.at("encoder");
    cfg.encoder.input_channels = e.at("input_channels").get<std::size_t>();
    cfg.encoder.input_rate = e.at("input_rate").get<double>();
    for (const auto& l : e.at("layers")) {
      cfg.encoder.layers.push_back({l.at("kernel").get<std::size_t>(), l.at("stride").get<std::size_t>(),
                                    l.at("channels").get<std::size_t>()});
    }
    cfg.feature_norm = j.value("feature_norm", true);
    const auto& c = j.at("context");
    cfg.context.num_layers = c.at("num_layers").get<std::size_t>();
    cfg.context.model_dim = c.at("model_dim").get<std::size_t>();
    cfg.context.ffn_dim = c.at("ffn_dim").get<std::size_t>();
    cfg.context.num_heads = c.at("num_heads").get<std::size_t>();
    const std::string pos = c.value("positional", std::string("learned_absolute"));
    if (pos == "none") {
      cfg.context.positional = PositionalScheme::kNone;
    } else if (pos == "learned_absolute") {
      cfg.context.positional = PositionalScheme::kLearnedAbsolute;
    } else {
      throw Error("unknown positional scheme: " + pos);
    }
    cfg.context.max_positions = c.value("max_positions", std::size_t{1024});
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed backbone config: ") + ex.what());
  }
  cfg.validate();
  return cfg;
}

std::size_t receptive_field(const EncoderConfig& cfg) {
  cfg.validate();
  // Walk backwards: one output frame of layer i needs (n - 1) * s + k inputs.
  std::size_t n = 1;
  for (auto it = cfg.layers.rbegin(); it != cfg.layers.rend(); ++it) {
    n = (n - 1) * it->stride + it->kernel;
  }
  return n;
}

std::size_t output_length(std::size_t num_samples, const EncoderConfig& cfg) {
  cfg.validate();
  if (num_samples < receptive_field(cfg)) {
    throw Error("input of " + std::to_string(num_samples) + " samples is shorter than the encoder receptive field (" +
                std::to_string(receptive_field(cfg)) + ")");
  }
  std::size_t n = num_samples;
  for (const auto& l : cfg.layers) n = nk::conv1d_output_length(n, l.kernel, l.stride);
  return n;
}

std::size_t param_count(const BackboneConfig& cfg) {
  cfg.validate();
  std::size_t n = 0;
  std::size_t cin = cfg.encoder.input_channels;
  for (const auto& l : cfg.encoder.layers) {
    n += l.kernel * cin * l.channels + l.channels;
    cin = l.channels;
  }
  const std::size_t enc = cfg.encoder.output_dim();
  const std::size_t d = cfg.context.model_dim;
  const std::size_t f = cfg.context.ffn_dim;
  if (cfg.feature_norm) n += 2 * enc;
  n += enc * d + d;  // projection
  n += d;            // mask embedding
  if (cfg.context.positional == PositionalScheme::kLearnedAbsolute) n += cfg.context.max_positions * d;
  n += 2 * d;  // input layer norm
  const std::size_t per_layer = 4 * (d * d + d)      // q, k, v, out
                                + (d * f + f) + (f * d + d)  // feed-forward
                                + 2 * 2 * d;                 // two layer norms
  n += cfg.context.num_layers * per_layer;
  return n;
}

Backbone::Backbone(BackboneConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(seed);
  std::size_t cin = cfg_.encoder.input_channels;
  for (std::size_t i = 0; i < cfg_.encoder.layers.size(); ++i) {
    const auto& l = cfg_.encoder.layers[i];
    nk::Tensor w(nk::Shape{l.kernel, cin, l.channels});
    const double s = 1.0 / std::sqrt(static_cast<double>(l.kernel * cin));
    for (double& v : w.data()) v = rng.normal(0.0, s);
    params_.add("encoder.conv" + std::to_string(i) + ".weight", std::move(w));
    params_.add("encoder.conv" + std::to_string(i) + ".bias", filled(l.channels, 0.0));
    cin = l.channels;
  }
  const std::size_t enc = cfg_.encoder.output_dim();
  const std::size_t d = cfg_.context.model_dim;
  const std::size_t f = cfg_.context.ffn_dim;
  if (cfg_.feature_norm) {
    params_.add("encoder.norm.gamma", filled(enc, 1.0));
    params_.add("encoder.norm.beta", filled(enc, 0.0));
  }
  params_.add("proj.weight", random_matrix(rng, enc, d, 1.0 / std::sqrt(static_cast<double>(enc))));
  params_.add("proj.bias", filled(d, 0.0));
  {
    nk::Tensor m(nk::Shape{d});
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    params_.add("mask_emb", std::move(m));
  }
  if (cfg_.context.positional == PositionalScheme::kLearnedAbsolute) {
    params_.add("pos_emb", random_matrix(rng, cfg_.context.max_positions, d, 0.02));
  }
  params_.add("context.input_norm.gamma", filled(d, 1.0));
  params_.add("context.input_norm.beta", filled(d, 0.0));
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  const double sf = 1.0 / std::sqrt(static_cast<double>(f));
  for (std::size_t i = 0; i < cfg_.context.num_layers; ++i) {
    const std::string p = layer_prefix(i);
    for (const char* name : {"wq", "wk", "wv", "wo"}) {
      params_.add(p + "attn." + name, random_matrix(rng, d, d, sd));
      params_.add(p + "attn.b" + std::string(name + 1), filled(d, 0.0));
    }
    params_.add(p + "ln1.gamma", filled(d, 1.0));
    params_.add(p + "ln1.beta", filled(d, 0.0));
    params_.add(p + "ffn.w1", random_matrix(rng, d, f, sd));
    params_.add(p + "ffn.b1", filled(f, 0.0));
    params_.add(p + "ffn.w2", random_matrix(rng, f, d, sf));
    params_.add(p + "ffn.b2", filled(d, 0.0));
    params_.add(p + "ln2.gamma", filled(d, 1.0));
    params_.add(p + "ln2.beta", filled(d, 0.0));
  }
}

nk::Var Backbone::encode(const nk::Var& input) const {
  if (input.value().rank() != 2 || input.value().cols() != cfg_.encoder.input_channels) {
    throw Error("encoder expects " + std::to_string(cfg_.encoder.input_channels) +
                "-channel input, got " + input.value().shape_str());
  }
  if (!input.value().all_finite()) throw Error("encoder input has non-finite values");
  output_length(input.value().rows(), cfg_.encoder);  // throws when too short
  nk::Var x = input;
  for (std::size_t i = 0; i < cfg_.encoder.layers.size(); ++i) {
    const std::string p = "encoder.conv" + std::to_string(i);
    x = nk::conv1d(x, params_.get(p + ".weight"), cfg_.encoder.layers[i].stride);
    x = nk::gelu(nk::add_bias(x, params_.get(p + ".bias")));
  }
  if (cfg_.feature_norm) {
    x = nk::layer_norm(x, params_.get("encoder.norm.gamma"), params_.get("encoder.norm.beta"));
  }
  return x;
}

nk::Var Backbone::input_var(const FeatureSeq& feats) const { return nk::constant(feats.frames); }

FeatureSeq Backbone::encode(const Utterance& utt) const {
  if (cfg_.encoder.input_channels != 1) throw Error("waveform input needs a 1-channel encoder");
  if (utt.samples.empty()) throw Error("utterance " + utt.id + " has no samples");
  nk::Tensor wave(nk::Shape{utt.samples.size(), 1}, utt.samples);
  return FeatureSeq(encode(nk::constant(std::move(wave))).value(), cfg_.encoder.output_rate());
}

FeatureSeq Backbone::encode(const FeatureSeq& feats) const {
  return FeatureSeq(encode(input_var(feats)).value(), cfg_.encoder.output_rate());
}

nk::Var Backbone::project_and_mask(const nk::Var& feats, const MaskSet& mask) const {
  if (mask.size() != feats.value().rows()) {
    throw Error("mask covers " + std::to_string(mask.size()) + " frames but features have " +
                std::to_string(feats.value().rows()));
  }
  nk::Var x = nk::add_bias(nk::matmul(feats, params_.get("proj.weight")), params_.get("proj.bias"));
  return nk::mask_rows(x, mask.masked, params_.get("mask_emb"));
}

FeatureSeq Backbone::project_and_mask(const FeatureSeq& feats, const MaskSet& mask) const {
  return FeatureSeq(project_and_mask(input_var(feats), mask).value(), feats.frame_rate);
}

nk::Var Backbone::transformer_block(const nk::Var& x, std::size_t layer) const {
  if (layer >= cfg_.context.num_layers) throw Error("transformer layer index out of range");
  const std::string p = layer_prefix(layer);
  const std::size_t d = cfg_.context.model_dim;
  const std::size_t heads = cfg_.context.num_heads;
  const std::size_t dh = d / heads;
  auto linear = [&](const nk::Var& in, const std::string& w, const std::string& b) {
    return nk::add_bias(nk::matmul(in, params_.get(w)), params_.get(b));
  };
  const nk::Var q = linear(x, p + "attn.wq", p + "attn.bq");
  const nk::Var k = linear(x, p + "attn.wk", p + "attn.bk");
  const nk::Var v = linear(x, p + "attn.wv", p + "attn.bv");
  std::vector<nk::Var> head_out;
  head_out.reserve(heads);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t h = 0; h < heads; ++h) {
    const nk::Var qh = nk::slice_cols(q, h * dh, (h + 1) * dh);
    const nk::Var kh = nk::slice_cols(k, h * dh, (h + 1) * dh);
    const nk::Var vh = nk::slice_cols(v, h * dh, (h + 1) * dh);
    const nk::Var attn = nk::softmax_rows(nk::scale(nk::matmul_nt(qh, kh), inv_sqrt));
    head_out.push_back(nk::matmul(attn, vh));
  }
  const nk::Var attn_out = linear(nk::concat_cols(head_out), p + "attn.wo", p + "attn.bo");
  nk::Var y = nk::layer_norm(nk::add(x, attn_out), params_.get(p + "ln1.gamma"), params_.get(p + "ln1.beta"));
  const nk::Var ff = linear(nk::gelu(linear(y, p + "ffn.w1", p + "ffn.b1")), p + "ffn.w2", p + "ffn.b2");
  return nk::layer_norm(nk::add(y, ff), params_.get(p + "ln2.gamma"), params_.get(p + "ln2.beta"));
}

nk::Var Backbone::context_forward(const nk::Var& x, std::vector<nk::Var>* layers) const {
  if (x.value().rank() != 2 || x.value().cols() != cfg_.context.model_dim) {
    throw Error("context network expects model_dim columns, got " + x.value().shape_str());
  }
  const std::size_t frames = x.value().rows();
  nk::Var h = x;
  if (cfg_.context.positional == PositionalScheme::kLearnedAbsolute) {
    if (frames > cfg_.context.max_positions) {
      throw Error("sequence of " + std::to_string(frames) + " frames exceeds max_positions " +
                  std::to_string(cfg_.context.max_positions));
    }
    h = nk::add(h, nk::slice_rows(params_.get("pos_emb"), 0, frames));
  }
  h = nk::layer_norm(h, params_.get("context.input_norm.gamma"), params_.get("context.input_norm.beta"));
  for (std::size_t i = 0; i < cfg_.context.num_layers; ++i) {
    h = transformer_block(h, i);
    if (layers) layers->push_back(h);
  }
  if (!h.value().all_finite()) throw DivergenceError("context network produced non-finite values");
  return h;
}

FeatureSeq Backbone::context_forward(const FeatureSeq& x) const {
  return FeatureSeq(context_forward(input_var(x)).value(), x.frame_rate);
}

nk::Var Backbone::forward(const nk::Var& input, const MaskSet& mask, std::vector<nk::Var>* layers) const {
  return context_forward(project_and_mask(encode(input), mask), layers);
}

FeatureSeq Backbone::layer_features(const FeatureSeq& input, std::size_t layer) const {
  if (layer >= cfg_.context.num_layers) throw Error("layer index out of range");
  std::vector<nk::Var> outs;
  MaskSet none;
  const nk::Var enc = encode(input_var(input));
  none.masked.assign(enc.value().rows(), false);
  context_forward(project_and_mask(enc, none), &outs);
  return FeatureSeq(outs[layer].value(), cfg_.encoder.output_rate());
}

void Backbone::save(const std::filesystem::path& dir) const {
  nk::save_tensors(dir, params_.snapshot());
  write_text_file(dir / "config.json", to_json_string(cfg_) + "\n");
}

Backbone Backbone::load(const std::filesystem::path& dir) {
  Backbone b(backbone_config_from_json(read_text_file(dir / "config.json")), 0);
  b.params_.load(nk::load_tensors(dir));
  return b;
}

}  // namespace unitforge
