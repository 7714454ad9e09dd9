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


#include "unitforge/pretrain.hpp"

#include <cmath>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/numkit/ops.hpp"
#include "unitforge/rng.hpp"

namespace unitforge {

void PretrainConfig::validate() const {
  backbone.validate();
  mask.validate();
  if (schedule.total_steps <= 0) throw Error("pretrain needs at least one step");
  if (batch_size == 0) throw Error("batch_size must be positive");
  if (embed_dim == 0) throw Error("embed_dim must be positive");
  if (!(temperature > 0.0)) throw Error("temperature must be positive");
}

namespace {

void check_pairs(const std::vector<FeatureSeq>& inputs, const std::vector<FrameLabels>& targets,
                 const Backbone& backbone) {
  if (inputs.empty()) throw Error("pretrain: empty corpus");
  if (inputs.size() != targets.size()) {
    throw Error("pretrain: " + std::to_string(inputs.size()) + " inputs but " +
                std::to_string(targets.size()) + " target sequences");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t frames = output_length(inputs[i].num_frames(), backbone.config().encoder);
    if (targets[i].ids.size() != frames) {
      throw Error("pretrain: utterance " + targets[i].utt_id + " has " + std::to_string(targets[i].ids.size()) +
                  " targets for " + std::to_string(frames) + " frames");
    }
    targets[i].validate();
  }
}

void clip_gradients(std::vector<nk::Var>& vars, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (auto& v : vars) {
    for (double g : v.grad().data()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw DivergenceError("non-finite gradient norm");
  if (norm <= max_norm) return;
  const double s = max_norm / norm;
  for (auto& v : vars) {
    for (double& g : v.node()->grad_buffer().data()) g *= s;
  }
}

}  // namespace

PretrainResult pretrain(const std::vector<FeatureSeq>& inputs, const std::vector<FrameLabels>& targets,
                        const PretrainConfig& cfg, const CheckpointHook& hook) {
  cfg.validate();
  Rng rng(cfg.seed);
  Backbone backbone(cfg.backbone, mix_seed(cfg.seed, 1));
  int units = 0;
  for (const auto& t : targets) units = std::max(units, t.vocab_size);
  if (units <= 0) throw Error("pretrain: targets carry no vocabulary size");
  PredictorHead head = PredictorHead::init(cfg.backbone.model_dim(), cfg.embed_dim, static_cast<std::size_t>(units),
                                           cfg.temperature, mix_seed(cfg.seed, 2));
  check_pairs(inputs, targets, backbone);

  std::vector<nk::Var> vars = backbone.params().vars();
  for (const auto& p : head.params()) vars.push_back(p);
  nk::AdamState adam(cfg.adam, std::span<const nk::Var>(vars));

  Rng mask_rng = rng.fork(1);
  Rng order_rng = rng.fork(2);
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  order_rng.shuffle(order);
  std::size_t cursor = 0;

  std::vector<double> log;
  const auto total = static_cast<std::size_t>(cfg.schedule.total_steps);
  log.reserve(total);
  for (std::size_t step = 0; step < total; ++step) {
    for (auto& v : vars) v.zero_grad();
    double batch_loss = 0.0;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      const std::size_t i = order[cursor++];
      const nk::Var enc = backbone.encode(nk::constant(inputs[i].frames));
      const MaskSet mask = sample_mask(enc.value().rows(), cfg.mask, mask_rng);
      const nk::Var h = backbone.context_forward(backbone.project_and_mask(enc, mask));
      nk::Var loss = nk::scale(masked_nll(h, targets[i], mask, head), 1.0 / static_cast<double>(cfg.batch_size));
      const double value = loss.value().item();
      if (!std::isfinite(value)) {
        throw DivergenceError("pretrain: non-finite loss at step " + std::to_string(step + 1));
      }
      batch_loss += value;
      if (loss.requires_grad()) nk::backward(loss);
    }
    clip_gradients(vars, cfg.grad_clip);
    nk::adam_step(std::span<nk::Var>(vars), adam, nk::lr_at(static_cast<std::int64_t>(step), cfg.schedule));
    log.push_back(batch_loss);
    if (hook.every > 0 && hook.save && ((step + 1) % hook.every == 0 || step + 1 == total)) {
      hook.save(backbone, head, step + 1);
    }
  }
  return PretrainResult{std::move(backbone), std::move(head), std::move(log)};
}

double masked_prediction_accuracy(const Backbone& backbone, const PredictorHead& head,
                                  const std::vector<FeatureSeq>& inputs,
                                  const std::vector<FrameLabels>& targets, const MaskSpec& mask_spec,
                                  std::uint64_t seed) {
  check_pairs(inputs, targets, backbone);
  Rng rng(seed);
  std::size_t hit = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const nk::Var enc = backbone.encode(nk::constant(inputs[i].frames));
    const MaskSet mask = sample_mask(enc.value().rows(), mask_spec, rng);
    const nk::Var h = backbone.context_forward(backbone.project_and_mask(enc, mask));
    const FrameLabels pred = predict_units(FeatureSeq(h.value(), 1.0), head);
    for (std::size_t t = 0; t < pred.ids.size(); ++t) {
      if (!mask.masked[t]) continue;
      ++total;
      if (pred.ids[t] == targets[i].ids[t]) ++hit;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

void save_head(const std::filesystem::path& dir, const PredictorHead& head) {
  nk::save_tensors(dir, {{"projection", head.projection.value()}, {"embeddings", head.embeddings.value()}});
  nlohmann::json j;
  j["temperature"] = head.temperature;
  write_text_file(dir / "head.json", j.dump(2) + "\n");
}

PredictorHead load_head(const std::filesystem::path& dir) {
  auto tensors = nk::load_tensors(dir);
  if (!tensors.count("projection") || !tensors.count("embeddings")) {
    throw IoError("predictor head checkpoint at " + dir.string() + " is incomplete");
  }
  double temperature = 0.1;
  try {
    temperature = nlohmann::json::parse(read_text_file(dir / "head.json")).at("temperature").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed head.json: ") + ex.what());
  }
  PredictorHead head{nk::parameter(tensors.at("projection")), nk::parameter(tensors.at("embeddings")), temperature};
  head.validate();
  return head;
}

}  // namespace unitforge
