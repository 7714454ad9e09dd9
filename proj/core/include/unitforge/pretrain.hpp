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
#include <functional>
#include <vector>

#include "unitforge/backbone.hpp"
#include "unitforge/numkit/optim.hpp"
#include "unitforge/objective.hpp"

// Masked-prediction training of a Backbone plus PredictorHead on frame targets.
namespace unitforge {

struct PretrainConfig {
  BackboneConfig backbone;
  MaskSpec mask;
  nk::ScheduleConfig schedule;  // total_steps is the number of updates
  nk::AdamConfig adam;
  double temperature = 0.1;
  std::size_t embed_dim = 16;
  std::size_t batch_size = 4;
  double grad_clip = 5.0;  // global norm; 0 disables
  std::uint64_t seed = 0;

  void validate() const;
};

struct PretrainResult {
  Backbone backbone;
  PredictorHead head;
  std::vector<double> loss_log;  // batch-mean loss per update
};

// Called after every `every` updates with the step count (1-based).
struct CheckpointHook {
  std::size_t every = 0;
  std::function<void(const Backbone&, const PredictorHead&, std::size_t)> save;
};

// inputs[i] feeds the encoder, targets[i] labels its output frames.
// Throws DivergenceError when the loss or a gradient goes non-finite; the
// hook has then already written the last good state.
PretrainResult pretrain(const std::vector<FeatureSeq>& inputs, const std::vector<FrameLabels>& targets,
                        const PretrainConfig& cfg, const CheckpointHook& hook = {});

// Fraction of masked frames whose argmax unit equals the target, with masks
// drawn from `seed`.
double masked_prediction_accuracy(const Backbone& backbone, const PredictorHead& head,
                                  const std::vector<FeatureSeq>& inputs,
                                  const std::vector<FrameLabels>& targets, const MaskSpec& mask,
                                  std::uint64_t seed);

void save_head(const std::filesystem::path& dir, const PredictorHead& head);
PredictorHead load_head(const std::filesystem::path& dir);

}  // namespace unitforge
