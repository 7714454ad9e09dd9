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

#include <cstdint>
#include <span>
#include <vector>

#include "unitforge/numkit/autodiff.hpp"

namespace unitforge::nk {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-6;
  double weight_decay = 0.01;
};

// Moment accumulators for a fixed, ordered list of parameters.
struct AdamState {
  AdamConfig config;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const Tensor> params);
  AdamState(AdamConfig cfg, std::span<const Var> params);
};

// Adam with bias correction and decoupled weight decay:
//   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
// Throws on shape mismatch or non-finite gradients (state is left untouched).
void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state, double lr);
void adam_step(std::span<Var> params, AdamState& state, double lr);

// Linear warm-up from 0 to peak_lr over warmup_frac * total_steps, then linear
// decay to 0 at total_steps.
struct ScheduleConfig {
  double peak_lr = 5e-4;
  std::int64_t total_steps = 400000;
  double warmup_frac = 0.08;
  double decay_frac = 0.92;
};

double lr_at(std::int64_t step, const ScheduleConfig& cfg);

}  // namespace unitforge::nk
