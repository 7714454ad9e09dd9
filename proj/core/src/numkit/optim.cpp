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

#include "unitforge/numkit/optim.hpp"

#include <cmath>

#include "unitforge/error.hpp"

namespace unitforge::nk {

AdamState::AdamState(AdamConfig cfg, std::span<const Tensor> params) : config(cfg) {
  for (const Tensor& p : params) {
    m.push_back(Tensor::zeros_like(p));
    v.push_back(Tensor::zeros_like(p));
  }
}

AdamState::AdamState(AdamConfig cfg, std::span<const Var> params) : config(cfg) {
  for (const Var& p : params) {
    m.push_back(Tensor::zeros_like(p.value()));
    v.push_back(Tensor::zeros_like(p.value()));
  }
}

void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw Error("adam_step: parameter/gradient/state count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(state.m[i])) {
      throw Error("adam_step: shape mismatch for parameter " + std::to_string(i) + " " +
                  params[i].shape_str() + " vs grad " + grads[i].shape_str());
    }
    if (!grads[i].all_finite()) {
      throw DivergenceError("adam_step: non-finite gradient for parameter " + std::to_string(i));
    }
  }
  const AdamConfig& c = state.config;
  const std::int64_t t = ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    const Tensor& g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= lr * (mhat / (std::sqrt(vhat) + c.eps) + c.weight_decay * p[j]);
    }
  }
}

void adam_step(std::span<Var> params, AdamState& state, double lr) {
  std::vector<Tensor> values;
  std::vector<Tensor> grads;
  values.reserve(params.size());
  grads.reserve(params.size());
  for (Var& p : params) {
    grads.push_back(p.grad());
    values.push_back(std::move(p.mutable_value()));
  }
  try {
    adam_step(values, grads, state, lr);
  } catch (...) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].mutable_value() = std::move(values[i]);
    throw;
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i].mutable_value() = std::move(values[i]);
}

double lr_at(std::int64_t step, const ScheduleConfig& cfg) {
  if (cfg.total_steps <= 0) throw Error("lr_at: total_steps must be positive");
  if (step < 0 || step > cfg.total_steps) {
    throw Error("lr_at: step " + std::to_string(step) + " outside [0, " +
                std::to_string(cfg.total_steps) + "]");
  }
  const double total = static_cast<double>(cfg.total_steps);
  const double warmup = cfg.warmup_frac * total;
  const double s = static_cast<double>(step);
  if (s < warmup) return cfg.peak_lr * s / warmup;
  const double decay = total - warmup;
  if (decay <= 0.0) return cfg.peak_lr;
  return cfg.peak_lr * (total - s) / decay;
}

}  // namespace unitforge::nk
