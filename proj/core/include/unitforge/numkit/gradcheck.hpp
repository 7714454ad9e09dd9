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
#include <functional>
#include <span>

#include "unitforge/numkit/autodiff.hpp"

namespace unitforge::nk {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
  bool passed = false;
};

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-4;
  // rel = |analytic - numeric| / max(|analytic|, |numeric|, scale_floor)
  double scale_floor = 1e-3;
};

// Central finite differences of `eval` against caller-supplied gradients.
// `eval` must be deterministic in the parameter values. Throws on non-finite
// values.
GradCheckReport compare_gradients(const std::function<double()>& eval, std::span<Var> params,
                                  std::span<const Tensor> analytic, const GradCheckOptions& opts = {});

// Builds the graph with `loss`, backpropagates, and checks every coordinate of
// `params`. Parameter gradients are cleared before and after.
GradCheckReport grad_check(const std::function<Var()>& loss, std::span<Var> params,
                           const GradCheckOptions& opts = {});

}  // namespace unitforge::nk
