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

#include "unitforge/numkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "unitforge/error.hpp"

namespace unitforge::nk {

GradCheckReport compare_gradients(const std::function<double()>& eval, std::span<Var> params,
                                  std::span<const Tensor> analytic, const GradCheckOptions& opts) {
  if (analytic.size() != params.size()) throw Error("grad_check: gradient count mismatch");
  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params[p].mutable_value();
    if (!analytic[p].same_shape(value)) throw Error("grad_check: gradient shape mismatch");
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double orig = value[i];
      value[i] = orig + opts.step;
      const double up = eval();
      value[i] = orig - opts.step;
      const double down = eval();
      value[i] = orig;
      if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(analytic[p][i])) {
        throw Error("grad_check: non-finite value at parameter " + std::to_string(p));
      }
      const double numeric = (up - down) / (2.0 * opts.step);
      const double a = analytic[p][i];
      const double abs_err = std::abs(a - numeric);
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.scale_floor});
      const double rel = abs_err / denom;
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel > report.max_rel_error || report.coordinates == 0) {
        report.max_rel_error = std::max(rel, report.max_rel_error);
        report.worst_param = p;
        report.worst_index = i;
      }
      ++report.coordinates;
    }
  }
  report.passed = report.max_rel_error <= opts.tolerance;
  return report;
}

GradCheckReport grad_check(const std::function<Var()>& loss, std::span<Var> params,
                           const GradCheckOptions& opts) {
  for (Var& p : params) p.zero_grad();
  const Var root = loss();
  if (!root.value().all_finite()) throw Error("grad_check: non-finite loss");
  backward(root);
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Var& p : params) analytic.push_back(p.grad());
  for (Var& p : params) p.zero_grad();
  return compare_gradients([&] { return loss().value().item(); }, params, analytic, opts);
}

}  // namespace unitforge::nk
