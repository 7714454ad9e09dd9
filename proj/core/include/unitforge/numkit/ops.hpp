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

#include <span>
#include <utility>
#include <vector>

#include "unitforge/numkit/autodiff.hpp"

// Differentiable primitives. Matrices are rank-2 (rows x cols); "rows" ops
// work along the last axis of a matrix.
namespace unitforge::nk {

Var matmul(const Var& a, const Var& b);
// a * b^T
Var matmul_nt(const Var& a, const Var& b);
Var transpose(const Var& a);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
// x: T x n, b: {n}
Var add_bias(const Var& x, const Var& b);

Var sum(const Var& a);
Var mean(const Var& a);
// T x C -> 1 x C
Var mean_rows(const Var& x);

Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope);
Var gelu(const Var& a);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);

// Frobenius norm; the gradient at the origin is taken to be zero.
Var l2_norm(const Var& a);
// Throws on a zero row.
Var l2_normalize_rows(const Var& x);
Var softmax_rows(const Var& x, double temperature = 1.0);
Var log_softmax_rows(const Var& x, double temperature = 1.0);
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);

// x: T x D_in, w: k x D_in x D_out. Valid convolution.
Var conv1d(const Var& x, const Var& w, std::size_t stride);
// Transpose of conv1d with respect to its input: given dL/d(out) (T' x D_out)
// returns dL/d(in) (input_len x D_in). Differentiable in both g and w, which
// is what makes input-gradient penalties trainable.
Var conv1d_input_grad(const Var& g, const Var& w, std::size_t stride, std::size_t input_len);

Var pad_rows(const Var& x, std::size_t before, std::size_t after);
Var slice_rows(const Var& x, std::size_t begin, std::size_t end);
Var slice_cols(const Var& x, std::size_t begin, std::size_t end);
Var concat_rows(std::span<const Var> xs);
Var concat_cols(std::span<const Var> xs);

// Gathers x[r, c] for each (r, c) into a vector.
Var pick(const Var& x, std::span<const std::pair<std::size_t, std::size_t>> index);
// sum of x log x with 0 log 0 = 0.
Var sum_xlogx(const Var& x);
// Rows with mask[t] set are replaced by `embedding` ({cols}).
Var mask_rows(const Var& x, const std::vector<bool>& mask, const Var& embedding);

}  // namespace unitforge::nk
