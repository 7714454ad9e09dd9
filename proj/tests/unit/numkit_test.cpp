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


#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "unitforge/error.hpp"
#include "unitforge/numkit/checkpoint.hpp"
#include "unitforge/numkit/gradcheck.hpp"
#include "unitforge/numkit/ops.hpp"
#include "unitforge/numkit/optim.hpp"

using namespace unitforge;
using namespace unitforge::nk;
using testutil::random_tensor;

namespace {

// Direct triple loop; the oracle for conv1d.
Tensor naive_conv(const Tensor& x, const Tensor& w, std::size_t stride) {
  const std::size_t k = w.dim(0), din = w.dim(1), dout = w.dim(2);
  const std::size_t n = (x.rows() - k) / stride + 1;
  Tensor y = Tensor::matrix(n, dout);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t o = 0; o < dout; ++o) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < din; ++i) s += x.at(t * stride + j, i) * w[(j * din + i) * dout + o];
      y.at(t, o) = s;
    }
  return y;
}

}  // namespace

TEST_CASE("conv1d length formula: T=10, k=3, stride 2 gives 4") {
  CHECK(conv1d_output_length(10, 3, 2) == 4);
  CHECK(conv1d_output_length(3, 3, 1) == 1);
  CHECK_THROWS_AS(conv1d_output_length(2, 3, 1), Error);
}

TEST_CASE("conv1d matches a naive loop") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + rng.uniform_int(4), stride = 1 + rng.uniform_int(3);
    const std::size_t t = k + rng.uniform_int(12), din = 1 + rng.uniform_int(4), dout = 1 + rng.uniform_int(4);
    const Tensor x = random_tensor({t, din}, rng);
    const Tensor w = random_tensor({k, din, dout}, rng);
    const Tensor y = conv1d(x, w, stride);
    CHECK(testutil::max_abs_diff(y, naive_conv(x, w, stride)) < 1e-12);
  }
}

TEST_CASE("softmax: [1, 0] at temperature 1") {
  const Tensor p = softmax(Tensor(Shape{1, 2}, {1.0, 0.0}));
  const double e = std::exp(1.0);
  CHECK(p[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.7311).epsilon(1e-4));
  // Temperature divides the logits.
  const Tensor q = softmax(Tensor(Shape{1, 2}, {1.0, 0.0}), 0.5);
  CHECK(q[0] == doctest::Approx(std::exp(2.0) / (std::exp(2.0) + 1.0)));
  // Large logits stay finite.
  CHECK(softmax(Tensor(Shape{1, 2}, {1000.0, 0.0})).all_finite());
  CHECK_THROWS_AS(softmax(p, 0.0), Error);
}

TEST_CASE("cosine similarity: [1,1] vs [1,0] is 1/sqrt 2") {
  const std::vector<double> a{1.0, 1.0}, b{1.0, 0.0}, z{0.0, 0.0};
  CHECK(cosine_sim(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(cosine_sim(a, z), Error);
}

TEST_CASE("grad_check: random two-layer network") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Var x = constant(random_tensor({5, 4}, rng));
    Var w1 = parameter(random_tensor({4, 6}, rng, 0.5));
    Var b1 = parameter(random_tensor({6}, rng, 0.1));
    Var w2 = parameter(random_tensor({6, 3}, rng, 0.5));
    std::vector<Var> ps{w1, b1, w2};
    const auto report = grad_check([&] { return sum(square(matmul(tanh(add_bias(matmul(x, w1), b1)), w2))); }, ps);
    CHECK(report.passed);
    CHECK(report.max_rel_error <= 1e-4);
  }
}

TEST_CASE("grad_check: softmax cross-entropy") {
  Rng rng(12);
  Var logits = parameter(random_tensor({6, 5}, rng));
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t t = 0; t < 6; ++t) picks.emplace_back(t, rng.uniform_int(5));
  std::vector<Var> ps{logits};
  const auto r = grad_check([&] { return scale(sum(pick(log_softmax_rows(logits, 0.7), picks)), -1.0); }, ps);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("grad_check: every primitive") {
  Rng rng(13);
  Var a = parameter(random_tensor({4, 3}, rng));
  Var b = parameter(random_tensor({4, 3}, rng));
  Var c = parameter(random_tensor({3, 2}, rng));
  Var bias = parameter(random_tensor({3}, rng));
  Var gamma = parameter(random_tensor({3}, rng));
  Var pos = parameter(Tensor(Shape{4, 3}, std::vector<double>(12, 0.0)));
  for (auto& v : pos.mutable_value().data()) v = 0.1 + rng.uniform();
  Var w = parameter(random_tensor({2, 3, 2}, rng));
  Var emb = parameter(random_tensor({3}, rng));
  std::vector<Var> ps{a, b, c, bias, gamma, w, emb};
  std::vector<Var> pp{pos};
  auto check = [&](const char* name, const std::function<Var()>& f, std::vector<Var>& params) {
    CAPTURE(name);
    CHECK(grad_check([&] { return f(); }, params).max_rel_error <= 1e-4);
  };
  check("matmul", [&] { return sum(matmul(a, c)); }, ps);
  check("matmul_nt", [&] { return sum(square(matmul_nt(a, b))); }, ps);
  check("transpose", [&] { return sum(mul(transpose(a), transpose(b))); }, ps);
  check("add/sub/mul", [&] { return sum(mul(add(a, b), sub(a, b))); }, ps);
  check("scale/add_scalar", [&] { return sum(square(add_scalar(scale(a, 3.0), 0.5))); }, ps);
  check("mean/mean_rows", [&] { return add(mean(square(a)), sum(square(mean_rows(b)))); }, ps);
  check("relu/leaky", [&] { return sum(add(relu(a), leaky_relu(b, 0.1))); }, ps);
  check("gelu/tanh/sigmoid", [&] { return sum(add(add(gelu(a), tanh(b)), sigmoid(a))); }, ps);
  check("softplus/exp", [&] { return sum(add(softplus(a), exp(scale(b, 0.3)))); }, ps);
  check("log", [&] { return sum(log(pos)); }, pp);
  check("l2_norm", [&] { return l2_norm(a); }, ps);
  check("l2_normalize_rows", [&] { return sum(mul(l2_normalize_rows(a), b)); }, ps);
  check("softmax_rows", [&] { return sum(mul(softmax_rows(a, 0.5), b)); }, ps);
  check("layer_norm", [&] { return sum(mul(layer_norm(a, gamma, bias), b)); }, ps);
  check("conv1d", [&] { return sum(square(conv1d(a, w, 1))); }, ps);
  check("conv1d stride 2", [&] { return sum(square(conv1d(a, w, 2))); }, ps);
  check("conv1d_input_grad", [&] {
    Var g = conv1d(a, w, 1);
    return sum(mul(conv1d_input_grad(square(g), w, 1, 4), b));
  }, ps);
  check("pad/slice", [&] { return sum(square(slice_rows(pad_rows(a, 1, 2), 0, 5))); }, ps);
  check("slice/concat cols", [&] {
    std::vector<Var> parts{slice_cols(a, 0, 1), slice_cols(b, 1, 3)};
    return sum(square(concat_cols(parts)));
  }, ps);
  check("concat rows", [&] {
    std::vector<Var> parts{a, b};
    return sum(square(concat_rows(parts)));
  }, ps);
  check("sum_xlogx", [&] { return sum_xlogx(pos); }, pp);
  check("mask_rows", [&] { return sum(square(mask_rows(a, {true, false, true, false}, emb))); }, ps);
  check("add_bias", [&] { return sum(square(add_bias(a, bias))); }, ps);
}

TEST_CASE("Adam: first step from fresh state moves each coordinate by about lr against its gradient") {
  const AdamConfig cfg{0.9, 0.98, 1e-6, 0.0};
  std::vector<Tensor> params{Tensor::vector({1.0, -2.0, 0.5})};
  const std::vector<Tensor> grads{Tensor::vector({0.3, -4.0, 1e-2})};
  AdamState state(cfg, std::span<const Tensor>(params));
  const double lr = 0.01;
  adam_step(params, grads, state, lr);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  const std::vector<double> start{1.0, -2.0, 0.5};
  for (std::size_t i = 0; i < 3; ++i) {
    const double g = grads[0][i];
    const double expected = start[i] - lr * g / (std::abs(g) + 1e-6);
    CHECK(params[0][i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(state.step == 1);
}

TEST_CASE("Adam: decoupled weight decay and non-finite gradients") {
  std::vector<Tensor> params{Tensor::vector({2.0})};
  AdamState state(AdamConfig{0.9, 0.98, 1e-6, 0.01}, std::span<const Tensor>(params));
  adam_step(params, std::vector<Tensor>{Tensor::vector({0.0})}, state, 0.1);
  CHECK(params[0][0] == doctest::Approx(2.0 - 0.1 * 0.01 * 2.0).epsilon(1e-12));
  const auto before = state.m[0];
  CHECK_THROWS_AS(adam_step(params, std::vector<Tensor>{Tensor::vector({NAN})}, state, 0.1), Error);
  CHECK(state.m[0] == before);
  CHECK(state.step == 1);
}

TEST_CASE("learning-rate schedule: 8% warm-up then linear decay") {
  const ScheduleConfig s{5e-4, 400000, 0.08, 0.92};
  CHECK(lr_at(0, s) == 0.0);
  CHECK(lr_at(32000, s) == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(lr_at(16000, s) == doctest::Approx(2.5e-4).epsilon(1e-12));
  CHECK(lr_at(400000, s) == 0.0);
  CHECK(lr_at(216000, s) == doctest::Approx(2.5e-4).epsilon(1e-12));
  CHECK_THROWS_AS(lr_at(400001, s), Error);
}

TEST_CASE("checkpoint: tensors round-trip bit-exactly") {
  testutil::TempDir dir("ckpt");
  Rng rng(5);
  ParamSet ps;
  ps.add("w", random_tensor({3, 4}, rng));
  ps.add("b", random_tensor({4}, rng));
  save_tensors(dir.path(), ps.snapshot());
  const auto back = load_tensors(dir.path());
  CHECK(back.at("w") == ps.get("w").value());
  CHECK(back.at("b") == ps.get("b").value());
  CHECK(ps.scalar_count() == 16);
  CHECK_THROWS_AS(load_tensors(dir / "nope"), IoError);
}

TEST_CASE("shared parameters: copies of a ParamSet alias the same nodes") {
  ParamSet a;
  a.add("w", Tensor::vector({1.0}));
  ParamSet b = a;
  b.get("w").mutable_value()[0] = 5.0;
  CHECK(a.get("w").value()[0] == 5.0);
}
