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

#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "unitforge/numkit/autodiff.hpp"
#include "unitforge/numkit/ops.hpp"

namespace nk = unitforge::nk;

// Args: frames, channels.
static void BM_Conv1dForward(benchmark::State& state) {
  unitforge::Rng rng(1);
  const auto t = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto x = nk::constant(bench::gaussian({t, d}, rng));
  const auto w = nk::constant(bench::gaussian({3, d, d}, rng));
  for (auto _ : state) benchmark::DoNotOptimize(nk::conv1d(x, w, 2).value());
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * t));
}
BENCHMARK(BM_Conv1dForward)->Args({400, 16})->Args({400, 64})->Args({1600, 64});

static void BM_Conv1dBackward(benchmark::State& state) {
  unitforge::Rng rng(2);
  const auto t = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto xv = bench::gaussian({t, d}, rng);
  const auto wv = bench::gaussian({3, d, d}, rng);
  for (auto _ : state) {
    auto x = nk::parameter(xv);
    auto w = nk::parameter(wv);
    nk::backward(nk::sum(nk::conv1d(x, w, 2)));
    benchmark::DoNotOptimize(w.grad());
  }
}
BENCHMARK(BM_Conv1dBackward)->Args({400, 16})->Args({400, 64});

static void BM_Matmul(benchmark::State& state) {
  unitforge::Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = nk::constant(bench::gaussian({n, n}, rng));
  const auto b = nk::constant(bench::gaussian({n, n}, rng));
  for (auto _ : state) benchmark::DoNotOptimize(nk::matmul(a, b).value());
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * 2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);
