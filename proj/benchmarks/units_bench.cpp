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
#include "unitforge/evalsynth/synth.hpp"
#include "unitforge/units/bpe.hpp"
#include "unitforge/units/kmeans.hpp"
#include "unitforge/units/tying.hpp"

namespace units = unitforge::units;

// Args: points, clusters.
static void BM_KMeansFit(benchmark::State& state) {
  unitforge::Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = bench::gaussian({n, 16}, rng);
  units::KMeansOptions opts;
  opts.k = static_cast<std::size_t>(state.range(1));
  opts.max_iters = 10;
  opts.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(units::kmeans_fit(pts, opts));
}
BENCHMARK(BM_KMeansFit)->Args({2000, 50})->Args({5000, 100})->Unit(benchmark::kMillisecond);

static unitforge::evalsynth::OracleCorpus& shared_corpus() {
  static auto corpus = [] {
    unitforge::evalsynth::HmmSynthConfig cfg;
    cfg.num_utterances = 200;
    cfg.seed = 5;
    return unitforge::evalsynth::synth_corpus(cfg);
  }();
  return corpus;
}

// Arg: vocabulary target.
static void BM_TrainBpe(benchmark::State& state) {
  const auto& text = shared_corpus().text;
  const auto target = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(units::train_bpe(text, target));
}
BENCHMARK(BM_TrainBpe)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_GrowTyingTree(benchmark::State& state) {
  const auto& corpus = shared_corpus();
  const auto stats = units::accumulate_triphone_stats(corpus.features(), corpus.phone_labels());
  const auto questions = units::singleton_questions(40);
  units::TreeOptions opts;
  opts.max_leaves = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(units::grow_tying_tree(stats, questions, opts));
}
BENCHMARK(BM_GrowTyingTree)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
