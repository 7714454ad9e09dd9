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
#include "unitforge/backbone.hpp"

namespace nk = unitforge::nk;

// Arg: frames. Unmasked forward of the small feature-input model.
static void BM_DeskForward(benchmark::State& state) {
  unitforge::Rng rng(6);
  const auto t = static_cast<std::size_t>(state.range(0));
  unitforge::Backbone model(unitforge::BackboneConfig::desk(16), 7);
  const auto input = nk::constant(bench::gaussian({t, 16}, rng));
  unitforge::MaskSet mask;
  mask.masked.assign(t, false);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(input, mask).value());
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * t));
}
BENCHMARK(BM_DeskForward)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

// One second of waveform through the narrow-channel encoder.
static void BM_WaveformEncode(benchmark::State& state) {
  unitforge::Rng rng(8);
  auto cfg = unitforge::BackboneConfig::desk(16);
  cfg.encoder = unitforge::EncoderConfig::desk_waveform(16);
  unitforge::Backbone model(cfg, 9);
  const auto input = nk::constant(bench::gaussian({16000, 1}, rng));
  for (auto _ : state) benchmark::DoNotOptimize(model.encode(input).value());
}
BENCHMARK(BM_WaveformEncode)->Unit(benchmark::kMillisecond);
