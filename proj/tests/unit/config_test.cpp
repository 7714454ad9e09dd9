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

#include <fstream>

#include "test_util.hpp"
#include "unitforge/config.hpp"
#include "unitforge/error.hpp"

using namespace unitforge;

TEST_CASE("presets") {
  const auto desk = RunConfig::preset_named("desk");
  CHECK(desk.runnable());
  CHECK(desk.pretrain.schedule.total_steps == 300);
  CHECK(desk.pretrain.mask.start_prob == doctest::Approx(0.08));
  CHECK(desk.pretrain.mask.span_len == 10);
  const auto paper = RunConfig::preset_named("paper");
  CHECK_FALSE(paper.runnable());
  CHECK(paper.pretrain.schedule.total_steps == 400000);
  CHECK(paper.pretrain.schedule.peak_lr == doctest::Approx(5e-4));
  CHECK(paper.pretrain.adam.beta2 == doctest::Approx(0.98));
  CHECK(paper.pretrain.adam.eps == doctest::Approx(1e-6));
  CHECK(paper.pretrain.adam.weight_decay == doctest::Approx(0.01));
  CHECK_THROWS_AS(RunConfig::preset_named("huge"), Error);
}

TEST_CASE("JSON round trip is a fixed point") {
  for (const char* name : {"desk", "paper"}) {
    auto cfg = RunConfig::preset_named(name);
    cfg.seed = 17;
    cfg.units.bpe_vocab = 77;
    const auto text = to_json_string(cfg);
    const auto back = run_config_from_json(text);
    CHECK(back.seed == 17);
    CHECK(back.preset == name);
    CHECK(back.units.bpe_vocab == 77);
    CHECK(to_json_string(back) == text);
  }
}

TEST_CASE("missing keys keep preset values, overrides apply") {
  const auto cfg = run_config_from_json(R"({"seed": 3, "pretrain": {"schedule": {"total_steps": 12}}})");
  CHECK(cfg.seed == 3);
  CHECK(cfg.pretrain.schedule.total_steps == 12);
  CHECK(cfg.pretrain.schedule.peak_lr == doctest::Approx(2e-3));
  CHECK(cfg.uasr.steps == RunConfig::preset_named("desk").uasr.steps);
}

TEST_CASE("errors: unknown keys, wrong types, missing seed, bad values") {
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": 1, "sinth": {}})"), IoError);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": 1, "uasr": {"weights": {"lambda": 1}}})"), IoError);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": "one"})"), IoError);
  CHECK_THROWS_AS(run_config_from_json(R"({"preset": "desk"})"), IoError);
  CHECK_THROWS_AS(run_config_from_json("{"), IoError);
  CHECK_THROWS_AS(run_config_from_json("[1]"), IoError);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": 1, "probe": {"test_fraction": 1.5}})"), Error);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": 1, "synth": {"num_phones": 30}})"), Error);
}

TEST_CASE("relative paths resolve against the config directory") {
  testutil::TempDir dir("config");
  {
    std::ofstream f(dir / "run.json");
    f << R"({"seed": 5, "paths": {"corpus": "c", "output": "/abs/out"}})";
  }
  const auto cfg = load_run_config(dir / "run.json");
  CHECK(cfg.corpus_dir == dir / "c");
  CHECK(cfg.output_dir == std::filesystem::path("/abs/out"));
  CHECK_THROWS_AS(load_run_config(dir / "nope.json"), IoError);
}

TEST_CASE("stage seeds are derived from the run seed") {
  auto a = RunConfig::preset_named("desk");
  auto b = a;
  b.seed = 1;
  CHECK(a.synth_config().seed != b.synth_config().seed);
  CHECK(a.synth_config().seed != a.uasr_config().seed);
  CHECK(a.uasr_config().silence_id == 0);
  CHECK(a.uasr_config().generator.num_classes == 40);
  CHECK(a.unit_options().tree.num_phones == 40);
  CHECK(a.eval_mask_seed() != a.pretrain_config().seed);
}
