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

#include "unitforge/config.hpp"
#include "unitforge/evalsynth/study.hpp"

using namespace unitforge;
using namespace unitforge::evalsynth;

namespace {

OracleCorpus small_corpus() {
  HmmSynthConfig sc;
  sc.num_utterances = 24;
  sc.seed = 2;
  return synth_corpus(sc);
}

StudyConfig small_study() {
  StudyConfig cfg;
  cfg.pretrain = RunConfig::preset_named("desk").pretrain_config();
  cfg.pretrain.schedule.total_steps = 10;
  cfg.units.lt_top_k = 20;
  cfg.units.tree.max_leaves = 60;
  cfg.units.bpe_vocab = 60;
  cfg.units.kmeans.k = 12;
  cfg.probe.steps = 20;
  return cfg;
}

}  // namespace

TEST_CASE("target-only scores of the true phones") {
  const auto c = small_corpus();
  const auto inv = PhonemeInventory::standard();
  const auto row = score_units("mono", mono_units(c.phone_labels(), inv), c);
  CHECK(row.ok);
  CHECK(row.vocab_size == 40);
  CHECK(row.purity == doctest::Approx(1.0));
  CHECK(row.inverse_purity == doctest::Approx(1.0));
  CHECK(row.nmi_phones == doctest::Approx(1.0));
  // True states refine phones, so NMI against states is below 1.
  CHECK(row.nmi_states < 1.0);
  CHECK(row.nmi_states > 0.5);
}

TEST_CASE("context units refine the phones") {
  const auto c = small_corpus();
  const auto inv = PhonemeInventory::standard();
  const auto mono = c.phone_labels();
  auto opts = small_study().units;
  opts.tree.num_phones = 40;
  const auto lt = lt_units(mono, opts, inv);
  const auto pt = pt_units(c.features(), mono, opts, inv);
  const auto pp = pp_units(mono, opts, inv);
  for (const auto* u : {&lt, &pt, &pp}) {
    const auto row = score_units(u->type, *u, c);
    CHECK(row.ok);
    CHECK(row.vocab_size <= 60);
    CHECK(u->vocab.size() == static_cast<std::size_t>(row.vocab_size));
    // Triphone and tied-state units sit inside one true phone; pieces span several.
    if (u != &pp) CHECK(row.purity == doctest::Approx(1.0));
    CHECK(row.nmi_phones > 0.5);
  }
}

TEST_CASE("compare_targets yields one row per pipeline in order") {
  const auto c = small_corpus();
  auto cfg = small_study();
  cfg.pipelines = {"mono", "pt", "pc", "bogus"};
  const auto report = compare_targets(c, c.phone_labels(), cfg);
  REQUIRE(report.rows.size() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(report.rows[i].name == cfg.pipelines[i]);
    CHECK(report.rows[i].ok);
    CHECK(report.rows[i].probe_accuracy > 0.0);
  }
  CHECK_FALSE(report.rows[3].ok);
  CHECK(!report.rows[3].error.empty());

  const auto back = MetricsReport::from_json(report.to_json());
  REQUIRE(back.rows.size() == 4);
  CHECK(back.rows[1].nmi_states == doctest::Approx(report.rows[1].nmi_states));
  CHECK(back.to_json() == report.to_json());
  CHECK(report.to_table().find("bogus") != std::string::npos);
}

TEST_CASE("block index helpers") {
  const auto desk = RunConfig::preset_named("desk").pretrain.backbone;
  CHECK(pc_layer_index(desk, -1) == 0);
  CHECK(pc_layer_index(desk, 1) == 1);
  CHECK_THROWS(pc_layer_index(desk, 2));
  CHECK(pc_layer_index(BackboneConfig::paper(), -1) == 5);
}
