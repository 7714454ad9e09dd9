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
#include <cstdint>
#include <string>
#include <vector>

#include "unitforge/backbone.hpp"
#include "unitforge/evalsynth/metrics.hpp"
#include "unitforge/evalsynth/probe.hpp"
#include "unitforge/evalsynth/synth.hpp"
#include "unitforge/pretrain.hpp"
#include "unitforge/units/bpe.hpp"
#include "unitforge/units/kmeans.hpp"
#include "unitforge/units/triphone.hpp"
#include "unitforge/units/tying.hpp"

// Target generation for the five unit types and the side-by-side study.
namespace unitforge::evalsynth {

struct UnitOptions {
  std::size_t lt_top_k = 500;
  units::TreeOptions tree;
  bool class_questions = true;
  std::size_t bpe_vocab = 500;
  units::KMeansOptions kmeans;
  int pc_layer = -1;  // transformer block feeding k-means; -1 picks the middle one
};

struct UnitSet {
  std::string type;
  std::vector<FrameLabels> labels;
  std::vector<std::string> vocab;  // names, index = id
};

UnitSet mono_units(const std::vector<FrameLabels>& mono, const PhonemeInventory& inventory);
UnitSet lt_units(const std::vector<FrameLabels>& mono, const UnitOptions& opts, const PhonemeInventory& inventory,
                 units::LogicalTriphoneVocab* model = nullptr);
UnitSet pt_units(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& mono, const UnitOptions& opts,
                 const PhonemeInventory& inventory, units::TiedStateTree* model = nullptr);
UnitSet pp_units(const std::vector<FrameLabels>& mono, const UnitOptions& opts, const PhonemeInventory& inventory,
                 units::BpeModel* model = nullptr);
UnitSet pc_units(const Backbone& monobert, const std::vector<FeatureSeq>& feats, const UnitOptions& opts,
                 units::KMeansModel* model = nullptr);

// "c-N" names: centre phone plus leaf ordinal within its tree.
std::vector<std::string> tree_state_names(const units::TiedStateTree& tree, const PhonemeInventory& inventory);
std::size_t pc_layer_index(const BackboneConfig& cfg, int requested);
// Unmasked outputs of block `layer` (-1: last) for each input.
std::vector<FeatureSeq> hidden_states(const Backbone& backbone, const std::vector<FeatureSeq>& feats, int layer = -1);

struct PipelineRow {
  std::string name;
  bool ok = false;
  std::string error;
  int vocab_size = 0;
  VocabUsage usage;
  double purity = 0.0;          // against true phones
  double inverse_purity = 0.0;  // against true phones
  double nmi_phones = 0.0;
  double nmi_states = 0.0;
  double masked_accuracy = 0.0;
  double probe_accuracy = 0.0;
  double final_loss = 0.0;
};

struct MetricsReport {
  std::vector<PipelineRow> rows;

  std::string to_json() const;
  std::string to_table() const;
  static MetricsReport from_json(const std::string& text);
};

// Target-only metrics (no training): purity, NMI, usage.
PipelineRow score_units(const std::string& name, const UnitSet& units, const OracleCorpus& corpus);
// Adds masked accuracy and the phone probe for a trained model.
void score_model(PipelineRow& row, const Backbone& backbone, const PredictorHead& head, const UnitSet& units,
                 const OracleCorpus& corpus, const MaskSpec& mask, const ProbeOptions& probe,
                 std::uint64_t mask_seed);

struct StudyConfig {
  PretrainConfig pretrain;
  UnitOptions units;
  ProbeOptions probe;
  std::vector<std::string> pipelines{"mono", "lt", "pt", "pp", "pc"};
  std::uint64_t seed = 0;
};

// Builds each requested target set from the monophone labels, trains the
// small backbone on it and scores it. A failing pipeline yields a row with
// ok = false. "pc" reuses the model trained on "mono" (trained on demand).
MetricsReport compare_targets(const OracleCorpus& corpus, const std::vector<FrameLabels>& mono,
                              const StudyConfig& cfg);

}  // namespace unitforge::evalsynth
