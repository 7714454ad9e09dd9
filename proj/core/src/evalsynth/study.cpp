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


#include "unitforge/evalsynth/study.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/numkit/ops.hpp"

namespace unitforge::evalsynth {

UnitSet mono_units(const std::vector<FrameLabels>& mono, const PhonemeInventory& inventory) {
  UnitSet u{"mono", mono, inventory.symbols};
  for (auto& l : u.labels) {
    l.vocab_size = inventory.size();
    l.validate();
  }
  return u;
}

UnitSet lt_units(const std::vector<FrameLabels>& mono, const UnitOptions& opts, const PhonemeInventory& inventory,
                 units::LogicalTriphoneVocab* model) {
  std::vector<RunLengthSeq> runs;
  runs.reserve(mono.size());
  for (const auto& l : mono) runs.push_back(dedup_runs(l));
  const auto vocab = units::build_lt_vocab(runs, opts.lt_top_k, inventory.size(), inventory.silence_id);
  UnitSet u{"lt", {}, vocab.names(inventory)};
  for (const auto& l : mono) u.labels.push_back(units::label_lt(l, vocab));
  if (model) *model = vocab;
  return u;
}

std::vector<std::string> tree_state_names(const units::TiedStateTree& tree, const PhonemeInventory& inventory) {
  std::vector<std::string> names(static_cast<std::size_t>(tree.num_leaves));
  for (std::size_t c = 0; c < tree.trees.size(); ++c) {
    int ordinal = 0;
    std::vector<std::pair<int, int>> leaves;  // (leaf id, node)
    for (const auto& node : tree.trees[c]) {
      if (node.question < 0) leaves.emplace_back(node.leaf_id, 0);
    }
    std::sort(leaves.begin(), leaves.end());
    for (const auto& [id, unused] : leaves) {
      names[static_cast<std::size_t>(id)] = inventory.name_of(static_cast<int>(c)) + "-" + std::to_string(ordinal++);
    }
  }
  return names;
}

UnitSet pt_units(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& mono, const UnitOptions& opts,
                 const PhonemeInventory& inventory, units::TiedStateTree* model) {
  const auto stats = units::accumulate_triphone_stats(feats, mono, inventory.silence_id);
  auto questions = units::singleton_questions(inventory.size(), &inventory);
  if (opts.class_questions) {
    auto extra = units::clustered_phone_questions(stats, inventory.size());
    questions.insert(questions.end(), extra.begin(), extra.end());
  }
  units::TreeOptions tree_opts = opts.tree;
  tree_opts.num_phones = inventory.size();
  const auto tree = units::grow_tying_tree(stats, questions, tree_opts);
  UnitSet u{"pt", {}, tree_state_names(tree, inventory)};
  for (const auto& l : mono) u.labels.push_back(units::label_pt(l, tree, inventory.silence_id));
  if (model) *model = tree;
  return u;
}

UnitSet pp_units(const std::vector<FrameLabels>& mono, const UnitOptions& opts, const PhonemeInventory& inventory,
                 units::BpeModel* model) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(mono.size());
  for (const auto& l : mono) seqs.push_back(dedup_runs(l).symbols);
  const auto bpe = units::train_bpe(seqs, opts.bpe_vocab, inventory.size(), inventory.silence_id);
  UnitSet u{"pp", {}, bpe.names(inventory)};
  for (const auto& l : mono) u.labels.push_back(units::label_pp(l, bpe));
  if (model) *model = bpe;
  return u;
}

std::size_t pc_layer_index(const BackboneConfig& cfg, int requested) {
  const std::size_t layers = cfg.context.num_layers;
  if (layers == 0) throw Error("backbone has no transformer blocks");
  if (requested < 0) return layers / 2 == 0 ? 0 : layers / 2 - 1;
  if (static_cast<std::size_t>(requested) >= layers) throw Error("pc_layer out of range");
  return static_cast<std::size_t>(requested);
}

std::vector<FeatureSeq> hidden_states(const Backbone& backbone, const std::vector<FeatureSeq>& feats, int layer) {
  const std::size_t index =
      layer < 0 ? backbone.config().context.num_layers - 1 : static_cast<std::size_t>(layer);
  std::vector<FeatureSeq> out;
  out.reserve(feats.size());
  for (const auto& f : feats) out.push_back(backbone.layer_features(f, index));
  return out;
}

UnitSet pc_units(const Backbone& monobert, const std::vector<FeatureSeq>& feats, const UnitOptions& opts,
                 units::KMeansModel* model) {
  const std::size_t layer = pc_layer_index(monobert.config(), opts.pc_layer);
  const auto hidden = hidden_states(monobert, feats, static_cast<int>(layer));
  const auto fit = units::kmeans_fit(units::stack_frames(hidden), opts.kmeans);
  UnitSet u{"pc", {}, {}};
  for (std::size_t c = 0; c < fit.model.k(); ++c) u.vocab.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < hidden.size(); ++i) u.labels.push_back(units::label_pc(hidden[i], fit.model));
  if (model) *model = fit.model;
  return u;
}

PipelineRow score_units(const std::string& name, const UnitSet& units, const OracleCorpus& corpus) {
  PipelineRow row;
  row.name = name;
  row.vocab_size = static_cast<int>(units.vocab.size());
  const auto phones = corpus.phone_labels();
  const auto states = corpus.state_labels();
  row.usage = vocab_usage(units.labels);
  row.purity = purity(units.labels, phones);
  row.inverse_purity = inverse_purity(units.labels, phones);
  row.nmi_phones = nmi(units.labels, phones);
  row.nmi_states = nmi(units.labels, states);
  row.ok = true;
  return row;
}

void score_model(PipelineRow& row, const Backbone& backbone, const PredictorHead& head, const UnitSet& units,
                 const OracleCorpus& corpus, const MaskSpec& mask, const ProbeOptions& probe, std::uint64_t mask_seed) {
  const auto feats = corpus.features();
  row.masked_accuracy = masked_prediction_accuracy(backbone, head, feats, units.labels, mask, mask_seed);
  row.probe_accuracy = linear_probe(
      hidden_states(backbone, feats, static_cast<int>(pc_layer_index(backbone.config(), probe.layer))), corpus.phone_labels(), probe).test_accuracy;
}

namespace {

PipelineRow run_pipeline(const std::string& name, const UnitSet& units, const OracleCorpus& corpus,
                         const StudyConfig& cfg, std::optional<PretrainResult>* keep) {
  PipelineRow row = score_units(name, units, corpus);
  PretrainConfig pc = cfg.pretrain;
  pc.seed = mix_seed(cfg.seed, 200);
  PretrainResult trained = pretrain(corpus.features(), units.labels, pc);
  row.final_loss = trained.loss_log.empty() ? 0.0 : trained.loss_log.back();
  score_model(row, trained.backbone, trained.head, units, corpus, cfg.pretrain.mask, cfg.probe,
              mix_seed(cfg.seed, 300));
  if (keep) keep->emplace(std::move(trained));
  return row;
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

MetricsReport compare_targets(const OracleCorpus& corpus, const std::vector<FrameLabels>& mono,
                              const StudyConfig& cfg) {
  const PhonemeInventory inventory = PhonemeInventory::standard();
  const auto feats = corpus.features();
  MetricsReport report;
  std::optional<PretrainResult> monobert;
  for (const auto& name : cfg.pipelines) {
    try {
      UnitSet units;
      if (name == "mono") {
        units = mono_units(mono, inventory);
      } else if (name == "lt") {
        units = lt_units(mono, cfg.units, inventory);
      } else if (name == "pt") {
        units = pt_units(feats, mono, cfg.units, inventory);
      } else if (name == "pp") {
        units = pp_units(mono, cfg.units, inventory);
      } else if (name == "pc") {
        if (!monobert) {
          PretrainConfig pc = cfg.pretrain;
          pc.seed = mix_seed(cfg.seed, 200);
          monobert.emplace(pretrain(feats, mono_units(mono, inventory).labels, pc));
        }
        units = pc_units(monobert->backbone, feats, cfg.units);
      } else {
        throw Error("unknown unit type: " + name);
      }
      for (std::size_t i = 0; i < units.labels.size(); ++i) units.labels[i].utt_id = corpus.utts[i].id;
      report.rows.push_back(run_pipeline(name, units, corpus, cfg, name == "mono" ? &monobert : nullptr));
    } catch (const std::exception& ex) {
      PipelineRow row;
      row.name = name;
      row.error = ex.what();
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["name"] = r.name;
    o["ok"] = r.ok;
    if (!r.ok) {
      o["error"] = r.error;
    } else {
      o["vocab_size"] = r.vocab_size;
      o["units_used"] = r.usage.used;
      o["perplexity"] = r.usage.perplexity;
      o["purity"] = r.purity;
      o["inverse_purity"] = r.inverse_purity;
      o["nmi_phones"] = r.nmi_phones;
      o["nmi_states"] = r.nmi_states;
      o["masked_accuracy"] = r.masked_accuracy;
      o["probe_accuracy"] = r.probe_accuracy;
      o["final_loss"] = r.final_loss;
    }
    j["rows"].push_back(o);
  }
  return j.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  MetricsReport report;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& o : j.at("rows")) {
      PipelineRow r;
      r.name = o.at("name").get<std::string>();
      r.ok = o.at("ok").get<bool>();
      if (!r.ok) {
        r.error = o.value("error", std::string());
      } else {
        r.vocab_size = o.at("vocab_size").get<int>();
        r.usage.used = o.at("units_used").get<std::size_t>();
        r.usage.perplexity = o.at("perplexity").get<double>();
        r.purity = o.at("purity").get<double>();
        r.inverse_purity = o.at("inverse_purity").get<double>();
        r.nmi_phones = o.at("nmi_phones").get<double>();
        r.nmi_states = o.at("nmi_states").get<double>();
        r.masked_accuracy = o.at("masked_accuracy").get<double>();
        r.probe_accuracy = o.at("probe_accuracy").get<double>();
        r.final_loss = o.at("final_loss").get<double>();
      }
      report.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed metrics report: ") + ex.what());
  }
  return report;
}

std::string MetricsReport::to_table() const {
  const std::vector<std::string> header{"pipeline", "vocab", "used",    "ppl",     "purity", "inv_pur",
                                        "nmi_ph",   "nmi_st", "mask_acc", "probe", "loss"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    if (!r.ok) {
      cells.push_back({r.name, "error: " + r.error});
      continue;
    }
    cells.push_back({r.name, std::to_string(r.vocab_size), std::to_string(r.usage.used), fmt(r.usage.perplexity, 1),
                     fmt(r.purity), fmt(r.inverse_purity), fmt(r.nmi_phones), fmt(r.nmi_states),
                     fmt(r.masked_accuracy), fmt(r.probe_accuracy), fmt(r.final_loss, 3)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    if (row.size() != header.size()) continue;
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      if (row.size() != header.size()) {
        out << row[c];
        continue;
      }
      // Names left-aligned, numbers right-aligned.
      const std::string pad(width[c] - row[c].size(), ' ');
      out << (c == 0 ? row[c] + pad : pad + row[c]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace unitforge::evalsynth
