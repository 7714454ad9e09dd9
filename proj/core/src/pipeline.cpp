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

#include "unitforge/pipeline.hpp"

#include <algorithm>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/evalsynth/study.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/units/serialize.hpp"

namespace unitforge::pipeline {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void clear_dir(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (ec) throw IoError("cannot clear " + dir.string() + ": " + ec.message());
}

void require(bool ok, const std::string& what, const std::string& command) {
  if (!ok) throw PrerequisiteError(what + "; run `unitforge " + command + "` first", command);
}

evalsynth::OracleCorpus load_corpus(const Layout& layout) {
  require(fs::exists(layout.corpus / "manifest.json"), "no corpus at " + layout.corpus.string(), "synth");
  return evalsynth::read_corpus(layout.corpus, PhonemeInventory::standard());
}

void check_runnable(const RunConfig& cfg) {
  if (!cfg.runnable()) {
    throw Error("preset \"" + cfg.preset +
                "\" describes a waveform backbone and cannot train on the feature corpus; use the desk preset");
  }
}

// Unit files are written in corpus order; anything else means the corpus
// was regenerated after the units.
void check_order(const std::vector<FrameLabels>& labels, const evalsynth::OracleCorpus& corpus,
                 const fs::path& file) {
  if (labels.size() != corpus.utts.size()) {
    throw IoError(file.string() + ": " + std::to_string(labels.size()) + " utterances, corpus has " +
                  std::to_string(corpus.utts.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].utt_id != corpus.utts[i].id) {
      throw IoError(file.string() + ": utterance " + labels[i].utt_id + " out of corpus order");
    }
    validate_alignment(labels[i], corpus.utts[i].feats);
  }
}

evalsynth::UnitSet load_units(const Layout& layout, const std::string& type, const evalsynth::OracleCorpus& corpus) {
  require(fs::exists(layout.unit_file(type)) && fs::exists(layout.vocab_file(type)),
          "no " + type + " units", "gen-units --type " + type);
  evalsynth::UnitSet u;
  u.type = type;
  u.vocab = read_vocab_file(layout.vocab_file(type));
  u.labels = read_unit_file(layout.unit_file(type), static_cast<int>(u.vocab.size()));
  check_order(u.labels, corpus, layout.unit_file(type));
  return u;
}

void write_units(const Layout& layout, const evalsynth::UnitSet& units, const evalsynth::OracleCorpus& corpus) {
  auto labels = units.labels;
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i].utt_id = corpus.utts[i].id;
  write_unit_file(layout.unit_file(units.type), labels);
  write_vocab_file(layout.vocab_file(units.type), units.vocab);
}

ordered_json state_json(const std::string& type, std::size_t step, std::size_t total, bool complete) {
  ordered_json j;
  j["type"] = type;
  j["step"] = step;
  j["total_steps"] = total;
  j["complete"] = complete;
  return j;
}

bool model_complete(const Layout& layout, const std::string& type) {
  const fs::path state = layout.model_dir(type) / "state.json";
  if (!fs::exists(state)) return false;
  try {
    return nlohmann::json::parse(read_text_file(state)).at("complete").get<bool>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed " + state.string() + ": " + ex.what());
  }
}

void save_model(const fs::path& dir, const Backbone& backbone, const PredictorHead& head) {
  backbone.save(dir / "backbone");
  save_head(dir / "head", head);
}

ordered_json loss_log_json(const std::vector<double>& log) {
  ordered_json j = ordered_json::array();
  for (double v : log) j.push_back(v);
  return j;
}

}  // namespace

void check_unit_type(const std::string& type) {
  if (std::find(kUnitTypes.begin(), kUnitTypes.end(), type) == kUnitTypes.end()) {
    throw Error("unknown unit type \"" + type + "\" (expected mono, lt, pt, pp or pc)");
  }
}

void synth(const RunConfig& cfg, std::ostream* log) {
  const Layout layout(cfg);
  const auto corpus = evalsynth::synth_corpus(cfg.synth_config());
  clear_dir(layout.corpus / "feats");
  evalsynth::write_corpus(layout.corpus, corpus, PhonemeInventory::standard());
  std::size_t frames = 0;
  for (const auto& u : corpus.utts) frames += u.feats.num_frames();
  say(log, "synth: " + std::to_string(corpus.utts.size()) + " utterances, " + std::to_string(frames) +
               " frames, " + std::to_string(corpus.text.size()) + " text lines -> " + layout.corpus.string());
}

void train_uasr(const RunConfig& cfg, std::ostream* log) {
  const Layout layout(cfg);
  const auto corpus = load_corpus(layout);
  clear_dir(layout.uasr_dir());
  make_dirs(layout.uasr_dir());
  uasr::GeneratorHook hook;
  hook.every = cfg.checkpoint_every;
  hook.save = [&](const uasr::Generator& g, std::size_t) { g.save(layout.generator_dir()); };
  const auto result = uasr::train_uasr(corpus.features(), corpus.text, cfg.uasr_config(), hook);
  result.generator.save(layout.generator_dir());

  ordered_json j = ordered_json::array();
  for (const auto& b : result.log) {
    ordered_json o;
    o["d_total"] = b.d_total;
    o["d_real"] = b.d_real;
    o["d_fake"] = b.d_fake;
    o["d_penalty"] = b.d_penalty;
    o["d_accuracy"] = b.d_accuracy;
    o["g_total"] = b.g_total;
    o["g_adv"] = b.g_adv;
    o["g_smooth"] = b.g_smooth;
    o["g_diversity"] = b.g_diversity;
    o["g_aux"] = b.g_aux;
    j.push_back(o);
  }
  write_text_file(layout.uasr_dir() / "loss_log.json", j.dump(1) + "\n");
  say(log, "train-uasr: " + std::to_string(result.log.size()) + " steps -> " + layout.generator_dir().string());
}

void gen_units(const RunConfig& cfg, const std::string& type, std::ostream* log) {
  check_unit_type(type);
  const Layout layout(cfg);
  const auto corpus = load_corpus(layout);
  const auto inventory = PhonemeInventory::standard();
  const auto opts = cfg.unit_options();
  const fs::path dir = layout.units_dir(type);

  evalsynth::UnitSet units;
  if (type == "mono") {
    require(fs::exists(layout.generator_dir() / "generator.json"), "no trained uasr generator", "train-uasr");
    const auto g = uasr::Generator::load(layout.generator_dir());
    std::vector<FrameLabels> labels;
    for (const auto& u : corpus.utts) labels.push_back(uasr::frame_phoneme_labels(g, u.feats, u.id));
    units = evalsynth::mono_units(labels, inventory);
    clear_dir(dir);
    make_dirs(dir);
    g.save(dir / "generator");
  } else if (type == "pc") {
    require(model_complete(layout, "mono"), "no trained MonoBERT checkpoint", "pretrain --type mono");
    const auto monobert = Backbone::load(layout.model_dir("mono") / "backbone");
    units::KMeansModel km;
    units = evalsynth::pc_units(monobert, corpus.features(), opts, &km);
    clear_dir(dir);
    make_dirs(dir);
    units::save_kmeans(dir / "kmeans", km);
  } else {
    const auto mono = load_units(layout, "mono", corpus).labels;
    if (type == "lt") {
      units::LogicalTriphoneVocab model;
      units = evalsynth::lt_units(mono, opts, inventory, &model);
      clear_dir(dir);
      make_dirs(dir);
      units::save_lt_vocab(dir / "lt_vocab.json", model);
    } else if (type == "pt") {
      units::TiedStateTree tree;
      units = evalsynth::pt_units(corpus.features(), mono, opts, inventory, &tree);
      clear_dir(dir);
      make_dirs(dir);
      units::save_tree(dir / "tree.json", tree);
    } else {
      units::BpeModel bpe;
      units = evalsynth::pp_units(mono, opts, inventory, &bpe);
      clear_dir(dir);
      make_dirs(dir);
      units::save_bpe(dir / "bpe.json", bpe);
    }
  }
  write_units(layout, units, corpus);
  say(log, "gen-units " + type + ": vocab " + std::to_string(units.vocab.size()) + " -> " + dir.string());
}

void pretrain(const RunConfig& cfg, const std::string& type, std::ostream* log) {
  check_unit_type(type);
  check_runnable(cfg);
  const Layout layout(cfg);
  const auto corpus = load_corpus(layout);
  const auto units = load_units(layout, type, corpus);
  const fs::path dir = layout.model_dir(type);
  clear_dir(dir);
  make_dirs(dir);

  PretrainConfig pc = cfg.pretrain_config();
  const auto total = static_cast<std::size_t>(pc.schedule.total_steps);
  CheckpointHook hook;
  hook.every = cfg.checkpoint_every;
  hook.save = [&](const Backbone& b, const PredictorHead& h, std::size_t step) {
    save_model(dir, b, h);
    write_text_file(dir / "state.json", state_json(type, step, total, false).dump(2) + "\n");
  };
  const auto result = unitforge::pretrain(corpus.features(), units.labels, pc, hook);
  save_model(dir, result.backbone, result.head);
  write_text_file(dir / "loss_log.json", loss_log_json(result.loss_log).dump(1) + "\n");
  write_text_file(dir / "state.json", state_json(type, result.loss_log.size(), total, true).dump(2) + "\n");
  say(log, "pretrain " + type + ": " + std::to_string(result.loss_log.size()) + " updates, final loss " +
               std::to_string(result.loss_log.empty() ? 0.0 : result.loss_log.back()) + " -> " + dir.string());
}

void eval(const RunConfig& cfg, const std::string& type, std::ostream* log) {
  check_unit_type(type);
  const Layout layout(cfg);
  const auto corpus = load_corpus(layout);
  const auto units = load_units(layout, type, corpus);
  require(model_complete(layout, type), "no trained model for " + type + " units", "pretrain --type " + type);
  const fs::path dir = layout.model_dir(type);
  const auto backbone = Backbone::load(dir / "backbone");
  const auto head = load_head(dir / "head");

  auto row = evalsynth::score_units(type, units, corpus);
  evalsynth::score_model(row, backbone, head, units, corpus, cfg.pretrain.mask, cfg.probe_options(),
                         cfg.eval_mask_seed());
  try {
    const auto losses = nlohmann::json::parse(read_text_file(dir / "loss_log.json"));
    if (!losses.empty()) row.final_loss = losses.back().get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed " + (dir / "loss_log.json").string() + ": " + ex.what());
  }
  make_dirs(layout.eval_file(type).parent_path());
  evalsynth::MetricsReport one;
  one.rows.push_back(row);
  write_text_file(layout.eval_file(type), one.to_json() + "\n");
  say(log, "eval " + type + ": nmi_states " + std::to_string(row.nmi_states) + ", probe " +
               std::to_string(row.probe_accuracy) + " -> " + layout.eval_file(type).string());
}

std::string report(const RunConfig& cfg, std::ostream* log) {
  const Layout layout(cfg);
  evalsynth::MetricsReport rep;
  std::size_t found = 0;
  for (const char* type : kUnitTypes) {
    const fs::path file = layout.eval_file(type);
    if (!fs::exists(file)) {
      evalsynth::PipelineRow row;
      row.name = type;
      row.error = std::string("not evaluated (unitforge eval --type ") + type + ")";
      rep.rows.push_back(row);
      continue;
    }
    const auto one = evalsynth::MetricsReport::from_json(read_text_file(file));
    if (one.rows.size() != 1 || one.rows.front().name != type) throw IoError("unexpected contents in " + file.string());
    rep.rows.push_back(one.rows.front());
    ++found;
  }
  require(found > 0, "no evaluation results", "eval --type mono");
  const std::string table = rep.to_table();
  write_text_file(layout.report_json(), rep.to_json() + "\n");
  write_text_file(layout.report_text(), table);
  say(log, "report: " + std::to_string(found) + " of " + std::to_string(kUnitTypes.size()) +
               " unit types evaluated -> " + layout.report_json().string());
  return table;
}

std::string run_all(const RunConfig& cfg, std::ostream* log) {
  synth(cfg, log);
  train_uasr(cfg, log);
  gen_units(cfg, "mono", log);
  pretrain(cfg, "mono", log);
  for (const char* type : kUnitTypes) {
    const std::string t = type;
    if (t != "mono") {
      gen_units(cfg, t, log);
      pretrain(cfg, t, log);
    }
  }
  for (const char* type : kUnitTypes) eval(cfg, type, log);
  return report(cfg, log);
}

}  // namespace unitforge::pipeline
