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

#include "unitforge/config.hpp"

#include <functional>
#include <set>
#include <type_traits>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/rng.hpp"

namespace unitforge {
namespace {

using ojson = nlohmann::ordered_json;

// Walks a config struct in either direction: reads keys that are present
// (rejecting unknown ones) or writes every key.
class Binder {
 public:
  static Binder reader(const ojson& in, std::string where) { return Binder(&in, nullptr, std::move(where)); }
  static Binder writer(ojson& out) { return Binder(nullptr, &out, "config"); }

  bool reading() const { return in_ != nullptr; }

  template <class T>
  void operator()(const char* key, T& value) {
    if (!reading()) {
      (*out_)[key] = value;
      return;
    }
    const ojson* j = find(key);
    if (!j) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!j->is_boolean()) throw IoError(path(key) + ": expected a boolean");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!j->is_number_unsigned()) throw IoError(path(key) + ": expected a nonnegative integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!j->is_number_integer()) throw IoError(path(key) + ": expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!j->is_number()) throw IoError(path(key) + ": expected a number");
      }
      value = j->get<T>();
    } catch (const nlohmann::json::exception& ex) {
      throw IoError(path(key) + ": " + ex.what());
    }
  }

  void object(const char* key, const std::function<void(Binder&)>& body) {
    if (!reading()) {
      ojson child = ojson::object();
      Binder b(nullptr, &child, path(key));
      body(b);
      (*out_)[key] = std::move(child);
      return;
    }
    const ojson* j = find(key);
    if (!j) return;
    if (!j->is_object()) throw IoError(path(key) + ": expected an object");
    Binder b(j, nullptr, path(key));
    body(b);
    b.finish();
  }

  const ojson* raw(const char* key) { return reading() ? find(key) : nullptr; }
  void put(const char* key, ojson value) { (*out_)[key] = std::move(value); }
  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    if (!reading()) return;
    for (auto it = in_->begin(); it != in_->end(); ++it) {
      if (!seen_.count(it.key())) throw IoError(where_ + ": unknown key \"" + it.key() + "\"");
    }
  }

 private:
  Binder(const ojson* in, ojson* out, std::string where) : in_(in), out_(out), where_(std::move(where)) {}

  const ojson* find(const char* key) {
    seen_.insert(key);
    auto it = in_->find(key);
    return it == in_->end() ? nullptr : &*it;
  }

  const ojson* in_;
  ojson* out_;
  std::string where_;
  std::set<std::string> seen_;
};

void bind(Binder& b, evalsynth::HmmSynthConfig& c) {
  b("num_phones", c.num_phones);
  b("silence_id", c.silence_id);
  b("feature_dim", c.feature_dim);
  b("num_classes", c.num_classes);
  b("class_sep", c.class_sep);
  b("phone_sep", c.phone_sep);
  b("coupling", c.coupling);
  b("noise_sd", c.noise_sd);
  b("min_duration", c.min_duration);
  b("duration_continue", c.duration_continue);
  b("max_duration", c.max_duration);
  b("successors", c.successors);
  b("pause_prob", c.pause_prob);
  b("num_utterances", c.num_utterances);
  b("min_phones", c.min_phones);
  b("max_phones", c.max_phones);
  b("edge_silence", c.edge_silence);
  b("active_phones", c.active_phones);
  b("bigram", c.bigram);
  b("text_utterances", c.text_utterances);
  b("frame_rate", c.frame_rate);
}

void bind(Binder& b, nk::AdamConfig& a) {
  b("beta1", a.beta1);
  b("beta2", a.beta2);
  b("eps", a.eps);
  b("weight_decay", a.weight_decay);
}

void bind(Binder& b, uasr::UasrConfig& c) {
  b("steps", c.steps);
  b("silence_prob", c.silence_prob);
  b.object("generator", [&](Binder& g) {
    g("hidden_dim", c.generator.hidden_dim);
    g("kernel", c.generator.kernel);
    g("train_stride", c.generator.train_stride);
    g("aux_classes", c.generator.aux_classes);
    g("leaky_slope", c.generator.leaky_slope);
  });
  b.object("discriminator", [&](Binder& d) {
    d("hidden_dim", c.discriminator.hidden_dim);
    d("kernel", c.discriminator.kernel);
    d("num_layers", c.discriminator.num_layers);
    d("leaky_slope", c.discriminator.leaky_slope);
  });
  b.object("weights", [&](Binder& w) {
    w("gradient_penalty", c.weights.gradient_penalty);
    w("smoothness", c.weights.smoothness);
    w("diversity", c.weights.diversity);
    w("aux", c.weights.aux);
  });
  b.object("training", [&](Binder& o) {
    o("batch_size", c.options.batch_size);
    o("pool_runs", c.options.pool_runs);
    o("g_lr", c.options.g_lr);
    o("d_lr", c.options.d_lr);
    o.object("adam", [&](Binder& a) { bind(a, c.options.adam); });
  });
}

void bind(Binder& b, evalsynth::UnitOptions& u) {
  b("lt_top_k", u.lt_top_k);
  b.object("tree", [&](Binder& t) {
    t("max_leaves", u.tree.max_leaves);
    t("min_gain", u.tree.min_gain);
    t("min_occupancy", u.tree.min_occupancy);
    t("var_floor", u.tree.var_floor);
  });
  b("class_questions", u.class_questions);
  b("bpe_vocab", u.bpe_vocab);
  b.object("kmeans", [&](Binder& k) {
    k("k", u.kmeans.k);
    k("max_iters", u.kmeans.max_iters);
    k("tol", u.kmeans.tol);
    k("restarts", u.kmeans.restarts);
  });
  b("pc_layer", u.pc_layer);
}

void bind_backbone(Binder& b, BackboneConfig& backbone, std::size_t feature_dim) {
  if (!b.reading()) {
    b.put("backbone", ojson::parse(to_json_string(backbone)));
    return;
  }
  const ojson* j = b.raw("backbone");
  if (!j) return;
  if (j->is_string()) {
    const auto name = j->get<std::string>();
    if (name == "desk") {
      backbone = BackboneConfig::desk(feature_dim);
    } else if (name == "paper") {
      backbone = BackboneConfig::paper();
    } else {
      throw IoError(b.path("backbone") + ": unknown backbone preset \"" + name + "\"");
    }
  } else if (j->is_object()) {
    backbone = backbone_config_from_json(j->dump());
  } else {
    throw IoError(b.path("backbone") + ": expected a preset name or an object");
  }
}

void bind(Binder& b, PretrainConfig& p, std::size_t feature_dim) {
  bind_backbone(b, p.backbone, feature_dim);
  b.object("mask", [&](Binder& m) {
    m("start_prob", p.mask.start_prob);
    m("span_len", p.mask.span_len);
  });
  b.object("schedule", [&](Binder& s) {
    s("peak_lr", p.schedule.peak_lr);
    s("total_steps", p.schedule.total_steps);
    s("warmup_frac", p.schedule.warmup_frac);
    s("decay_frac", p.schedule.decay_frac);
  });
  b.object("adam", [&](Binder& a) { bind(a, p.adam); });
  b("temperature", p.temperature);
  b("embed_dim", p.embed_dim);
  b("batch_size", p.batch_size);
  b("grad_clip", p.grad_clip);
}

void bind(Binder& b, evalsynth::ProbeOptions& p) {
  b("test_fraction", p.test_fraction);
  b("steps", p.steps);
  b("lr", p.lr);
  b("layer", p.layer);
}

ojson parse_document(const std::string& text) {
  try {
    auto j = ojson::parse(text);
    if (!j.is_object()) throw IoError("config: top level must be an object");
    return j;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("config: malformed JSON: ") + ex.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

}  // namespace

RunConfig RunConfig::preset_named(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  cfg.pretrain.mask = MaskSpec{0.08, 10};
  cfg.pretrain.adam = nk::AdamConfig{0.9, 0.98, 1e-6, 0.01};
  if (name == "desk") {
    cfg.pretrain.backbone = BackboneConfig::desk(cfg.synth.feature_dim);
    cfg.pretrain.schedule = nk::ScheduleConfig{2e-3, 300, 0.08, 0.92};
    cfg.uasr.steps = 1000;
  } else if (name == "paper") {
    cfg.pretrain.backbone = BackboneConfig::paper();
    cfg.pretrain.schedule = nk::ScheduleConfig{5e-4, 400000, 0.08, 0.92};
    cfg.checkpoint_every = 10000;
  } else {
    throw IoError("unknown preset \"" + name + "\" (expected desk or paper)");
  }
  return cfg;
}

bool RunConfig::runnable() const {
  const auto& enc = pretrain.backbone.encoder;
  return enc.input_channels == synth.feature_dim && enc.total_stride() == 1;
}

void RunConfig::validate() const {
  synth.validate();
  if (synth.num_phones != PhonemeInventory::standard().size() ||
      synth.silence_id != PhonemeInventory::standard().silence_id) {
    throw Error("synth.num_phones and synth.silence_id must match the standard 40-symbol inventory");
  }
  uasr_config().validate();
  pretrain_config().validate();
  if (units.lt_top_k == 0) throw Error("units.lt_top_k must be positive");
  if (units.tree.max_leaves == 0) throw Error("units.tree.max_leaves must be positive");
  if (!(units.tree.var_floor > 0.0)) throw Error("units.tree.var_floor must be positive");
  if (units.bpe_vocab < static_cast<std::size_t>(synth.num_phones)) {
    throw Error("units.bpe_vocab must be at least the phone count");
  }
  if (units.kmeans.k == 0) throw Error("units.kmeans.k must be positive");
  if (units.kmeans.restarts == 0) throw Error("units.kmeans.restarts must be positive");
  if (!(probe.test_fraction > 0.0 && probe.test_fraction < 1.0)) throw Error("probe.test_fraction must be in (0, 1)");
  if (checkpoint_every == 0) throw Error("checkpoint_every must be positive");
  if (corpus_dir.empty() || output_dir.empty()) throw Error("paths.corpus and paths.output are required");
}

evalsynth::HmmSynthConfig RunConfig::synth_config() const {
  auto c = synth;
  c.seed = mix_seed(seed, 1);
  return c;
}

uasr::UasrConfig RunConfig::uasr_config() const {
  auto c = uasr;
  c.generator.input_dim = synth.feature_dim;
  c.generator.num_classes = static_cast<std::size_t>(synth.num_phones);
  c.discriminator.num_classes = static_cast<std::size_t>(synth.num_phones);
  c.silence_id = synth.silence_id;
  c.seed = mix_seed(seed, 2);
  return c;
}

evalsynth::UnitOptions RunConfig::unit_options() const {
  auto u = units;
  u.tree.num_phones = synth.num_phones;
  u.kmeans.seed = mix_seed(seed, 3);
  return u;
}

PretrainConfig RunConfig::pretrain_config() const {
  auto p = pretrain;
  p.seed = mix_seed(seed, 200);
  return p;
}

evalsynth::ProbeOptions RunConfig::probe_options() const {
  auto p = probe;
  p.seed = seed;
  return p;
}

std::uint64_t RunConfig::eval_mask_seed() const { return mix_seed(seed, 300); }

RunConfig run_config_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  const ojson doc = parse_document(text);
  std::string preset = "desk";
  if (auto it = doc.find("preset"); it != doc.end()) {
    if (!it->is_string()) throw IoError("config.preset: expected a string");
    preset = it->get<std::string>();
  }
  RunConfig cfg = RunConfig::preset_named(preset);
  if (!doc.contains("seed")) throw IoError("config.seed is required");

  Binder b = Binder::reader(doc, "config");
  b("seed", cfg.seed);
  b("preset", cfg.preset);
  b.object("paths", [&](Binder& p) {
    std::string corpus = cfg.corpus_dir.string();
    std::string output = cfg.output_dir.string();
    p("corpus", corpus);
    p("output", output);
    cfg.corpus_dir = corpus;
    cfg.output_dir = output;
  });
  b.object("synth", [&](Binder& s) { bind(s, cfg.synth); });
  // The desk backbone follows the feature dimension unless given explicitly.
  if (cfg.preset == "desk") cfg.pretrain.backbone = BackboneConfig::desk(cfg.synth.feature_dim);
  b.object("uasr", [&](Binder& u) { bind(u, cfg.uasr); });
  b.object("units", [&](Binder& u) { bind(u, cfg.units); });
  b.object("pretrain", [&](Binder& p) {
    bind(p, cfg.pretrain, cfg.synth.feature_dim);
    p("checkpoint_every", cfg.checkpoint_every);
  });
  b.object("probe", [&](Binder& p) { bind(p, cfg.probe); });
  b.finish();

  cfg.corpus_dir = resolve(cfg.corpus_dir, base_dir);
  cfg.output_dir = resolve(cfg.output_dir, base_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  auto base = std::filesystem::absolute(file).parent_path();
  return run_config_from_json(text, base);
}

std::string to_json_string(const RunConfig& cfg) {
  RunConfig c = cfg;
  ojson doc = ojson::object();
  Binder b = Binder::writer(doc);
  b("seed", c.seed);
  b("preset", c.preset);
  b.object("paths", [&](Binder& p) {
    std::string corpus = c.corpus_dir.generic_string();
    std::string output = c.output_dir.generic_string();
    p("corpus", corpus);
    p("output", output);
  });
  b.object("synth", [&](Binder& s) { bind(s, c.synth); });
  b.object("uasr", [&](Binder& u) { bind(u, c.uasr); });
  b.object("units", [&](Binder& u) { bind(u, c.units); });
  b.object("pretrain", [&](Binder& p) {
    bind(p, c.pretrain, c.synth.feature_dim);
    p("checkpoint_every", c.checkpoint_every);
  });
  b.object("probe", [&](Binder& p) { bind(p, c.probe); });
  return doc.dump(2);
}

}  // namespace unitforge
