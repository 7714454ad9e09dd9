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


#include "unitforge/evalsynth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"
#include "unitforge/rng.hpp"

namespace unitforge::evalsynth {
namespace {

std::vector<double> unit_direction(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::string utt_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt%05zu", i);
  return buf;
}

struct Emission {
  std::vector<std::vector<double>> phone_mean;
  std::vector<std::vector<double>> left_shift;   // per class
  std::vector<std::vector<double>> right_shift;  // per class
};

Emission make_emission(const HmmSynthConfig& cfg, const std::vector<int>& classes, Rng& rng) {
  const std::size_t dim = cfg.feature_dim;
  const auto ncls = static_cast<std::size_t>(cfg.class_count());
  std::vector<std::vector<double>> class_dir(ncls);
  for (auto& d : class_dir) d = unit_direction(rng, dim);
  Emission e;
  e.phone_mean.resize(static_cast<std::size_t>(cfg.num_phones));
  for (int p = 0; p < cfg.num_phones; ++p) {
    const auto& a = class_dir[static_cast<std::size_t>(classes[static_cast<std::size_t>(p)])];
    const auto b = unit_direction(rng, dim);
    auto& mu = e.phone_mean[static_cast<std::size_t>(p)];
    mu.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) mu[d] = cfg.class_sep * a[d] + cfg.phone_sep * b[d];
  }
  for (std::size_t g = 0; g < ncls; ++g) e.left_shift.push_back(unit_direction(rng, dim));
  for (std::size_t g = 0; g < ncls; ++g) e.right_shift.push_back(unit_direction(rng, dim));
  return e;
}

// Symbol sequence with `n` non-silence phones (plus any pauses).
std::vector<int> sample_symbols(const HmmSynthConfig& cfg, const std::vector<std::vector<double>>& bigram,
                                const std::vector<int>& active, int n, Rng& rng) {
  std::vector<int> seq;
  int prev = cfg.silence_id;
  int phones = 0;
  while (phones < n) {
    int next = 0;
    if (seq.empty()) {
      next = active[rng.uniform_int(active.size())];
    } else {
      next = static_cast<int>(rng.categorical(bigram[static_cast<std::size_t>(prev)]));
    }
    if (next == cfg.silence_id && phones + 1 == n) continue;  // no trailing pause before the end
    seq.push_back(next);
    if (next != cfg.silence_id) ++phones;
    prev = next;
  }
  return seq;
}

}  // namespace

void HmmSynthConfig::validate() const {
  if (num_phones < 2) throw Error("synth: need at least two phones");
  if (silence_id < 0 || silence_id >= num_phones) throw Error("synth: silence_id out of range");
  if (feature_dim == 0) throw Error("synth: feature_dim must be positive");
  if (num_classes < 1) throw Error("synth: need at least one context class");
  if (coupling < 0.0 || noise_sd <= 0.0) throw Error("synth: coupling must be >= 0 and noise_sd > 0");
  if (min_duration < 1 || max_duration < min_duration) throw Error("synth: durations must be >= 1 and ordered");
  if (!(duration_continue >= 0.0 && duration_continue < 1.0)) throw Error("synth: duration_continue must be in [0, 1)");
  if (!(pause_prob >= 0.0 && pause_prob < 1.0)) throw Error("synth: pause_prob must be in [0, 1)");
  if (min_phones < 1 || max_phones < min_phones) throw Error("synth: phone counts must be >= 1 and ordered");
  if (successors < 1) throw Error("synth: successors must be positive");
  if (num_utterances == 0) throw Error("synth: num_utterances must be positive");
  const auto active = phones_in_use();
  if (active.size() < 2) throw Error("synth: need at least two active phones");
  for (int p : active) {
    if (p < 0 || p >= num_phones || p == silence_id) throw Error("synth: bad active phone " + std::to_string(p));
  }
  if (!bigram.empty()) {
    if (bigram.size() != static_cast<std::size_t>(num_phones)) throw Error("synth: bigram must be num_phones square");
    for (const auto& row : bigram) {
      if (row.size() != static_cast<std::size_t>(num_phones)) throw Error("synth: bigram must be num_phones square");
      double s = 0.0;
      for (double v : row) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("synth: invalid probabilities in bigram");
        s += v;
      }
      if (std::abs(s - 1.0) > 1e-9) throw Error("synth: invalid probabilities, bigram row sums to " + std::to_string(s));
    }
  }
}

std::vector<int> HmmSynthConfig::phones_in_use() const {
  if (!active_phones.empty()) {
    std::vector<int> a = active_phones;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  }
  std::vector<int> a;
  for (int p = 0; p < num_phones; ++p) {
    if (p != silence_id) a.push_back(p);
  }
  return a;
}

std::vector<int> phone_classes(const HmmSynthConfig& cfg) {
  std::vector<int> classes(static_cast<std::size_t>(cfg.num_phones), 0);
  int k = 0;
  for (int p = 0; p < cfg.num_phones; ++p) {
    if (p == cfg.silence_id) continue;
    classes[static_cast<std::size_t>(p)] = 1 + (k++ % cfg.num_classes);
  }
  return classes;
}

int true_state(int left, int center, int right, const std::vector<int>& classes, int class_count) {
  return (center * class_count + classes[static_cast<std::size_t>(left)]) * class_count +
         classes[static_cast<std::size_t>(right)];
}

std::vector<std::vector<double>> synth_bigram(const HmmSynthConfig& cfg) {
  cfg.validate();
  if (!cfg.bigram.empty()) return cfg.bigram;
  Rng rng(mix_seed(cfg.seed, 101));
  const auto active = cfg.phones_in_use();
  const auto n = static_cast<std::size_t>(cfg.num_phones);
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (int p : active) {
    std::vector<int> others;
    for (int q : active) {
      if (q != p) others.push_back(q);
    }
    rng.shuffle(others);
    others.resize(std::min(others.size(), static_cast<std::size_t>(cfg.successors)));
    std::vector<double> w(others.size());
    double total = 0.0;
    for (double& x : w) total += (x = rng.uniform(0.5, 1.5));
    auto& row = t[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < others.size(); ++i) {
      row[static_cast<std::size_t>(others[i])] = (1.0 - cfg.pause_prob) * w[i] / total;
    }
    row[static_cast<std::size_t>(cfg.silence_id)] += cfg.pause_prob;
  }
  // Silence, and phones outside the active set, lead uniformly to active phones.
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    for (double v : t[p]) s += v;
    if (s > 0.0) continue;
    for (int q : active) {
      if (static_cast<std::size_t>(q) != p) t[p][static_cast<std::size_t>(q)] = 1.0;
    }
    double z = 0.0;
    for (double v : t[p]) z += v;
    for (double& v : t[p]) v /= z;
  }
  return t;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transitions) {
  const std::size_t n = transitions.size();
  if (n == 0) throw Error("stationary_distribution: empty matrix");
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * transitions[i][j];
    }
    // Lazy step keeps periodic chains converging to the same fixed point.
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = 0.5 * (next[j] + pi[j]);
      diff += std::abs(v - pi[j]);
      pi[j] = v;
    }
    if (diff < 1e-15) break;
  }
  return pi;
}

OracleCorpus synth_corpus(const HmmSynthConfig& cfg) {
  cfg.validate();
  OracleCorpus corpus;
  corpus.config = cfg;
  const auto bigram = synth_bigram(cfg);
  const auto classes = phone_classes(cfg);
  const auto active = cfg.phones_in_use();
  Rng root(cfg.seed);
  Rng emit_rng = root.fork(1);
  const Emission emission = make_emission(cfg, classes, emit_rng);
  Rng seq_rng = root.fork(2);
  Rng noise_rng = root.fork(3);
  Rng text_rng = root.fork(4);
  const std::size_t dim = cfg.feature_dim;
  const int cc = cfg.class_count();

  for (std::size_t u = 0; u < cfg.num_utterances; ++u) {
    const int n = cfg.min_phones + static_cast<int>(seq_rng.uniform_int(
                                       static_cast<std::size_t>(cfg.max_phones - cfg.min_phones + 1)));
    std::vector<int> symbols = sample_symbols(cfg, bigram, active, n, seq_rng);
    if (cfg.edge_silence) {
      symbols.insert(symbols.begin(), cfg.silence_id);
      symbols.push_back(cfg.silence_id);
    }
    std::vector<int> durations(symbols.size());
    for (auto& d : durations) {
      const auto tail = static_cast<int>(seq_rng.geometric(1.0 - cfg.duration_continue));
      d = std::min(cfg.min_duration + tail, cfg.max_duration);
    }
    OracleUtterance utt;
    utt.id = utt_name(u);
    std::vector<double> frames;
    std::vector<int> phone_ids, state_ids;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      const int left = i == 0 ? cfg.silence_id : symbols[i - 1];
      const int center = symbols[i];
      const int right = i + 1 == symbols.size() ? cfg.silence_id : symbols[i + 1];
      const int state = true_state(left, center, right, classes, cc);
      const auto& mu = emission.phone_mean[static_cast<std::size_t>(center)];
      const auto& ls = emission.left_shift[static_cast<std::size_t>(classes[static_cast<std::size_t>(left)])];
      const auto& rs = emission.right_shift[static_cast<std::size_t>(classes[static_cast<std::size_t>(right)])];
      for (int f = 0; f < durations[i]; ++f) {
        for (std::size_t d = 0; d < dim; ++d) {
          frames.push_back(mu[d] + cfg.coupling * (ls[d] + rs[d]) + noise_rng.normal(0.0, cfg.noise_sd));
        }
        phone_ids.push_back(center);
        state_ids.push_back(state);
      }
    }
    const std::size_t t = phone_ids.size();
    utt.feats = FeatureSeq(nk::Tensor(nk::Shape{t, dim}, std::move(frames)), cfg.frame_rate);
    utt.phones = FrameLabels{utt.id, std::move(phone_ids), cfg.num_phones};
    utt.states = FrameLabels{utt.id, std::move(state_ids), cfg.num_states()};
    corpus.utts.push_back(std::move(utt));
  }

  for (std::size_t u = 0; u < cfg.text_utterances; ++u) {
    const int n = cfg.min_phones + static_cast<int>(text_rng.uniform_int(
                                       static_cast<std::size_t>(cfg.max_phones - cfg.min_phones + 1)));
    std::vector<int> seq;
    for (int s : sample_symbols(cfg, bigram, active, n, text_rng)) {
      if (s == cfg.silence_id) continue;
      if (!seq.empty() && seq.back() == s) continue;
      seq.push_back(s);
    }
    corpus.text.push_back(std::move(seq));
  }
  return corpus;
}

std::vector<FeatureSeq> OracleCorpus::features() const {
  std::vector<FeatureSeq> out;
  out.reserve(utts.size());
  for (const auto& u : utts) out.push_back(u.feats);
  return out;
}

std::vector<FrameLabels> OracleCorpus::phone_labels() const {
  std::vector<FrameLabels> out;
  out.reserve(utts.size());
  for (const auto& u : utts) out.push_back(u.phones);
  return out;
}

std::vector<FrameLabels> OracleCorpus::state_labels() const {
  std::vector<FrameLabels> out;
  out.reserve(utts.size());
  for (const auto& u : utts) out.push_back(u.states);
  return out;
}

void write_corpus(const std::filesystem::path& dir, const OracleCorpus& corpus, const PhonemeInventory& inventory) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "feats", ec);
  if (ec) throw IoError("cannot create corpus directory " + dir.string() + ": " + ec.message());
  nlohmann::json manifest;
  manifest["format"] = "unitforge-corpus/1";
  manifest["frame_rate"] = corpus.config.frame_rate;
  manifest["feature_dim"] = corpus.config.feature_dim;
  manifest["num_phones"] = corpus.config.num_phones;
  manifest["num_states"] = corpus.config.num_states();
  manifest["seed"] = corpus.config.seed;
  manifest["utterances"] = nlohmann::json::array();
  std::vector<FrameLabels> phones, states;
  for (const auto& u : corpus.utts) {
    const std::string rel = "feats/" + u.id + ".feat";
    write_feature_file(dir / rel, u.feats);
    manifest["utterances"].push_back({{"id", u.id}, {"features", rel}, {"frames", u.feats.num_frames()}});
    phones.push_back(u.phones);
    states.push_back(u.states);
  }
  write_unit_file(dir / "phones.units", phones);
  write_unit_file(dir / "states.units", states);
  write_text_corpus(dir / "text.txt", corpus.text, inventory);
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

OracleCorpus read_corpus(const std::filesystem::path& dir, const PhonemeInventory& inventory) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed corpus manifest in " + dir.string() + ": " + ex.what());
  }
  OracleCorpus corpus;
  try {
    corpus.config.frame_rate = manifest.at("frame_rate").get<double>();
    corpus.config.feature_dim = manifest.at("feature_dim").get<std::size_t>();
    corpus.config.num_phones = manifest.at("num_phones").get<int>();
    corpus.config.seed = manifest.value("seed", std::uint64_t{0});
    const int num_states = manifest.at("num_states").get<int>();
    const auto phones = read_unit_file(dir / "phones.units", corpus.config.num_phones);
    const auto states = read_unit_file(dir / "states.units", num_states);
    const auto& list = manifest.at("utterances");
    if (phones.size() != list.size() || states.size() != list.size()) {
      throw IoError("corpus in " + dir.string() + " has inconsistent utterance counts");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      OracleUtterance u;
      u.id = list[i].at("id").get<std::string>();
      u.feats = read_feature_file(dir / list[i].at("features").get<std::string>(), corpus.config.frame_rate);
      u.phones = phones[i];
      u.states = states[i];
      if (u.phones.utt_id != u.id || u.states.utt_id != u.id) {
        throw IoError("corpus unit files are out of order at " + u.id);
      }
      validate_alignment(u.phones, u.feats);
      validate_alignment(u.states, u.feats);
      corpus.utts.push_back(std::move(u));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed corpus manifest in " + dir.string() + ": " + ex.what());
  }
  corpus.text = read_text_corpus(dir / "text.txt", inventory);
  return corpus;
}

}  // namespace unitforge::evalsynth
