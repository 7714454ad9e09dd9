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


#include "unitforge/evalsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "unitforge/error.hpp"

namespace unitforge::evalsynth {
namespace {

void check_aligned(const std::vector<FrameLabels>& a, const std::vector<FrameLabels>& b) {
  if (a.size() != b.size()) {
    throw Error("metrics: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " utterances");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].ids.size() != b[i].ids.size()) {
      throw Error("metrics: utterance " + a[i].utt_id + " has " + std::to_string(a[i].ids.size()) + " vs " +
                  std::to_string(b[i].ids.size()) + " frames");
    }
  }
}

double entropy(const std::map<int, std::size_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [id, n] : counts) {
    const double p = static_cast<double>(n) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

Contingency contingency(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  check_aligned(units, truth);
  Contingency c;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t t = 0; t < units[i].ids.size(); ++t) {
      const int u = units[i].ids[t];
      const int g = truth[i].ids[t];
      ++c.joint[{u, g}];
      ++c.units[u];
      ++c.truth[g];
      ++c.total;
    }
  }
  if (c.total == 0) throw Error("metrics: no frames");
  return c;
}

double purity(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  const Contingency c = contingency(units, truth);
  std::map<int, std::size_t> best;
  for (const auto& [key, n] : c.joint) best[key.first] = std::max(best[key.first], n);
  std::size_t hit = 0;
  for (const auto& [u, n] : best) hit += n;
  return static_cast<double>(hit) / static_cast<double>(c.total);
}

double inverse_purity(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  return purity(truth, units);
}

double nmi(const Contingency& c) {
  const auto total = static_cast<double>(c.total);
  const double hu = entropy(c.units, total);
  const double ht = entropy(c.truth, total);
  if (c.units.size() == 1 && c.truth.size() == 1) return 1.0;
  const double denom = std::max(hu, ht);
  if (denom <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, n] : c.joint) {
    const double pj = static_cast<double>(n) / total;
    const double pu = static_cast<double>(c.units.at(key.first)) / total;
    const double pt = static_cast<double>(c.truth.at(key.second)) / total;
    mi += pj * std::log(pj / (pu * pt));
  }
  return std::clamp(mi / denom, 0.0, 1.0);
}

double nmi(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  return nmi(contingency(units, truth));
}

VocabUsage vocab_usage(const std::vector<FrameLabels>& units) {
  std::map<int, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& u : units) {
    for (int id : u.ids) {
      ++counts[id];
      ++total;
    }
  }
  if (total == 0) return {};
  return {counts.size(), std::exp(entropy(counts, static_cast<double>(total)))};
}

double mapped_accuracy(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  const Contingency c = contingency(units, truth);
  std::vector<std::pair<std::size_t, std::pair<int, int>>> cells;
  cells.reserve(c.joint.size());
  for (const auto& [key, n] : c.joint) cells.emplace_back(n, key);
  std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::set<int> used_u, used_t;
  std::size_t hit = 0;
  for (const auto& [n, key] : cells) {
    if (used_u.count(key.first) || used_t.count(key.second)) continue;
    used_u.insert(key.first);
    used_t.insert(key.second);
    hit += n;
  }
  return static_cast<double>(hit) / static_cast<double>(c.total);
}

double boundary_recall(const std::vector<FrameLabels>& units, const std::vector<FrameLabels>& truth) {
  check_aligned(units, truth);
  std::size_t boundaries = 0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t t = 1; t < truth[i].ids.size(); ++t) {
      if (truth[i].ids[t] == truth[i].ids[t - 1]) continue;
      ++boundaries;
      if (units[i].ids[t] != units[i].ids[t - 1]) ++found;
    }
  }
  return boundaries == 0 ? 1.0 : static_cast<double>(found) / static_cast<double>(boundaries);
}

}  // namespace unitforge::evalsynth
