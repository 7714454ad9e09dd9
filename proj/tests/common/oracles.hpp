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

// Naive reference implementations shared by the unit and acceptance tests.

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "unitforge/corpus.hpp"
#include "unitforge/numkit/autodiff.hpp"
#include "unitforge/numkit/tensor.hpp"
#include "unitforge/objective.hpp"

namespace testutil {

namespace nk = unitforge::nk;
using unitforge::FrameLabels;
using unitforge::MaskSet;
using unitforge::PredictorHead;

inline PredictorHead make_head(nk::Tensor proj, nk::Tensor emb, double tau) {
  PredictorHead h;
  h.projection = nk::parameter(std::move(proj));
  h.embeddings = nk::parameter(std::move(emb));
  h.temperature = tau;
  return h;
}

// Straight from the definition: cosine between the projected frame and each
// unit embedding, softmax over units at temperature tau.
inline std::vector<double> naive_distribution(std::span<const double> h, const PredictorHead& head) {
  const auto& w = head.projection.value();
  const auto& e = head.embeddings.value();
  std::vector<double> z(head.embed_dim(), 0.0);
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t i = 0; i < h.size(); ++i) z[j] += h[i] * w.at(i, j);
  std::vector<double> s(head.num_units());
  for (std::size_t c = 0; c < s.size(); ++c) {
    double dot = 0.0, nz = 0.0, ne = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      dot += z[j] * e.at(c, j);
      nz += z[j] * z[j];
      ne += e.at(c, j) * e.at(c, j);
    }
    s[c] = std::exp(dot / std::sqrt(nz * ne) / head.temperature);
  }
  double total = 0.0;
  for (double v : s) total += v;
  for (double& v : s) v /= total;
  return s;
}

inline double naive_nll(const nk::Tensor& hidden, const FrameLabels& y, const MaskSet& m, const PredictorHead& head) {
  double loss = 0.0;
  for (std::size_t t = 0; t < hidden.rows(); ++t) {
    if (!m.masked[t]) continue;
    loss -= std::log(naive_distribution(hidden.row(t), head)[static_cast<std::size_t>(y.ids[t])]);
  }
  return loss;
}

// Recounts every pair from scratch before each merge.
inline std::vector<std::pair<int, int>> brute_force_merges(std::vector<std::vector<int>> seqs, std::size_t target, int base,
                                                    int silence) {
  std::vector<std::pair<int, int>> merges;
  while (static_cast<std::size_t>(base) + merges.size() < target) {
    std::map<std::pair<int, int>, std::size_t> counts;
    for (const auto& s : seqs)
      for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] != silence && s[i + 1] != silence) ++counts[{s[i], s[i + 1]}];
    std::pair<int, int> best{-1, -1};
    std::size_t best_count = 1;
    for (const auto& [p, c] : counts)
      if (c > best_count) best = p, best_count = c;
    if (best.first < 0) break;
    const int token = base + static_cast<int>(merges.size());
    merges.push_back(best);
    for (auto& s : seqs) {
      std::vector<int> out;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == best.first && s[i + 1] == best.second) {
          out.push_back(token);
          ++i;
        } else {
          out.push_back(s[i]);
        }
      }
      s = std::move(out);
    }
  }
  return merges;
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Minimum within-cluster sum of squares over every assignment to k labels.
inline double exhaustive_optimum(const nk::Tensor& pts, std::size_t k) {
  const std::size_t n = pts.rows();
  std::vector<std::size_t> lab(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> mean(pts.cols(), 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (lab[i] == c) {
          ++count;
          for (std::size_t d = 0; d < pts.cols(); ++d) mean[d] += pts.at(i, d);
        }
      if (count == 0) continue;
      for (auto& m : mean) m /= static_cast<double>(count);
      for (std::size_t i = 0; i < n; ++i)
        if (lab[i] == c) total += sq_dist(pts.row(i), mean);
    }
    best = std::min(best, total);
    std::size_t i = 0;
    while (i < n && ++lab[i] == k) lab[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace testutil
