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


#include "unitforge/evalsynth/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "unitforge/error.hpp"
#include "unitforge/numkit/ops.hpp"
#include "unitforge/numkit/optim.hpp"
#include "unitforge/rng.hpp"

namespace unitforge::evalsynth {
namespace {

struct Split {
  nk::Tensor x;
  std::vector<int> y;
};

Split gather(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& truth,
             const std::vector<std::size_t>& utts) {
  const std::size_t dim = feats.front().dim();
  std::vector<double> data;
  Split s;
  for (std::size_t i : utts) {
    data.insert(data.end(), feats[i].frames.data().begin(), feats[i].frames.data().end());
    s.y.insert(s.y.end(), truth[i].ids.begin(), truth[i].ids.end());
  }
  s.x = nk::Tensor(nk::Shape{s.y.size(), dim}, std::move(data));
  return s;
}

double accuracy(const nk::Tensor& logits, const std::vector<int>& y) {
  if (y.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    auto row = logits.row(t);
    if (std::max_element(row.begin(), row.end()) - row.begin() == y[t]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

}  // namespace

ProbeResult linear_probe(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& truth,
                         const ProbeOptions& opts) {
  if (feats.empty() || feats.size() != truth.size()) throw Error("linear_probe: corpus sizes differ or are empty");
  int classes = 0;
  std::set<int> seen;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    validate_alignment(truth[i], feats[i]);
    if (feats[i].dim() != feats.front().dim()) throw Error("linear_probe: feature dimensions differ");
    classes = std::max(classes, truth[i].vocab_size);
    seen.insert(truth[i].ids.begin(), truth[i].ids.end());
  }
  if (seen.size() < 2) throw Error("linear_probe: truth has a single class");
  if (!(opts.test_fraction > 0.0 && opts.test_fraction < 1.0)) throw Error("linear_probe: bad test fraction");

  std::vector<std::size_t> order(feats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(opts.seed);
  rng.shuffle(order);
  auto n_test = static_cast<std::size_t>(std::round(opts.test_fraction * static_cast<double>(order.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, order.size() > 1 ? order.size() - 1 : 1);
  const std::vector<std::size_t> test_ids(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  const std::vector<std::size_t> train_ids(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  Split train = gather(feats, truth, train_ids);
  Split test = gather(feats, truth, test_ids);

  const std::size_t dim = train.x.cols();
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (std::size_t t = 0; t < train.x.rows(); ++t) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += train.x.at(t, d);
  }
  for (double& m : mean) m /= static_cast<double>(train.x.rows());
  for (std::size_t t = 0; t < train.x.rows(); ++t) {
    for (std::size_t d = 0; d < dim; ++d) sd[d] += (train.x.at(t, d) - mean[d]) * (train.x.at(t, d) - mean[d]);
  }
  for (double& s : sd) s = std::sqrt(s / static_cast<double>(train.x.rows())) + 1e-8;
  for (Split* s : {&train, &test}) {
    for (std::size_t t = 0; t < s->x.rows(); ++t) {
      for (std::size_t d = 0; d < dim; ++d) s->x.at(t, d) = (s->x.at(t, d) - mean[d]) / sd[d];
    }
  }

  const auto k = static_cast<std::size_t>(classes);
  std::vector<nk::Var> params{nk::parameter(nk::Tensor::matrix(dim, k)), nk::parameter(nk::Tensor(nk::Shape{k}))};
  nk::AdamState state({0.9, 0.999, 1e-8, 0.0}, std::span<const nk::Var>(params));
  std::vector<std::pair<std::size_t, std::size_t>> picks(train.y.size());
  for (std::size_t t = 0; t < train.y.size(); ++t) picks[t] = {t, static_cast<std::size_t>(train.y[t])};
  const nk::Var x = nk::constant(train.x);
  const double inv_n = 1.0 / static_cast<double>(train.y.size());
  for (std::size_t step = 0; step < opts.steps; ++step) {
    for (auto& p : params) p.zero_grad();
    const nk::Var logits = nk::add_bias(nk::matmul(x, params[0]), params[1]);
    const nk::Var loss = nk::scale(nk::sum(nk::pick(nk::log_softmax_rows(logits), picks)), -inv_n);
    nk::backward(loss);
    nk::adam_step(std::span<nk::Var>(params), state, opts.lr);
  }
  ProbeResult r;
  r.train_frames = train.y.size();
  r.test_frames = test.y.size();
  auto logits_of = [&](const nk::Tensor& feats) {
    return nk::add_bias(nk::matmul(nk::constant(feats), params[0]), params[1]).value();
  };
  r.train_accuracy = accuracy(logits_of(train.x), train.y);
  r.test_accuracy = accuracy(logits_of(test.x), test.y);
  return r;
}

}  // namespace unitforge::evalsynth
