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


#include "unitforge/units/kmeans.hpp"

#include <cmath>
#include <limits>

#include "unitforge/error.hpp"
#include "unitforge/numkit/checkpoint.hpp"
#include "unitforge/rng.hpp"

namespace unitforge::units {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

struct Nearest {
  int id = 0;
  double dist = 0.0;
};

Nearest nearest(std::span<const double> p, const nk::Tensor& centroids) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = sq_dist(p, centroids.row(c));
    if (d < best.dist) best = {static_cast<int>(c), d};
  }
  return best;
}

// Returns the objective of the fresh assignment.
double assign_all(const nk::Tensor& points, const nk::Tensor& centroids, std::vector<int>& ids,
                  std::vector<double>& dists) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const Nearest n = nearest(points.row(i), centroids);
    ids[i] = n.id;
    dists[i] = n.dist;
    total += n.dist;
  }
  return total;
}

nk::Tensor plus_plus_init(const nk::Tensor& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  nk::Tensor centroids = nk::Tensor::matrix(k, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.uniform_int(n);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double mass = 0.0;
      for (double v : d2) mass += v;
      pick = mass > 0.0 ? rng.categorical(d2) : rng.uniform_int(n);
    }
    auto dst = centroids.row(c);
    auto src = points.row(pick);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points.row(i), dst));
  }
  return centroids;
}

KMeansFit single_fit(const nk::Tensor& points, const KMeansOptions& opts, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  KMeansFit fit;
  fit.model.centroids = plus_plus_init(points, opts.k, rng);
  std::vector<int> ids(n);
  std::vector<double> dists(n);
  double objective = assign_all(points, fit.model.centroids, ids, dists);
  fit.objective_trace.push_back(objective);

  std::vector<double> sums(opts.k * dim);
  std::vector<std::size_t> counts(opts.k);
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(ids[i]);
      ++counts[c];
      auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += p[d];
    }
    for (std::size_t c = 0; c < opts.k; ++c) {
      auto dst = fit.model.centroids.row(c);
      if (counts[c] == 0) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (dists[i] > dists[far]) far = i;
        }
        auto src = points.row(far);
        std::copy(src.begin(), src.end(), dst.begin());
        dists[far] = 0.0;
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) dst[d] = sums[c * dim + d] / static_cast<double>(counts[c]);
    }
    const std::vector<int> previous = ids;
    const double next = assign_all(points, fit.model.centroids, ids, dists);
    fit.objective_trace.push_back(next);
    fit.iterations = iter + 1;
    const bool stable = ids == previous;
    const double improvement = objective - next;
    objective = next;
    if (stable || improvement <= opts.tol * std::max(objective, 1e-300)) break;
  }
  return fit;
}


}  // namespace

int KMeansModel::assign(std::span<const double> point) const {
  if (point.size() != dim()) {
    throw Error("k-means: point has dimension " + std::to_string(point.size()) + ", model expects " +
                std::to_string(dim()));
  }
  return nearest(point, centroids).id;
}

void KMeansModel::validate() const {
  if (centroids.rank() != 2 || centroids.rows() == 0 || centroids.cols() == 0) {
    throw Error("k-means model needs a non-empty k x D centroid matrix");
  }
  if (!centroids.all_finite()) throw Error("k-means centroids must be finite");
}

KMeansFit kmeans_fit(const nk::Tensor& points, const KMeansOptions& opts) {
  if (points.rank() != 2 || points.cols() == 0) throw Error("k-means: points must be an N x D matrix");
  if (opts.k == 0) throw Error("k-means: k must be positive");
  if (points.rows() < opts.k) {
    throw Error("k-means: " + std::to_string(points.rows()) + " points is fewer than k = " + std::to_string(opts.k));
  }
  if (!points.all_finite()) throw Error("k-means: non-finite point");
  if (opts.restarts == 0) throw Error("k-means: restarts must be positive");
  KMeansFit best;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    // The first run is seeded exactly as a single fit; later ones get derived streams.
    Rng rng(r == 0 ? opts.seed : mix_seed(opts.seed, r));
    KMeansFit fit = single_fit(points, opts, rng);
    // Strictly lower only, so ties keep the earliest seeding.
    if (r == 0 || fit.objective_trace.back() < best.objective_trace.back()) best = std::move(fit);
  }
  return best;
}

std::vector<int> kmeans_assign(const nk::Tensor& points, const KMeansModel& model) {
  model.validate();
  if (points.rank() != 2 || points.cols() != model.dim()) {
    throw Error("k-means: points " + points.shape_str() + " do not match centroid dimension " +
                std::to_string(model.dim()));
  }
  std::vector<int> ids(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) ids[i] = nearest(points.row(i), model.centroids).id;
  return ids;
}

double kmeans_objective(const nk::Tensor& points, const KMeansModel& model) {
  const std::vector<int> ids = kmeans_assign(points, model);
  double total = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    total += sq_dist(points.row(i), model.centroids.row(static_cast<std::size_t>(ids[i])));
  }
  return total;
}

nk::Tensor stack_frames(const std::vector<FeatureSeq>& feats) {
  if (feats.empty()) throw Error("stack_frames: no sequences");
  const std::size_t dim = feats.front().dim();
  std::size_t rows = 0;
  for (const auto& f : feats) {
    if (f.dim() != dim) throw Error("stack_frames: feature dimensions differ");
    rows += f.num_frames();
  }
  std::vector<double> data;
  data.reserve(rows * dim);
  for (const auto& f : feats) data.insert(data.end(), f.frames.data().begin(), f.frames.data().end());
  return nk::Tensor(nk::Shape{rows, dim}, std::move(data));
}

FrameLabels label_pc(const FeatureSeq& feats, const KMeansModel& model, std::string utt_id) {
  FrameLabels out;
  out.utt_id = std::move(utt_id);
  out.vocab_size = static_cast<int>(model.k());
  out.ids = kmeans_assign(feats.frames, model);
  return out;
}

void save_kmeans(const std::filesystem::path& dir, const KMeansModel& model) {
  model.validate();
  nk::save_tensors(dir, {{"centroids", model.centroids}});
}

KMeansModel load_kmeans(const std::filesystem::path& dir) {
  auto tensors = nk::load_tensors(dir);
  auto it = tensors.find("centroids");
  if (it == tensors.end()) throw IoError("k-means checkpoint at " + dir.string() + " has no centroids");
  KMeansModel model{it->second};
  model.validate();
  return model;
}

}  // namespace unitforge::units
