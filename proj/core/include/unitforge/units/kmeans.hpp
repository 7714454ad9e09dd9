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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "unitforge/corpus.hpp"
#include "unitforge/numkit/tensor.hpp"

namespace unitforge::units {

struct KMeansModel {
  nk::Tensor centroids;  // k x D

  std::size_t k() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
  // Nearest centroid by squared distance; ties go to the lowest id.
  int assign(std::span<const double> point) const;
  void validate() const;
};

struct KMeansOptions {
  std::size_t k = 500;
  std::uint64_t seed = 0;
  std::size_t max_iters = 50;
  double tol = 1e-6;  // relative objective improvement
  std::size_t restarts = 1;  // independent seedings; the lowest final objective wins
};

struct KMeansFit {
  KMeansModel model;
  // Objective after the initial assignment, then after every Lloyd iteration.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
};

// points: N x D. k-means++ seeding, Lloyd refinement; an emptied cluster is
// moved onto the point currently farthest from its centroid. With several
// restarts the trace is that of the kept run.
KMeansFit kmeans_fit(const nk::Tensor& points, const KMeansOptions& opts);

std::vector<int> kmeans_assign(const nk::Tensor& points, const KMeansModel& model);
double kmeans_objective(const nk::Tensor& points, const KMeansModel& model);

// Stacks every frame of every sequence into one matrix.
nk::Tensor stack_frames(const std::vector<FeatureSeq>& feats);

FrameLabels label_pc(const FeatureSeq& feats, const KMeansModel& model, std::string utt_id = {});

// manifest.json + centroid blob, numkit tensor layout.
void save_kmeans(const std::filesystem::path& dir, const KMeansModel& model);
KMeansModel load_kmeans(const std::filesystem::path& dir);

}  // namespace unitforge::units
