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


#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "test_util.hpp"
#include "unitforge/error.hpp"
#include "unitforge/units/kmeans.hpp"

using namespace unitforge;
using namespace unitforge::units;

using testutil::exhaustive_optimum;
using testutil::sq_dist;

TEST_CASE("k equal to the number of distinct points gives zero objective") {
  Rng rng(1);
  const auto pts = testutil::random_tensor({7, 3}, rng);
  const auto fit = kmeans_fit(pts, KMeansOptions{7, 0, 50, 1e-6});
  CHECK(fit.objective_trace.back() == doctest::Approx(0.0));
  CHECK(kmeans_objective(pts, fit.model) == doctest::Approx(0.0));
}

TEST_CASE("corners of a 2 x 2 square with k = 2 reach the exhaustive optimum") {
  const nk::Tensor pts(nk::Shape{4, 2}, {0, 0, 0, 2, 2, 0, 2, 2});
  const double opt = exhaustive_optimum(pts, 2);
  CHECK(opt == doctest::Approx(4.0));
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double obj = kmeans_fit(pts, KMeansOptions{2, seed, 50, 1e-6}).objective_trace.back();
    CHECK(obj >= opt - 1e-12);
    best = std::min(best, obj);
  }
  CHECK(best == doctest::Approx(opt));
}

TEST_CASE("random data: never below the exhaustive optimum, objective trace nonincreasing") {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = testutil::random_tensor({9, 2}, rng);
    const double opt = exhaustive_optimum(pts, 3);
    const auto fit = kmeans_fit(pts, KMeansOptions{3, static_cast<std::uint64_t>(trial), 50, 0.0});
    CHECK(fit.objective_trace.back() >= opt - 1e-12);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);
    CHECK(fit.objective_trace.back() == doctest::Approx(kmeans_objective(pts, fit.model)).epsilon(1e-12));
  }
}

TEST_CASE("restarts keep the lowest objective") {
  Rng rng(5);
  const auto pts = testutil::random_tensor({30, 2}, rng);
  // The first restart reuses the single-run seeding, so more restarts never do worse.
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= 6; ++r) {
    const auto fit = kmeans_fit(pts, KMeansOptions{4, 7, 100, 0.0, r});
    CHECK(fit.objective_trace.back() <= prev + 1e-12);
    CHECK(fit.objective_trace.back() == doctest::Approx(kmeans_objective(pts, fit.model)).epsilon(1e-12));
    prev = fit.objective_trace.back();
  }
  CHECK_THROWS_AS(kmeans_fit(pts, KMeansOptions{4, 7, 100, 0.0, 0}), Error);
}

TEST_CASE("assignment matches a naive nearest-centroid scan, ties to the lowest id") {
  Rng rng(3);
  KMeansModel m{testutil::random_tensor({6, 4}, rng)};
  const auto pts = testutil::random_tensor({50, 4}, rng);
  const auto ids = kmeans_assign(pts, m);
  for (std::size_t i = 0; i < 50; ++i) {
    int best = 0;
    for (std::size_t c = 1; c < 6; ++c)
      if (sq_dist(pts.row(i), m.centroids.row(c)) < sq_dist(pts.row(i), m.centroids.row(static_cast<std::size_t>(best))))
        best = static_cast<int>(c);
    CHECK(ids[i] == best);
  }
  CHECK(m.assign(m.centroids.row(3)) == 3);
  KMeansModel tie{nk::Tensor(nk::Shape{2, 1}, {-1.0, 1.0})};
  CHECK(tie.assign(std::vector<double>{0.0}) == 0);
  CHECK_THROWS_AS(tie.assign(std::vector<double>{0.0, 1.0}), Error);
}

TEST_CASE("fit is deterministic, errors, save and load") {
  Rng rng(4);
  const auto pts = testutil::random_tensor({40, 3}, rng);
  const auto a = kmeans_fit(pts, KMeansOptions{5, 9, 50, 1e-6});
  const auto b = kmeans_fit(pts, KMeansOptions{5, 9, 50, 1e-6});
  CHECK(a.model.centroids == b.model.centroids);
  CHECK_THROWS_AS(kmeans_fit(pts, KMeansOptions{41, 0, 50, 1e-6}), Error);
  CHECK_THROWS_AS(kmeans_fit(pts, KMeansOptions{0, 0, 50, 1e-6}), Error);

  testutil::TempDir dir("kmeans");
  save_kmeans(dir.path(), a.model);
  CHECK(load_kmeans(dir.path()).centroids == a.model.centroids);

  const FeatureSeq f(pts, 50.0);
  const auto labels = label_pc(f, a.model, "u");
  CHECK(labels.size() == 40);
  CHECK(labels.vocab_size == 5);
  CHECK(labels.ids == kmeans_assign(pts, a.model));
  CHECK(stack_frames({f, f}).rows() == 80);
  CHECK_THROWS_AS(label_pc(FeatureSeq(testutil::random_tensor({3, 2}, rng), 50.0), a.model), Error);
}
