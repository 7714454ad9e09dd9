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

#include <cmath>

#include "unitforge/error.hpp"
#include "unitforge/evalsynth/metrics.hpp"
#include "unitforge/rng.hpp"

using namespace unitforge;
using namespace unitforge::evalsynth;

namespace {

std::vector<FrameLabels> one(std::vector<int> ids, int vocab) { return {FrameLabels{"u", std::move(ids), vocab}}; }

}  // namespace

TEST_CASE("purity and inverse purity on a hand tally") {
  // unit 0 -> truth {1, 1, 2}, unit 1 -> truth {2, 2, 2, 1}.
  const auto units = one({0, 0, 0, 1, 1, 1, 1}, 2);
  const auto truth = one({1, 1, 2, 2, 2, 2, 1}, 3);
  CHECK(purity(units, truth) == doctest::Approx(5.0 / 7.0));
  // truth 1 -> units {0, 0, 1}, truth 2 -> units {0, 1, 1, 1}.
  CHECK(inverse_purity(units, truth) == doctest::Approx(5.0 / 7.0));
  const auto c = contingency(units, truth);
  CHECK(c.total == 7);
  CHECK(c.joint.at({1, 2}) == 3);
  CHECK(c.units.at(1) == 4);
  CHECK(c.truth.at(1) == 3);
  CHECK_THROWS_AS(purity(one({0, 1}, 2), one({0}, 2)), Error);
}

TEST_CASE("purity: identity, single cluster, a 20-frame tally") {
  const auto truth = one({1, 1, 2, 3, 3, 3}, 4);
  CHECK(purity(truth, truth) == doctest::Approx(1.0));
  CHECK(purity(one({0, 0, 0, 0, 0, 0}, 1), truth) == doctest::Approx(3.0 / 6.0));
  // Counted by hand, cluster by cluster:
  //   unit 0: truth 0 0 1 0 2 -> modal 3
  //   unit 1: truth 1 1 1 2 0 1 -> modal 4
  //   unit 2: truth 2 2 0 2 1 2 2 2 2 -> modal 7
  const auto u = one({0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2}, 3);
  const auto t = one({0, 0, 1, 0, 2, 1, 1, 1, 2, 0, 1, 2, 2, 0, 2, 1, 2, 2, 2, 2}, 3);
  CHECK(purity(u, t) == doctest::Approx(14.0 / 20.0));
}

TEST_CASE("NMI hand value, identity and relabelling") {
  // Two perfectly dependent binary labellings.
  CHECK(nmi(one({0, 0, 1, 1}, 2), one({5, 5, 7, 7}, 8)) == doctest::Approx(1.0));
  // Independent: every joint cell has one frame.
  CHECK(nmi(one({0, 0, 1, 1}, 2), one({0, 1, 0, 1}, 2)) == doctest::Approx(0.0));
  CHECK(nmi(one({3, 3}, 4), one({1, 1}, 2)) == 1.0);
  // U = {0,0,1}, T = {0,1,1}: I = H(T) - H(T|U) with H(T|U) = (2/3) log 2.
  const double h = -(1.0 / 3.0) * std::log(1.0 / 3.0) - (2.0 / 3.0) * std::log(2.0 / 3.0);
  const double mi = h - (2.0 / 3.0) * std::log(2.0);
  CHECK(nmi(one({0, 0, 1}, 2), one({0, 1, 1}, 2)) == doctest::Approx(mi / h).epsilon(1e-12));

  Rng rng(1);
  std::vector<int> u(500), t(500);
  for (std::size_t i = 0; i < 500; ++i) {
    t[i] = static_cast<int>(rng.uniform_int(6));
    u[i] = rng.uniform() < 0.7 ? t[i] : static_cast<int>(rng.uniform_int(9));
  }
  const double base = nmi(one(u, 9), one(t, 6));
  std::vector<int> relabelled(u);
  for (int& x : relabelled) x = (x * 4 + 3) % 9;  // a permutation of 0..8
  CHECK(nmi(one(relabelled, 9), one(t, 6)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("random labels have NMI near zero") {
  Rng rng(2);
  std::vector<int> u(20000), t(20000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = static_cast<int>(rng.uniform_int(40));
    t[i] = static_cast<int>(rng.uniform_int(40));
  }
  CHECK(nmi(one(u, 40), one(t, 40)) <= 0.05);
}

TEST_CASE("vocabulary usage and perplexity") {
  const auto v = vocab_usage(one({0, 0, 1, 1}, 10));
  CHECK(v.used == 2);
  CHECK(v.perplexity == doctest::Approx(2.0));
  CHECK(vocab_usage(one({4, 4, 4}, 10)).perplexity == doctest::Approx(1.0));
}

TEST_CASE("mapped accuracy uses a one-to-one map") {
  // units 7 and 8 both mostly cover truth 1; only one can map to it.
  const auto units = one({7, 7, 7, 8, 8, 9}, 10);
  const auto truth = one({1, 1, 1, 1, 1, 2}, 3);
  CHECK(mapped_accuracy(units, truth) == doctest::Approx(4.0 / 6.0));
  CHECK(mapped_accuracy(one({3, 3, 4}, 5), one({0, 0, 1}, 2)) == doctest::Approx(1.0));
}

TEST_CASE("boundary recall") {
  const auto truth = one({0, 0, 1, 1, 2, 2}, 3);  // boundaries at 2 and 4
  CHECK(boundary_recall(one({5, 5, 6, 6, 6, 6}, 7), truth) == doctest::Approx(0.5));
  CHECK(boundary_recall(one({1, 2, 3, 4, 5, 6}, 7), truth) == doctest::Approx(1.0));
  CHECK(boundary_recall(one({1, 1, 1, 1, 1, 1}, 7), truth) == doctest::Approx(0.0));
}
