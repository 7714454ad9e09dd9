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

#include <map>

#include "oracles.hpp"
#include "unitforge/error.hpp"
#include "unitforge/rng.hpp"
#include "unitforge/units/bpe.hpp"

using namespace unitforge;
using namespace unitforge::units;

using testutil::brute_force_merges;

TEST_CASE("apply_merge is left to right and non-overlapping") {
  CHECK(apply_merge(std::vector<int>{1, 1, 1}, {1, 1}, 9) == std::vector<int>{9, 1});
  CHECK(apply_merge(std::vector<int>{1, 2, 1, 2}, {1, 2}, 9) == std::vector<int>{9, 9});
  CHECK(apply_merge(std::vector<int>{2, 1}, {1, 2}, 9) == std::vector<int>{2, 1});
  CHECK(apply_merge(std::vector<int>{}, {1, 2}, 9).empty());
}

TEST_CASE("no repeated pair means no merges") {
  const auto m = train_bpe({{1, 2, 3}, {4, 5}}, 500);
  CHECK(m.merges.empty());
  CHECK(m.vocab_size() == 40);
}

TEST_CASE("empty corpora are an error; zero merges leave labels unchanged") {
  CHECK_THROWS_AS(train_bpe({}, 500), Error);
  const FrameLabels in{"u", {0, 1, 1, 2, 0}, 40};
  CHECK(label_pp(in, BpeModel{}).ids == in.ids);
}

TEST_CASE("a b a b merges (a, b) first") {
  const auto m = train_bpe({{1, 2, 1, 2}}, 41);
  REQUIRE(m.merges.size() == 1);
  CHECK(m.merges[0] == std::pair<int, int>{1, 2});
  CHECK(m.spelling(40) == std::vector<int>{1, 2});
  CHECK(m.encode(std::vector<int>{1, 2, 1, 2, 3}) == std::vector<int>{40, 40, 3});
}

TEST_CASE("pairs with silence are never merged") {
  const auto m = train_bpe({{0, 1, 0, 1, 0, 1}}, 500);
  CHECK(m.merges.empty());
}

TEST_CASE("incremental counts agree with a brute-force recount") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<int>> seqs;
    const std::size_t alphabet = 3 + static_cast<std::size_t>(trial % 4);
    for (int u = 0; u < 15; ++u) {
      std::vector<int> s;
      const std::size_t len = 1 + rng.uniform_int(12);
      for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<int>(rng.uniform_int(alphabet)));
      seqs.push_back(s);
    }
    const std::size_t target = 40 + 1 + rng.uniform_int(30);
    const auto m = train_bpe(seqs, target);
    CHECK(m.merges == brute_force_merges(seqs, target, 40, 0));
    // Encoding and spelling round-trip to the input.
    for (const auto& s : seqs) {
      std::vector<int> spelled;
      for (int t : m.encode(s)) {
        const auto sp = m.spelling(t);
        spelled.insert(spelled.end(), sp.begin(), sp.end());
      }
      CHECK(spelled == s);
    }
  }
}

TEST_CASE("label_pp spreads a merged token over all of its frames") {
  BpeModel m;
  m.merges = {{1, 2}};
  const FrameLabels in{"u", {1, 1, 2, 2, 2}, 40};
  const auto out = label_pp(in, m);
  CHECK(out.ids == std::vector<int>{40, 40, 40, 40, 40});
  CHECK(out.vocab_size == 41);
  const auto names = m.names(PhonemeInventory::standard());
  CHECK(names.back() == PhonemeInventory::standard().name_of(1) + "_" + PhonemeInventory::standard().name_of(2));
}

TEST_CASE("label_pp preserves the frame count") {
  Rng rng(5);
  std::vector<std::vector<int>> seqs;
  std::vector<FrameLabels> frames;
  for (int u = 0; u < 30; ++u) {
    FrameLabels f{"u" + std::to_string(u), {}, 40};
    const std::size_t len = 5 + rng.uniform_int(40);
    for (std::size_t i = 0; i < len; ++i) f.ids.push_back(static_cast<int>(rng.uniform_int(5)));
    seqs.push_back(dedup_runs(f).symbols);
    frames.push_back(f);
  }
  const auto m = train_bpe(seqs, 60);
  for (const auto& f : frames) {
    const auto out = label_pp(f, m);
    CHECK(out.size() == f.size());
    // Every frame's token spells a run that contains the frame's phone.
    for (std::size_t t = 0; t < f.size(); ++t) {
      const auto sp = m.spelling(out.ids[t]);
      CHECK(std::find(sp.begin(), sp.end(), f.ids[t]) != sp.end());
    }
  }
  CHECK_THROWS_AS(label_pp(FrameLabels{"x", {40}, 41}, m), Error);
}
