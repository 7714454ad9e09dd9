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

#include <set>

#include "unitforge/corpus.hpp"
#include "unitforge/error.hpp"
#include "unitforge/rng.hpp"
#include "unitforge/units/triphone.hpp"

using namespace unitforge;
using namespace unitforge::units;

namespace {

RunLengthSeq runs_of(std::vector<int> symbols) {
  RunLengthSeq r;
  r.lengths.assign(symbols.size(), 1);
  r.symbols = std::move(symbols);
  return r;
}

}  // namespace

TEST_CASE("runs_to_triphones pads with silence") {
  const auto one = runs_to_triphones(runs_of({5}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == TriphoneKey{0, 5, 0});

  const auto three = runs_to_triphones(runs_of({1, 2, 3}));
  REQUIRE(three.size() == 3);
  CHECK(three[0] == TriphoneKey{0, 1, 2});
  CHECK(three[1] == TriphoneKey{1, 2, 3});
  CHECK(three[2] == TriphoneKey{2, 3, 0});
  CHECK(runs_to_triphones(RunLengthSeq{}).empty());
}

TEST_CASE("triphone names use the l-c+r form") {
  const auto inv = PhonemeInventory::standard();
  const TriphoneKey k{inv.id_of("k"), inv.id_of("ae"), inv.id_of("t")};
  CHECK(triphone_name(k, inv) == "k-ae+t");
}

TEST_CASE("LT vocabulary size is 40 plus the distinct triphones, capped at K") {
  // Three distinct non-silence triphones.
  std::vector<RunLengthSeq> small{runs_of({1, 2, 3}), runs_of({1, 2, 3})};
  const auto v = build_lt_vocab(small, 500);
  CHECK(v.size() == 43);

  // Far more than 500 distinct triphones.
  Rng rng(1);
  std::vector<RunLengthSeq> big;
  for (int u = 0; u < 400; ++u) {
    std::vector<int> s;
    for (int i = 0; i < 20; ++i) {
      int p;
      do p = 1 + static_cast<int>(rng.uniform_int(39)); while (!s.empty() && p == s.back());
      s.push_back(p);
    }
    big.push_back(runs_of(s));
  }
  const auto w = build_lt_vocab(big, 500);
  CHECK(w.size() == 540);
  std::set<TriphoneKey> distinct(w.selected.begin(), w.selected.end());
  CHECK(distinct.size() == 500);
  for (const auto& k : w.selected) CHECK(k.center != 0);
}

TEST_CASE("LT ranking: counts descending, ties in key order, silence centres skipped") {
  // (0,1,2) twice, (1,2,0) twice, (0,3,0) once, (0,4,0) once.
  std::vector<RunLengthSeq> c{runs_of({1, 2}), runs_of({1, 2}), runs_of({4}), runs_of({3}), runs_of({0, 5, 0})};
  const auto v = build_lt_vocab(c, 3);
  REQUIRE(v.selected.size() == 3);
  CHECK(v.selected[0] == TriphoneKey{0, 1, 2});
  CHECK(v.selected[1] == TriphoneKey{1, 2, 0});
  CHECK(v.selected[2] == TriphoneKey{0, 3, 0});
  CHECK(v.id_of(TriphoneKey{0, 1, 2}) == 40);
  CHECK(v.id_of(TriphoneKey{0, 4, 0}) == -1);
}

TEST_CASE("label_lt on a hand-worked 10-frame utterance") {
  // sil sil a a a b b sil c c, with a=1, b=2, c=3.
  FrameLabels in{"u", {0, 0, 1, 1, 1, 2, 2, 0, 3, 3}, 40};
  std::vector<RunLengthSeq> c{dedup_runs(in)};
  // Triphones: (0,0,1) silence, (0,1,2), (1,2,0), (2,0,3) silence, (0,3,0).
  const auto v = build_lt_vocab(c, 2);
  REQUIRE(v.selected.size() == 2);
  CHECK(v.selected[0] == TriphoneKey{0, 1, 2});
  CHECK(v.selected[1] == TriphoneKey{0, 3, 0});
  const auto out = label_lt(in, v);
  CHECK(out.vocab_size == 42);
  // (1,2,0) was not selected and falls back to its centre phone.
  CHECK(out.ids == std::vector<int>{0, 0, 40, 40, 40, 2, 2, 0, 41, 41});
  CHECK(out.utt_id == "u");
  CHECK_THROWS_AS(label_lt(FrameLabels{"x", {45}, 50}, v), Error);
}

TEST_CASE("LT vocab survives reindex after editing") {
  LogicalTriphoneVocab v;
  v.selected = {TriphoneKey{1, 2, 3}};
  v.reindex();
  CHECK(v.id_of(TriphoneKey{1, 2, 3}) == 40);
  const auto names = v.names(PhonemeInventory::standard());
  CHECK(names.size() == 41);
}

TEST_CASE("label_lt with an empty or a complete selection") {
  const FrameLabels in{"u", {0, 3, 3, 7, 0, 0, 9, 9, 9, 0}, 40};
  LogicalTriphoneVocab none;
  none.reindex();
  CHECK(label_lt(in, none).ids == in.ids);

  const auto all = build_lt_vocab({dedup_runs(in)}, 500);
  const auto out = label_lt(in, all);
  for (std::size_t t = 0; t < in.size(); ++t) {
    if (in.ids[t] == 0) {
      CHECK(out.ids[t] == 0);
    } else {
      CHECK(out.ids[t] >= 40);
    }
  }
}
