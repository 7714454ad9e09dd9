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

#include <fstream>

#include "test_util.hpp"
#include "unitforge/corpus.hpp"
#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"

using namespace unitforge;

TEST_CASE("standard inventory: 39 phones plus silence at id 0") {
  const auto inv = PhonemeInventory::standard();
  CHECK(inv.size() == 40);
  CHECK(inv.silence_id == 0);
  CHECK(inv.name_of(0) == "sil");
  CHECK(inv.id_of("zh") == 39);
  CHECK_THROWS_AS(inv.id_of("xx"), Error);
  CHECK_NOTHROW(inv.validate());
  auto dup = inv;
  dup.symbols[1] = "b";
  CHECK_THROWS_AS(dup.validate(), Error);
}

TEST_CASE("dedup_runs: hand-enumerated example") {
  const std::vector<int> ids{1, 1, 2, 1};
  const auto runs = dedup_runs(ids);
  CHECK(runs.symbols == std::vector<int>{1, 2, 1});
  CHECK(runs.lengths == std::vector<int>{2, 1, 1});
  CHECK(runs.total_length() == 4);
  CHECK_THROWS_WITH_AS(dedup_runs(std::vector<int>{}), "empty label sequence", Error);
}

TEST_CASE("expand_runs: hand-enumerated example and round trip") {
  RunLengthSeq runs{{1, 2}, {2, 3}};
  CHECK(expand_run_ids(runs) == std::vector<int>{1, 1, 2, 2, 2});
  const auto labels = expand_runs(runs, "u", 0);
  CHECK(labels.vocab_size == 3);
  CHECK(labels.utt_id == "u");

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> ids(rng.uniform_int(30) + 1);
    for (auto& v : ids) v = static_cast<int>(rng.uniform_int(4));
    CHECK(expand_run_ids(dedup_runs(ids)) == ids);
  }
}

TEST_CASE("validate_alignment reports both lengths") {
  FeatureSeq f(nk::Tensor::matrix(5, 2), 50.0);
  FrameLabels l{"u", {0, 1, 1, 0}, 2};
  try {
    validate_alignment(l, f);
    FAIL("expected a throw");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find('4') != std::string::npos);
    CHECK(msg.find('5') != std::string::npos);
  }
  l.ids.push_back(2);
  CHECK_THROWS_AS(validate_alignment(l, f), Error);
  l.ids.back() = 1;
  CHECK_NOTHROW(validate_alignment(l, f));
}

TEST_CASE("unit file: exact bytes and round trip") {
  std::vector<FrameLabels> utts{{"a", {3, 3, 0}, 4}, {"b", {1}, 4}};
  CHECK(format_unit_file(utts) == "a\t3 3 0\nb\t1\n");
  testutil::TempDir dir("units");
  write_unit_file(dir / "u.txt", utts);
  const auto back = read_unit_file(dir / "u.txt", 4);
  REQUIRE(back.size() == 2);
  CHECK(back[0].utt_id == "a");
  CHECK(back[0].ids == utts[0].ids);
  CHECK(back[1].ids == utts[1].ids);
  CHECK_THROWS_AS(read_unit_file(dir / "u.txt", 2), IoError);
  CHECK_THROWS_AS(read_unit_file(dir / "missing.txt", 4), IoError);
  write_text_file(dir / "bad.txt", "a 1 2\n");
  CHECK_THROWS_AS(read_unit_file(dir / "bad.txt", 4), IoError);
  write_text_file(dir / "bad2.txt", "a\t1 x\n");
  CHECK_THROWS_AS(read_unit_file(dir / "bad2.txt", 4), IoError);
}

TEST_CASE("vocab file: exact bytes, dense ids") {
  testutil::TempDir dir("vocab");
  write_vocab_file(dir / "v.txt", {"sil", "aa", "b"});
  CHECK(read_text_file(dir / "v.txt") == "0\tsil\n1\taa\n2\tb\n");
  CHECK(read_vocab_file(dir / "v.txt") == std::vector<std::string>{"sil", "aa", "b"});
  write_text_file(dir / "gap.txt", "0\tsil\n2\tb\n");
  CHECK_THROWS_AS(read_vocab_file(dir / "gap.txt"), IoError);
}

TEST_CASE("feature file: int64 header then float64 payload") {
  testutil::TempDir dir("feat");
  Rng rng(1);
  FeatureSeq f(testutil::random_tensor({3, 2}, rng), 50.0);
  write_feature_file(dir / "f.feat", f);
  CHECK(std::filesystem::file_size(dir / "f.feat") == 16 + 6 * 8);
  std::ifstream in(dir / "f.feat", std::ios::binary);
  std::int64_t hdr[2];
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  CHECK(hdr[0] == 3);
  CHECK(hdr[1] == 2);
  double first = 0.0;
  in.read(reinterpret_cast<char*>(&first), sizeof first);
  CHECK(first == f.frames[0]);
  const auto back = read_feature_file(dir / "f.feat");
  CHECK(back.frames == f.frames);

  write_text_file(dir / "short.feat", std::string(20, '\0'));
  CHECK_THROWS_AS(read_feature_file(dir / "short.feat"), IoError);
}

TEST_CASE("text corpus: phone names resolve through the inventory") {
  testutil::TempDir dir("text");
  const auto inv = PhonemeInventory::standard();
  std::vector<std::vector<int>> seqs{{1, 2, 3}, {39}};
  write_text_corpus(dir / "t.txt", seqs, inv);
  CHECK(read_text_file(dir / "t.txt") == "aa ae ah\nzh\n");
  CHECK(read_text_corpus(dir / "t.txt", inv) == seqs);
}
