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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UNITFORGE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);) n += !line.empty();
  return n;
}

const char* kSmallConfig = R"({
  "seed": 1,
  "paths": {"corpus": "corpus", "output": "run"},
  "synth": {"num_utterances": 30},
  "uasr": {"steps": 30},
  "units": {"lt_top_k": 100, "tree": {"max_leaves": 100}, "bpe_vocab": 100, "kmeans": {"k": 20}},
  "pretrain": {"schedule": {"total_steps": 10}, "checkpoint_every": 5},
  "probe": {"steps": 20}
})";

}  // namespace

TEST_CASE("stages in order, prerequisite errors, unit vocabularies") {
  testutil::TempDir dir("cli");
  const auto cfg = (dir / "run.json").string();
  {
    std::ofstream f(cfg);
    f << kSmallConfig;
  }
  const std::string c = "--config " + cfg + " -q";

  CHECK(run_cli("gen-units --type mono " + c) == 3);
  CHECK(run_cli("synth " + c) == 0);
  CHECK(run_cli("gen-units --type mono " + c) == 3);
  CHECK(run_cli("train-uasr " + c) == 0);
  CHECK(run_cli("gen-units --type lt " + c) == 3);
  CHECK(run_cli("gen-units --type mono " + c) == 0);
  CHECK(line_count(dir / "run/units/mono/vocab.txt") == 40);
  CHECK(run_cli("gen-units --type lt " + c) == 0);
  CHECK(line_count(dir / "run/units/lt/vocab.txt") <= 140);
  CHECK(line_count(dir / "run/units/lt/vocab.txt") > 40);
  // PC needs the trained monophone model.
  CHECK(run_cli("gen-units --type pc " + c) == 3);
  CHECK(run_cli("eval --type mono " + c) == 3);
  CHECK(run_cli("report " + c) == 3);
  CHECK(run_cli("pretrain --type mono " + c) == 0);
  CHECK(std::filesystem::exists(dir / "run/models/mono/state.json"));
  CHECK(run_cli("gen-units --type pc " + c) == 0);
  CHECK(line_count(dir / "run/units/pc/vocab.txt") == 20);
  CHECK(run_cli("eval --type mono " + c) == 0);
  CHECK(run_cli("report " + c) == 0);
  CHECK(std::filesystem::exists(dir / "run/report.json"));
}

TEST_CASE("usage, config and I/O errors") {
  testutil::TempDir dir("cli_err");
  CHECK(run_cli("") != 0);
  CHECK(run_cli("synth") != 0);
  CHECK(run_cli("gen-units --type xx --config x.json") != 0);
  CHECK(run_cli("synth --config " + (dir / "missing.json").string()) == 2);
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"seed": 1, "surprise": true})";
  }
  CHECK(run_cli("synth --config " + (dir / "bad.json").string()) == 2);
  {
    std::ofstream f(dir / "invalid.json");
    f << R"({"seed": 1, "probe": {"test_fraction": 2}})";
  }
  CHECK(run_cli("synth --config " + (dir / "invalid.json").string()) == 1);
  CHECK(run_cli("config --preset paper") == 0);
  CHECK(run_cli("config --preset desk") == 0);
}
