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

// unitforge <command> --config <path> [--type T] [--seed N]
//
// Exit codes: 0 ok, 1 other errors, 2 I/O, 3 missing prerequisite,
// 4 numeric divergence.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "unitforge/config.hpp"
#include "unitforge/error.hpp"
#include "unitforge/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kIo = 2, kPrerequisite = 3, kDivergence = 4 };

struct Args {
  std::string config;
  std::string type;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

unitforge::RunConfig resolve(const Args& a) {
  auto cfg = unitforge::load_run_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unitforge: context-dependent target units for masked speech pre-training"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", a.config, "run config (JSON)")->required();
    cmd->add_option("--seed", a.seed, "override the config seed");
    cmd->add_flag("-q,--quiet", a.quiet, "no progress lines");
  };
  auto add_type = [&](CLI::App* cmd) {
    cmd->add_option("--type", a.type, "unit type")
        ->required()
        ->check(CLI::IsMember({"mono", "lt", "pt", "pp", "pc"}));
  };

  auto* synth = app.add_subcommand("synth", "write the synthetic oracle corpus");
  auto* uasr = app.add_subcommand("train-uasr", "train the adversarial phoneme labeler");
  auto* gen = app.add_subcommand("gen-units", "generate target units of one type");
  auto* pretrain = app.add_subcommand("pretrain", "masked-prediction pre-training on one unit type");
  auto* eval = app.add_subcommand("eval", "score one unit type and its trained model");
  auto* report = app.add_subcommand("report", "combine eval results into one table");
  auto* all = app.add_subcommand("run", "every stage for every unit type");
  for (auto* cmd : {synth, uasr, gen, pretrain, eval, report, all}) add_common(cmd);
  for (auto* cmd : {gen, pretrain, eval}) add_type(cmd);

  auto* show = app.add_subcommand("config", "print a resolved config (a preset, or --config with overrides)");
  show->add_option("--config", a.config, "run config (JSON)");
  show->add_option("--preset", a.preset, "preset to print when no config is given")
      ->check(CLI::IsMember({"desk", "paper"}));
  show->add_option("--seed", a.seed, "override the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*show) {
      auto cfg = a.config.empty() ? unitforge::RunConfig::preset_named(a.preset) : resolve(a);
      if (a.seed) cfg.seed = *a.seed;
      std::cout << unitforge::to_json_string(cfg) << '\n';
      return kOk;
    }
    const auto cfg = resolve(a);
    std::ostream* log = a.quiet ? nullptr : &std::cerr;
    namespace pl = unitforge::pipeline;
    if (*synth) {
      pl::synth(cfg, log);
    } else if (*uasr) {
      pl::train_uasr(cfg, log);
    } else if (*gen) {
      pl::gen_units(cfg, a.type, log);
    } else if (*pretrain) {
      pl::pretrain(cfg, a.type, log);
    } else if (*eval) {
      pl::eval(cfg, a.type, log);
    } else if (*report) {
      std::cout << pl::report(cfg, log);
    } else if (*all) {
      std::cout << pl::run_all(cfg, log);
    }
    return kOk;
  } catch (const unitforge::PrerequisiteError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrerequisite;
  } catch (const unitforge::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const unitforge::DivergenceError& e) {
    std::cerr << "error: " << e.what() << " (last checkpoint kept)\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
