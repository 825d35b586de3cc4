// Copyright 2026 The netcontest Authors.
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

// Command-line driver. Exit codes: 0 success, 1 invalid input, 2 runtime
// failure.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "netcontest/errors.h"
#include "netcontest/experiment.h"

namespace {

using netcontest::RunContext;

const std::map<std::string, std::pair<std::string, int (*)(const RunContext&)>>
    kCommands = {
        {"gen-data",
         {"Generate customers, holdings and the auxiliary graph",
          netcontest::CmdGenData}},
        {"gen-network",
         {"Generate an influence network for the game",
          netcontest::CmdGenNetwork}},
        {"estimate",
         {"Estimate influence from holdings and validate predictions",
          netcontest::CmdEstimate}},
        {"brd",
         {"Run best-response dynamics and write traces",
          netcontest::CmdBrd}},
        {"welfare",
         {"Optimal welfare and price of anarchy", netcontest::CmdWelfare}},
        {"verify-csf",
         {"Grid audit of contest success function conditions",
          netcontest::CmdVerifyCsf}},
        {"reproduce-example1",
         {"Recompute the two-firm counterexample and compare",
          netcontest::CmdReproduceExample1}},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competitive awareness contests on influence networks"};
  std::optional<std::string> config_path;
  std::optional<uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
  app.add_option("--config", config_path, "Experiment config (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed; overrides the config");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads, 0 = all cores")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);
  for (const auto& [name, entry] : kCommands) {
    app.add_subcommand(name, entry.first)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (threads == 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    std::optional<std::filesystem::path> path;
    if (config_path) path = *config_path;
    const RunContext ctx = netcontest::MakeContext(path, seed, out_dir, threads,
                                                   &std::cout);
    if (ctx.seed_generated) std::cout << "generated seed: " << ctx.seed << '\n';
    return kCommands.at(command).second(ctx);
  } catch (const netcontest::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}
