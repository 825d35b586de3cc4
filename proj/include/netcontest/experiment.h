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

#ifndef NETCONTEST_EXPERIMENT_H_
#define NETCONTEST_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "netcontest/csf.h"
#include "netcontest/game.h"
#include "netcontest/pmean.h"
#include "netcontest/synthgen.h"
#include "netcontest/welfare.h"

namespace netcontest {

// 64-bit FNV-1a.
uint64_t Fnv1a(const std::string& text);

enum class InitKind { kUniform, kRandom, kBiased };

struct InitMode {
  InitKind kind = InitKind::kUniform;
  double mass = 0.5;  // biased only, in (0, 1]

  static InitMode FromJson(const nlohmann::json& doc);
  std::string Name() const;
};

// uniform: C / n everywhere. random: uniform over {b >= 0, sum b <= C}.
// biased: mass C on one random node per firm, the rest spread evenly.
Eigen::MatrixXd InitialProfile(const InitMode& mode, int firms, int nodes,
                               double cap, uint64_t seed);

// Repetition 0 is uniform; the rest alternate random and biased.
InitMode RepetitionInit(int repetition, double biased_mass);

struct BrdExperimentOptions {
  BrdOptions brd;
  std::vector<WelfareSpec> welfare = {WelfareSpec::Utilitarian(),
                                      WelfareSpec::Nash(),
                                      WelfareSpec::Egalitarian()};
  int repetitions = 50;
  double biased_mass = 0.5;
  int restarts = 8;
  uint64_t seed = 0;
  int threads = 1;
  // Use this init for every repetition instead of the mixed scheme.
  std::optional<InitMode> fixed_init;
};

struct RatioBand {
  std::vector<double> mean, std, min, max;
};

struct BrdExperimentResult {
  std::vector<WelfareOptimum> optima;  // one per welfare spec
  std::vector<BrdTrace> traces;        // one per repetition
  std::vector<InitMode> inits;
  // Per welfare spec: R(k) across repetitions, runs that stopped early hold
  // their last value.
  std::vector<RatioBand> bands;
  // Per welfare spec: terminal R over repetitions; NaN when undefined.
  std::vector<double> terminal_mean, terminal_std;
  // Set when an optimum is not positive, so R is undefined.
  std::vector<bool> ratio_defined;
};

BrdExperimentResult RunBrdExperiment(const Game& game,
                                     const BrdExperimentOptions& options);

// Example 1 values and the comparison against them.
struct Example1Check {
  std::string quantity;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Example1Report {
  BrdTrace trace;
  Eigen::VectorXd utilities;
  WelfareOptimum optimum;     // utilitarian
  PoaResult poa;              // utilitarian
  double budget_distance = 0.0;  // L-inf to the published equilibrium
  std::vector<Example1Check> checks;
  bool AllPass() const;
  nlohmann::json ToJson() const;
};

// Published equilibrium budgets and utilities of the two-firm example.
Eigen::MatrixXd Example1PublishedBudgets();
Eigen::Vector2d Example1PublishedUtilities();
Game Example1Game();

Example1Report RunExample1(uint64_t seed, int threads = 1);

// Everything a subcommand needs besides its own config section.
struct RunContext {
  nlohmann::json config = nlohmann::json::object();
  uint64_t seed = 0;
  bool seed_generated = false;
  std::filesystem::path out_dir = "out";
  int threads = 1;
  std::string config_hash;
  std::ostream* log = nullptr;

  nlohmann::json Provenance() const;
  std::string CsvProvenance() const;  // "# config_hash=...,seed=..."
};

// Reads the config file (if any); the seed comes from `seed`, else the
// config, else a random device, in that order.
RunContext MakeContext(const std::optional<std::filesystem::path>& config_path,
                       std::optional<uint64_t> seed,
                       const std::filesystem::path& out_dir, int threads,
                       std::ostream* log);

// Each returns a process exit code and writes its files under out_dir.
int CmdGenData(const RunContext& ctx);
int CmdGenNetwork(const RunContext& ctx);
int CmdEstimate(const RunContext& ctx);
int CmdBrd(const RunContext& ctx);
int CmdWelfare(const RunContext& ctx);
int CmdVerifyCsf(const RunContext& ctx);
int CmdReproduceExample1(const RunContext& ctx);

// Config helpers shared by the commands.
Game GameFromConfig(const nlohmann::json& config, uint64_t seed);
std::vector<Csf> CsfsFromConfig(const nlohmann::json& config);
std::vector<WelfareSpec> WelfareFromConfig(const nlohmann::json& config);
BrdOptions BrdOptionsFromConfig(const nlohmann::json& config);
InfluenceNetwork NetworkFromConfig(const nlohmann::json& config,
                                   uint64_t seed);

// Population with the given demographics read back from a customers CSV.
Population ReadCustomersCsv(std::istream& in, const Demographics& demographics);

}  // namespace netcontest

#endif  // NETCONTEST_EXPERIMENT_H_
