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

#ifndef NETCONTEST_WELFARE_H_
#define NETCONTEST_WELFARE_H_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netcontest/game.h"
#include "netcontest/pmean.h"

namespace netcontest {

WelfareResult Welfare(const Game& game, const Eigen::MatrixXd& budgets,
                      const WelfareSpec& spec);

struct WelfareOptimizeOptions {
  int restarts = 8;
  uint64_t seed = 0;
  // Also search the manifold where every firm plays the same vector.
  bool symmetric = true;
  // Seed one extra ascent from the best point of a coarse joint grid when the
  // grid has at most this many points.
  long grid_limit = 200000;
  // Starts that put a whole budget on one of this many most central nodes.
  int vertex_starts = 5;
  int threads = 1;
};

struct WelfareOptimum {
  Eigen::MatrixXd budgets;
  double value = 0.0;
  bool defined = false;
  bool from_symmetric = false;
};

// Projected gradient ascent on W_p over the joint feasible set from several
// restarts. The minimum (p = -inf) is approached through power means with
// p = -8, -32, -128. Ties go to the lowest restart index.
WelfareOptimum WelfareOptimize(const Game& game, const WelfareSpec& spec,
                               const WelfareOptimizeOptions& options = {});

struct PoaResult {
  double optimum = 0.0;
  double worst_welfare = 0.0;
  int worst_index = -1;
  double ratio = 0.0;
  bool defined = false;
};

// W_opt / min over the equilibria of W_p. Undefined when W_p is undefined at
// some equilibrium or the worst equilibrium welfare is not positive.
PoaResult PriceOfAnarchy(const Game& game, const WelfareSpec& spec,
                         const std::vector<Eigen::MatrixXd>& equilibria,
                         double optimum);

// (k, W_p(B(k)) / optimum) for every trace record; NaN where undefined.
std::vector<std::pair<int, double>> WelfareRatioCurve(const BrdTrace& trace,
                                                      const WelfareSpec& spec,
                                                      double optimum);

}  // namespace netcontest

#endif  // NETCONTEST_WELFARE_H_
