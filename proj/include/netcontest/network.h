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

#ifndef NETCONTEST_NETWORK_H_
#define NETCONTEST_NETWORK_H_

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace netcontest {

// Column sums may exceed one by this much before a matrix is rejected as not
// sub-stochastic. Published influence tables are rounded to four decimals.
inline constexpr double kSubStochasticTolerance = 1e-3;

// Customer influence network. influence()(j, i) is the influence of node j on
// node i, so column i collects everything that flows into node i. Columns sum
// to at most one and the diagonal is zero.
class InfluenceNetwork {
 public:
  // Throws ValidationError if any invariant is violated.
  InfluenceNetwork(Eigen::MatrixXd influence, double alpha);

  int size() const { return static_cast<int>(influence_.rows()); }
  double alpha() const { return alpha_; }
  const Eigen::MatrixXd& influence() const { return influence_; }

 private:
  Eigen::MatrixXd influence_;
  double alpha_;
};

// JSON form: {"n": int, "alpha": float, "edges": [[j, i, w], ...]}.
InfluenceNetwork NetworkFromJson(const nlohmann::json& doc);
nlohmann::json NetworkToJson(const InfluenceNetwork& network);

// Dense CSV with n rows of n values; row j lists the influence of j on every
// node. Blank lines and lines starting with '#' are skipped.
InfluenceNetwork NetworkFromCsv(std::istream& in, double alpha);

// Dispatches on extension: .json, or .csv (alpha then comes from the argument).
InfluenceNetwork LoadNetwork(const std::filesystem::path& path,
                             double csv_alpha = 0.5);

// The five-node network of the two-firm counterexample, alpha = 0.5. The
// published table lists one row per influenced node, so it is stored
// transposed here.
InfluenceNetwork Example1Network();

struct Centrality {
  // M_i = (1 - alpha) c_i: marginal value of raising awareness at node i.
  Eigen::VectorXd weighted;
  // c_i: expected total awareness generated by a unit injected at node i.
  Eigen::VectorXd absorption;
};

// Solves (I - alpha E) c = 1 once with a partial-pivot LU factorization.
Centrality ComputeCentrality(const InfluenceNetwork& network);

// Steady state of the awareness dynamics for fixed contest outcomes.
// csf_values is m x n (row s = firm s); the result has the same shape and is
// (1 - alpha) (I - alpha E^T)^{-1} h_s per row.
Eigen::MatrixXd AwarenessLimit(const InfluenceNetwork& network,
                               const Eigen::MatrixXd& csf_values);

// awareness[t] for t = 0..horizon, each m x n.
struct AwarenessTrajectory {
  std::vector<Eigen::MatrixXd> steps;
  int horizon() const { return static_cast<int>(steps.size()) - 1; }
};

// Runs the running-average update
//   x(t) = (1/t) [alpha x(t-1) E + (1 - alpha) H] + (1 - 1/t) x(t-1)
// for t = 1..horizon with H held fixed. An empty initial state means zeros.
AwarenessTrajectory SimulateAwareness(const InfluenceNetwork& network,
                                      const Eigen::MatrixXd& csf_values,
                                      int horizon,
                                      const Eigen::MatrixXd& initial = {});

// Same recursion, keeping only the last state.
Eigen::MatrixXd SimulateAwarenessFinal(const InfluenceNetwork& network,
                                       const Eigen::MatrixXd& csf_values,
                                       int horizon,
                                       const Eigen::MatrixXd& initial = {});

}  // namespace netcontest

#endif  // NETCONTEST_NETWORK_H_
