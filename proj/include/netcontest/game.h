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

#ifndef NETCONTEST_GAME_H_
#define NETCONTEST_GAME_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcontest/csf.h"
#include "netcontest/network.h"
#include "netcontest/pmean.h"

namespace netcontest {

// Row sums may exceed the cap by this much and still count as feasible.
inline constexpr double kFeasibilitySlack = 1e-9;

enum class ProjectionMode {
  kEuclidean,    // project each firm's step onto {b >= 0, sum b <= C}
  kPaperFreeze,  // drop a firm's whole step when it would leave the set
};

ProjectionMode ProjectionModeFromString(const std::string& name);
std::string ProjectionModeName(ProjectionMode mode);

// Throws ValidationError unless budgets is firms x nodes, nonnegative and
// every row sums to at most cap.
void CheckBudgets(const Eigen::MatrixXd& budgets, int firms, int nodes,
                  double cap);

// m firms competing on a fixed network with a shared CSF. Centrality is
// computed once at construction. Budget matrices are m x n, row s = firm s.
class Game {
 public:
  Game(InfluenceNetwork network, Csf csf, int firms, double cap = 1.0);

  int firms() const { return firms_; }
  int nodes() const { return network_.size(); }
  double cap() const { return cap_; }
  const InfluenceNetwork& network() const { return network_; }
  const Csf& csf() const { return csf_; }
  const Eigen::VectorXd& centrality() const { return centrality_.weighted; }

  void Check(const Eigen::MatrixXd& budgets) const;

  // u_s = sum_i M_i h_si - sum_i b_si.
  Eigen::VectorXd Utilities(const Eigen::MatrixXd& budgets) const;
  // m x n success probabilities.
  Eigen::MatrixXd SuccessProbabilities(const Eigen::MatrixXd& budgets) const;
  // Gradient of u_s with respect to firm s's own budgets.
  Eigen::VectorXd UtilityGradient(const Eigen::MatrixXd& budgets,
                                  int firm) const;
  // Row s holds UtilityGradient(budgets, s).
  Eigen::MatrixXd Gradients(const Eigen::MatrixXd& budgets) const;
  // Utilities and own gradients from one pass over the nodes.
  void Evaluate(const Eigen::MatrixXd& budgets, Eigen::VectorXd* utilities,
                Eigen::MatrixXd* gradients) const;
  // Gradient of sum_r weights_r u_r with respect to the whole budget matrix.
  Eigen::MatrixXd WeightedUtilityGradient(const Eigen::MatrixXd& budgets,
                                          const Eigen::VectorXd& weights) const;
  // mn x mn matrix; entry (s1 n + i, s2 n + j) is
  // d^2 u_{s1} / d b_{s2 j} d b_{s1 i}. Only same-node entries are nonzero.
  Eigen::MatrixXd HessianBlocks(const Eigen::MatrixXd& budgets) const;
  // The m x m block of HessianBlocks restricted to node i.
  Eigen::MatrixXd NodeHessian(const Eigen::MatrixXd& budgets, int node) const;

 private:
  InfluenceNetwork network_;
  Csf csf_;
  int firms_;
  double cap_;
  Centrality centrality_;
};

struct SmoothnessEstimate {
  double lambda_hat = 0.0;  // min over samples of -lambda_max(sym G)
  double b_hat = 0.0;       // max over samples of ||G||_2
  int sample_points = 0;
  bool strongly_concave() const { return lambda_hat > 0.0; }
  // lambda / B^2; zero when strong concavity was not detected.
  double StepSize() const;
  // (2 B^2 / lambda^2) log(||g(0)|| / eps), rounded up.
  double IterationBound(double initial_norm, double eps) const;
};

// Samples profiles uniformly from the interior of the feasible set.
SmoothnessEstimate EstimateSmoothness(const Game& game, int samples,
                                      uint64_t seed);

struct WelfareReference {
  WelfareSpec spec;
  double optimum = 0.0;
};

struct BrdOptions {
  double gamma = 1e-4;
  int max_iterations = 5000;
  double tolerance = 1e-6;
  ProjectionMode projection = ProjectionMode::kEuclidean;
  // Welfare ratios W_p(B(k)) / optimum are recorded for each reference.
  std::vector<WelfareReference> references;
  bool record_budgets = false;
};

struct BrdRecord {
  int k = 0;
  Eigen::VectorXd utilities;
  // Per-firm norms of the effective direction (g + mu).
  Eigen::VectorXd firm_norms;
  double joint_norm = 0.0;
  // One entry per reference; NaN where the welfare is undefined.
  std::vector<double> welfare_ratios;
  Eigen::MatrixXd budgets;  // empty unless record_budgets
};

struct BrdTrace {
  std::vector<BrdRecord> records;  // k = 0, 1, ..., last
  bool converged = false;
  Eigen::MatrixXd final_budgets;
};

// Simultaneous projected gradient steps for all firms (Jacobi). Stops once
// the joint norm of (g + mu) drops below tolerance or after max_iterations
// steps. Deterministic.
BrdTrace RunBrd(const Game& game, const Eigen::MatrixXd& initial,
                const BrdOptions& options);

struct BestResponseResult {
  Eigen::VectorXd budgets;
  double utility = 0.0;
};

// Maximizes u_s over firm s's feasible set with the rivals held fixed, from
// several restarts plus a coarse simplex grid.
BestResponseResult BestResponse(const Game& game,
                                const Eigen::MatrixXd& budgets, int firm);

struct NashCheck {
  bool is_nash = false;
  // best response utility minus current utility, per firm
  Eigen::VectorXd improvements;
};

NashCheck VerifyNash(const Game& game, const Eigen::MatrixXd& budgets,
                     double tol);

// Lattice points {x >= 0, sum x <= cap} with spacing cap / divisions.
std::vector<Eigen::VectorXd> SimplexGrid(int dim, int divisions, double cap);
// Largest divisions in {20, 10, 4, 2, 1} whose grid has at most max_points.
int CoarseGridDivisions(int dim, long max_points);

}  // namespace netcontest

#endif  // NETCONTEST_GAME_H_
