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

#include "netcontest/game.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "netcontest/errors.h"
#include "netcontest/experiment.h"
#include "netcontest/optimize.h"
#include "test_util.h"

namespace netcontest {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::InteriorBudgets;
using testing::RandomBudgets;
using testing::RandomSubStochastic;
using testing::RelErr;

Game Isolated(int n, int m, double alpha, const Csf& csf, double cap = 1.0) {
  return Game(InfluenceNetwork(MatrixXd::Zero(n, n), alpha), csf, m, cap);
}

Game RandomGame(int n, int m, const Csf& csf, std::mt19937_64& rng) {
  return Game(InfluenceNetwork(RandomSubStochastic(n, rng), 0.5), csf, m);
}

bool Feasible(const MatrixXd& b, double cap) {
  for (Eigen::Index s = 0; s < b.rows(); ++s) {
    if (b.row(s).minCoeff() < 0.0) return false;
    if (b.row(s).sum() > cap + kFeasibilitySlack) return false;
  }
  return true;
}

TEST_CASE("single node utility by hand") {
  const Game game = Isolated(1, 1, 0.0, Csf::Tullock(1.0, 1.0));
  MatrixXd b(1, 1);
  b << 1.0;
  CHECK(game.Utilities(b)(0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("two-firm single-node gradient by hand") {
  const Game game = Isolated(1, 2, 0.5, Csf::Tullock(1.0, 0.5));
  CHECK(game.centrality()(0) == doctest::Approx(0.5).epsilon(1e-15));
  MatrixXd b(2, 1);
  b << 0.5, 0.5;
  const MatrixXd g = game.Gradients(b);
  CHECK(g(0, 0) == doctest::Approx(-7.0 / 9.0).epsilon(1e-14));
  CHECK(g(1, 0) == doctest::Approx(-7.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("huge noise leaves only the cost term") {
  std::mt19937_64 rng(3);
  const Game game = RandomGame(4, 2, Csf::Tullock(1.0, 1e9), rng);
  const MatrixXd g = game.Gradients(RandomBudgets(2, 4, 1.0, rng));
  CHECK((g.array() + 1.0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("infeasible budgets are rejected") {
  const Game game = Isolated(2, 2, 0.5, Csf::Log(0.5));
  MatrixXd over(2, 2);
  over << 0.7, 0.7, 0.1, 0.1;
  CHECK_THROWS_AS(game.Utilities(over), ValidationError);
  MatrixXd negative(2, 2);
  negative << -0.1, 0.1, 0.1, 0.1;
  CHECK_THROWS_AS(game.Gradients(negative), ValidationError);
  CHECK_THROWS_AS(game.Utilities(MatrixXd::Zero(3, 2)), ValidationError);
  CHECK_THROWS_AS(RunBrd(game, over, {}), ValidationError);
}

TEST_CASE("utility gradient and Hessian match finite differences") {
  std::mt19937_64 rng(31);
  const std::vector<Csf> csfs{Csf::Tullock(1.0, 0.5), Csf::Tullock(0.5, 0.5),
                              Csf::Log(0.5), Csf::Softmax(1.0, 0.5)};
  std::uniform_int_distribution<int> nodes(1, 5);
  std::uniform_int_distribution<int> firms(1, 3);
  const double step = 1e-6;
  double worst_gradient = 0.0;
  double worst_hessian = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const int n = nodes(rng);
    const int m = firms(rng);
    const Game game = RandomGame(n, m, csfs[instance % csfs.size()], rng);
    const MatrixXd b = InteriorBudgets(m, n, 1.0, 1e-2, rng);
    const MatrixXd g = game.Gradients(b);
    const MatrixXd hessian = game.HessianBlocks(b);
    for (int s = 0; s < m; ++s) {
      CHECK((game.UtilityGradient(b, s).transpose() - g.row(s))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      for (int i = 0; i < n; ++i) {
        MatrixXd up = b;
        MatrixXd down = b;
        up(s, i) += step;
        down(s, i) -= step;
        const VectorXd du = (game.Utilities(up) - game.Utilities(down)) /
                            (2 * step);
        worst_gradient = std::max(worst_gradient, RelErr(g(s, i), du(s), 1e-3));
        const MatrixXd dg = (game.Gradients(up) - game.Gradients(down)) /
                            (2 * step);
        for (int r = 0; r < m; ++r) {
          for (int j = 0; j < n; ++j) {
            // Row r*n+j holds d/db_{s,i} of du_r/db_{r,j}.
            worst_hessian = std::max(
                worst_hessian,
                std::abs(hessian(r * n + j, s * n + i) - dg(r, j)) /
                    std::max(std::abs(dg(r, j)), 1e-2));
          }
        }
      }
    }
  }
  CHECK(worst_gradient <= 1e-6);
  CHECK(worst_hessian <= 1e-5);
}

TEST_CASE("Hessian blocks are diagonal") {
  std::mt19937_64 rng(37);
  for (int instance = 0; instance < 20; ++instance) {
    const int n = 2 + instance % 4;
    const int m = 2 + instance % 2;
    const Game game = RandomGame(n, m, Csf::Tullock(1.0, 0.5), rng);
    const MatrixXd b = InteriorBudgets(m, n, 1.0, 1e-3, rng);
    const MatrixXd g = game.HessianBlocks(b);
    REQUIRE(g.rows() == m * n);
    for (int s1 = 0; s1 < m; ++s1) {
      for (int s2 = 0; s2 < m; ++s2) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (i != j) CHECK(g(s1 * n + i, s2 * n + j) == 0.0);
          }
          if (s1 == s2) CHECK(g(s1 * n + i, s1 * n + i) < 0.0);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const MatrixXd node = game.NodeHessian(b, i);
      for (int s1 = 0; s1 < m; ++s1) {
        for (int s2 = 0; s2 < m; ++s2) {
          CHECK(node(s1, s2) == g(s1 * n + i, s2 * n + i));
        }
      }
    }
  }
}

TEST_CASE("smoothness estimates") {
  std::mt19937_64 rng(41);
  const Game concave = RandomGame(3, 2, Csf::Tullock(1.0, 0.5), rng);
  const SmoothnessEstimate est = EstimateSmoothness(concave, 200, 5);
  CHECK(est.sample_points == 200);
  CHECK(est.strongly_concave());
  CHECK(est.b_hat >= est.lambda_hat);
  CHECK(est.StepSize() ==
        doctest::Approx(est.lambda_hat / (est.b_hat * est.b_hat)));
  CHECK(std::isfinite(est.IterationBound(1.0, 1e-6)));

  const Game convex = RandomGame(3, 2, Csf::Exp(0.5), rng);
  const SmoothnessEstimate flat = EstimateSmoothness(convex, 200, 5);
  CHECK_FALSE(flat.strongly_concave());
  CHECK(flat.b_hat >= std::abs(flat.lambda_hat));
  CHECK(flat.StepSize() == 0.0);
  CHECK(std::isinf(flat.IterationBound(1.0, 1e-6)));

  const SmoothnessEstimate again = EstimateSmoothness(concave, 200, 5);
  CHECK(again.lambda_hat == est.lambda_hat);
  CHECK(again.b_hat == est.b_hat);
  CHECK_THROWS_AS(EstimateSmoothness(concave, 0, 5), ValidationError);
}

TEST_CASE("capped simplex projection") {
  VectorXd v(2);
  v << 0.8, 0.6;
  const VectorXd p = ProjectOntoCappedSimplex(v, 1.0);
  CHECK(p(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(0.4).epsilon(1e-15));
  v << -0.3, 0.2;
  CHECK(ProjectOntoCappedSimplex(v, 1.0) == Eigen::Vector2d(0.0, 0.2));

  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 7;
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
    const VectorXd proj = ProjectOntoCappedSimplex(x, 1.0);
    CHECK(proj.minCoeff() >= 0.0);
    CHECK(proj.sum() <= 1.0 + 1e-12);
    CHECK((ProjectOntoCappedSimplex(proj, 1.0) - proj).cwiseAbs().maxCoeff() <=
          1e-14);
    // Variational inequality against random feasible points.
    for (int k = 0; k < 5; ++k) {
      const VectorXd y = RandomBudgets(1, n, 1.0, rng).row(0).transpose();
      CHECK((x - proj).dot(y - proj) <= 1e-12);
    }
  }
}

TEST_CASE("best response dynamics keep every iterate feasible") {
  std::mt19937_64 rng(47);
  for (int instance = 0; instance < 10; ++instance) {
    const int n = 3 + instance % 3;
    const int m = 2 + instance % 2;
    const Game game = RandomGame(n, m, Csf::Tullock(1.0, 0.5), rng);
    BrdOptions options;
    options.gamma = 0.05;
    options.max_iterations = 200;
    options.record_budgets = true;
    const BrdTrace trace = RunBrd(game, RandomBudgets(m, n, 1.0, rng), options);
    REQUIRE_FALSE(trace.records.empty());
    CHECK(trace.records.front().k == 0);
    for (size_t k = 0; k < trace.records.size(); ++k) {
      CHECK(trace.records[k].k == static_cast<int>(k));
      CHECK(Feasible(trace.records[k].budgets, 1.0));
    }
    CHECK(trace.final_budgets == trace.records.back().budgets);
  }
}

TEST_CASE("symmetric start stays exactly symmetric") {
  std::mt19937_64 rng(53);
  const Game game = RandomGame(6, 3, Csf::Tullock(1.0, 0.5), rng);
  MatrixXd start(3, 6);
  const MatrixXd row = RandomBudgets(1, 6, 1.0, rng);
  for (int s = 0; s < 3; ++s) start.row(s) = row.row(0);
  BrdOptions options;
  options.gamma = 0.01;
  options.max_iterations = 500;
  options.record_budgets = true;
  const BrdTrace trace = RunBrd(game, start, options);
  for (const BrdRecord& record : trace.records) {
    for (int s = 1; s < 3; ++s) {
      CHECK(record.budgets.row(s) == record.budgets.row(0));
      CHECK(record.utilities(s) == record.utilities(0));
    }
  }
}

TEST_CASE("permuting firms permutes the trace") {
  std::mt19937_64 rng(59);
  const Game game = RandomGame(5, 3, Csf::Log(0.5), rng);
  const MatrixXd start = RandomBudgets(3, 5, 1.0, rng);
  const std::vector<int> perm{2, 0, 1};
  MatrixXd permuted(3, 5);
  for (int s = 0; s < 3; ++s) permuted.row(s) = start.row(perm[s]);
  BrdOptions options;
  options.gamma = 0.01;
  options.max_iterations = 300;
  options.record_budgets = true;
  const BrdTrace a = RunBrd(game, start, options);
  const BrdTrace b = RunBrd(game, permuted, options);
  REQUIRE(a.records.size() == b.records.size());
  double worst = 0.0;
  for (size_t k = 0; k < a.records.size(); ++k) {
    for (int s = 0; s < 3; ++s) {
      worst = std::max(worst, (b.records[k].budgets.row(s) -
                               a.records[k].budgets.row(perm[s]))
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst, std::abs(b.records[k].utilities(s) -
                                       a.records[k].utilities(perm[s])));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("freeze mode drops a step that leaves the budget set") {
  // An unspent node with an infinite-slope CSF pulls the raw sum above C.
  const Game game = Isolated(2, 1, 0.0, Csf::Tullock(0.5, 0.5));
  MatrixXd start(1, 2);
  start << 0.0, 1.0;
  BrdOptions options;
  options.max_iterations = 10;
  options.record_budgets = true;
  options.projection = ProjectionMode::kPaperFreeze;
  const BrdTrace frozen = RunBrd(game, start, options);
  for (const BrdRecord& record : frozen.records) {
    CHECK(record.budgets == start);
  }
  options.projection = ProjectionMode::kEuclidean;
  const BrdTrace moved = RunBrd(game, start, options);
  // The projected step shifts the whole budget onto the unspent node.
  CHECK(moved.records[1].budgets(0, 0) == doctest::Approx(1.0));
  CHECK(moved.records[1].budgets(0, 1) == 0.0);
  CHECK(ProjectionModeFromString("paper_freeze") ==
        ProjectionMode::kPaperFreeze);
  CHECK(ProjectionModeName(ProjectionMode::kEuclidean) == "euclidean");
  CHECK_THROWS_AS(ProjectionModeFromString("clip"), ValidationError);
}

TEST_CASE("two firms on one isolated node reach the closed-form equilibrium") {
  // M = 1, delta = 0.5: (b + 0.5) = (2b + 0.5)^2 gives b = (sqrt(5) - 1) / 8.
  const Game game = Isolated(1, 2, 0.0, Csf::Tullock(1.0, 0.5));
  MatrixXd start(2, 1);
  start << 0.9, 0.05;
  BrdOptions options;
  options.gamma = 0.01;
  options.max_iterations = 20000;
  options.tolerance = 1e-9;
  const BrdTrace trace = RunBrd(game, start, options);
  CHECK(trace.converged);
  const double b = (std::sqrt(5.0) - 1.0) / 8.0;
  CHECK(trace.final_budgets(0, 0) == doctest::Approx(b).epsilon(1e-6));
  CHECK(trace.final_budgets(1, 0) == doctest::Approx(b).epsilon(1e-6));
  CHECK(trace.records.back().joint_norm < 1e-9);
  CHECK(VerifyNash(game, trace.final_budgets, 1e-6).is_nash);
}

TEST_CASE("single firm at its argmax is an equilibrium") {
  std::mt19937_64 rng(61);
  const Game game = RandomGame(4, 1, Csf::Tullock(1.0, 0.3), rng);
  const RowObjective objective = [&](const MatrixXd& x, MatrixXd* grad) {
    if (grad != nullptr) *grad = game.Gradients(x);
    return game.Utilities(x)(0);
  };
  const AscentResult best =
      ProjectedAscent(objective, MatrixXd::Constant(1, 4, 0.25), 1.0);
  const NashCheck check = VerifyNash(game, best.x, 0.01);
  CHECK(check.is_nash);
  CHECK(check.improvements(0) <= 1e-8);
}

TEST_CASE("counterexample network") {
  const Game game = Example1Game();
  // h = 0.4 everywhere, so u = 0.4 sum M; the rounded table gives
  // sum M = 4.999992137291873 (independent solve).
  const VectorXd zero = game.Utilities(MatrixXd::Zero(2, 5));
  CHECK(zero(0) == doctest::Approx(0.4 * 4.999992137291873).epsilon(1e-12));
  CHECK(zero(1) == zero(0));
  const VectorXd published = game.Utilities(Example1PublishedBudgets());
  CHECK(std::abs(published(0) - 1.0431) <= 0.01);
  CHECK(std::abs(published(1) - 1.1021) <= 0.01);
  // M_i k / 4 < 1 on every node, so spending never pays: the empty profile
  // is an equilibrium and the published budgets are not.
  CHECK(game.centrality().maxCoeff() / 4.0 < 1.0);
  const NashCheck at_zero = VerifyNash(game, MatrixXd::Zero(2, 5), 0.01);
  CHECK(at_zero.is_nash);
  CHECK(at_zero.improvements.maxCoeff() <= 1e-12);
  const NashCheck at_published =
      VerifyNash(game, Example1PublishedBudgets(), 0.01);
  CHECK_FALSE(at_published.is_nash);
}

TEST_CASE("simplex grid") {
  const auto grid = SimplexGrid(3, 4, 1.0);
  // Points of {k in N^3 : sum k <= 4}: C(7, 3) = 35.
  CHECK(grid.size() == 35);
  for (const VectorXd& point : grid) {
    CHECK(point.minCoeff() >= 0.0);
    CHECK(point.sum() <= 1.0 + 1e-12);
  }
  CHECK(CoarseGridDivisions(3, 35) == 4);
}

}  // namespace
}  // namespace netcontest
