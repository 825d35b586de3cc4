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

#include "netcontest/welfare.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "netcontest/errors.h"
#include "netcontest/optimize.h"
#include "netcontest/parallel.h"

namespace netcontest {

namespace {

constexpr double kUndefined = -std::numeric_limits<double>::infinity();

// Power means used in place of the minimum, in order.
constexpr double kEgalitarianPath[] = {-8.0, -32.0, -128.0};

RowObjective JointObjective(const Game& game, WelfareSpec spec) {
  return [&game, spec](const Eigen::MatrixXd& x, Eigen::MatrixXd* grad) {
    Eigen::VectorXd utilities;
    game.Evaluate(x, &utilities, nullptr);
    const WelfareResult w = PMean(utilities, spec);
    if (!w.defined) return kUndefined;
    if (grad) {
      *grad = game.WeightedUtilityGradient(
          x, PMeanGradient(utilities, spec, w.value));
    }
    return w.value;
  };
}

// Every firm plays row 0 of x. All utilities coincide for a firm-symmetric
// CSF, so their mean is the welfare for every p where it is defined.
RowObjective SymmetricObjective(const Game& game) {
  return [&game](const Eigen::MatrixXd& x, Eigen::MatrixXd* grad) {
    const Eigen::MatrixXd profile = x.row(0).replicate(game.firms(), 1);
    const Eigen::VectorXd weights =
        Eigen::VectorXd::Constant(game.firms(), 1.0 / game.firms());
    if (grad) {
      *grad = game.WeightedUtilityGradient(profile, weights).colwise().sum();
    }
    return game.Utilities(profile).mean();
  };
}

Eigen::MatrixXd RandomProfile(int rows, int cols, double cap, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exponential(1.0);
  Eigen::MatrixXd out(rows, cols);
  for (int s = 0; s < rows; ++s) {
    double total = 0.0;
    for (int i = 0; i < cols; ++i) total += out(s, i) = exponential(rng);
    total += exponential(rng);
    out.row(s) *= cap / total;
  }
  return out;
}

// Climbs W_p from start; returns the final point and its exact welfare.
std::pair<Eigen::MatrixXd, WelfareResult> ClimbJoint(const Game& game,
                                                     const WelfareSpec& spec,
                                                     Eigen::MatrixXd start) {
  Eigen::MatrixXd x = std::move(start);
  if (!PMean(game.Utilities(x), spec).defined) {
    // Utilitarian welfare is defined everywhere; use it to reach a region
    // where every utility is positive.
    x = ProjectedAscent(JointObjective(game, WelfareSpec::Utilitarian()), x,
                        game.cap())
            .x;
  }
  if (PMean(game.Utilities(x), spec).defined) {
    if (spec.IsEgalitarian()) {
      for (double p : kEgalitarianPath) {
        x = ProjectedAscent(JointObjective(game, WelfareSpec{p}), x,
                            game.cap())
                .x;
      }
    } else {
      x = ProjectedAscent(JointObjective(game, spec), x, game.cap()).x;
    }
  }
  WelfareResult w = PMean(game.Utilities(x), spec);
  return {std::move(x), std::move(w)};
}

}  // namespace

WelfareResult Welfare(const Game& game, const Eigen::MatrixXd& budgets,
                      const WelfareSpec& spec) {
  return PMean(game.Utilities(budgets), spec);
}

WelfareOptimum WelfareOptimize(const Game& game, const WelfareSpec& spec,
                               const WelfareOptimizeOptions& options) {
  if (options.restarts < 1) throw ValidationError("restarts must be >= 1");
  const int m = game.firms();
  const int n = game.nodes();
  const double cap = game.cap();

  auto start_profile = [&](int r, int rows) -> Eigen::MatrixXd {
    if (r == 0) return Eigen::MatrixXd::Zero(rows, n);
    if (r == 1) return Eigen::MatrixXd::Constant(rows, n, cap / n);
    return RandomProfile(rows, n, cap, MixSeed(options.seed, r));
  };

  // Concentrated starts on the most central nodes; non-concave CSFs reward
  // putting a whole budget on one node.
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return game.centrality()[a] > game.centrality()[b];
  });
  const int top = std::min(n, options.vertex_starts);
  std::vector<Eigen::MatrixXd> vertex_joint;
  std::vector<Eigen::MatrixXd> vertex_symmetric;
  for (int k = 0; k < top; ++k) {
    Eigen::MatrixXd lone = Eigen::MatrixXd::Zero(m, n);
    lone(0, order[k]) = cap;
    vertex_joint.push_back(std::move(lone));
    Eigen::MatrixXd spread = Eigen::MatrixXd::Zero(m, n);
    for (int s = 0; s < m; ++s) spread(s, order[(k + s) % n]) = cap;
    vertex_joint.push_back(std::move(spread));
    Eigen::MatrixXd one = Eigen::MatrixXd::Zero(1, n);
    one(0, order[k]) = cap;
    vertex_symmetric.push_back(std::move(one));
  }

  // Candidate slots: joint restarts, the grid seed, joint vertex starts,
  // symmetric restarts, symmetric vertex starts.
  const int joint_count = options.restarts;
  const bool symmetric = options.symmetric && m > 1;
  const int vertex_count = static_cast<int>(vertex_joint.size());
  const int symmetric_count =
      symmetric ? options.restarts + static_cast<int>(vertex_symmetric.size())
                : 0;
  std::vector<WelfareOptimum> candidates(
      static_cast<size_t>(joint_count + 1 + vertex_count + symmetric_count));

  ParallelFor(joint_count, options.threads, [&](int r) {
    auto [x, w] = ClimbJoint(game, spec, start_profile(r, m));
    candidates[r] = {std::move(x), w.value, w.defined, false};
  });

  // Joint grid: the per-firm grid raised to the m-th power.
  int divisions = 0;
  for (int d : {10, 4, 2}) {
    double per_firm = 1.0;
    for (int k = 1; k <= d; ++k) per_firm *= static_cast<double>(n + k) / k;
    if (std::pow(per_firm, m) <= static_cast<double>(options.grid_limit)) {
      divisions = d;
      break;
    }
  }
  if (divisions > 0) {
    const auto grid = SimplexGrid(n, divisions, cap);
    std::vector<size_t> index(static_cast<size_t>(m), 0);
    Eigen::MatrixXd profile(m, n);
    Eigen::MatrixXd best_point;
    double best = kUndefined;
    while (true) {
      for (int s = 0; s < m; ++s) profile.row(s) = grid[index[s]].transpose();
      const WelfareResult w = Welfare(game, profile, spec);
      if (w.defined && w.value > best) {
        best = w.value;
        best_point = profile;
      }
      int pos = m - 1;
      while (pos >= 0 && ++index[pos] == grid.size()) index[pos--] = 0;
      if (pos < 0) break;
    }
    if (best_point.size() > 0) {
      auto [x, w] = ClimbJoint(game, spec, best_point);
      candidates[joint_count] = {std::move(x), w.value, w.defined, false};
    }
  }

  ParallelFor(vertex_count, options.threads, [&](int r) {
    auto [x, w] = ClimbJoint(game, spec, vertex_joint[r]);
    candidates[joint_count + 1 + r] = {std::move(x), w.value, w.defined, false};
  });

  ParallelFor(symmetric_count, options.threads, [&](int r) {
    Eigen::MatrixXd start = r < options.restarts
                                ? start_profile(r, 1)
                                : vertex_symmetric[r - options.restarts];
    AscentResult result =
        ProjectedAscent(SymmetricObjective(game), std::move(start), cap);
    Eigen::MatrixXd profile = result.x.row(0).replicate(m, 1);
    const WelfareResult w = Welfare(game, profile, spec);
    candidates[joint_count + 1 + vertex_count + r] = {std::move(profile),
                                                      w.value, w.defined, true};
  });

  WelfareOptimum best;
  best.value = kUndefined;
  for (auto& candidate : candidates) {
    if (candidate.defined && candidate.value > best.value) {
      best = std::move(candidate);
    }
  }
  if (!best.defined) {
    best = WelfareOptimum{Eigen::MatrixXd::Zero(m, n), 0.0, false, false};
  }
  return best;
}

PoaResult PriceOfAnarchy(const Game& game, const WelfareSpec& spec,
                         const std::vector<Eigen::MatrixXd>& equilibria,
                         double optimum) {
  if (equilibria.empty()) throw ValidationError("equilibrium set is empty");
  PoaResult out;
  out.optimum = optimum;
  out.worst_welfare = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < equilibria.size(); ++k) {
    const WelfareResult w = Welfare(game, equilibria[k], spec);
    if (!w.defined) return out;
    if (w.value < out.worst_welfare) {
      out.worst_welfare = w.value;
      out.worst_index = static_cast<int>(k);
    }
  }
  if (!(out.worst_welfare > 0.0)) return out;
  out.ratio = optimum / out.worst_welfare;
  out.defined = true;
  return out;
}

std::vector<std::pair<int, double>> WelfareRatioCurve(const BrdTrace& trace,
                                                      const WelfareSpec& spec,
                                                      double optimum) {
  if (!(optimum > 0.0)) {
    throw ValidationError("welfare ratio needs a positive optimum");
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(trace.records.size());
  for (const auto& record : trace.records) {
    const WelfareResult w = PMean(record.utilities, spec);
    out.emplace_back(record.k,
                     w.defined ? w.value / optimum
                               : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace netcontest
