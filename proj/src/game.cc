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
#include <limits>
#include <random>
#include <utility>

#include "netcontest/errors.h"
#include "netcontest/optimize.h"

namespace netcontest {

namespace {

// Feasible-set test used by the freeze rule; stricter than CheckBudgets.
bool LeavesFeasibleSet(const Eigen::VectorXd& row, double cap) {
  return (row.array() < 0.0).any() || row.sum() > cap + 1e-12;
}

std::vector<double> Column(const Eigen::MatrixXd& budgets, Eigen::Index node) {
  std::vector<double> out(static_cast<size_t>(budgets.rows()));
  for (Eigen::Index s = 0; s < budgets.rows(); ++s) out[s] = budgets(s, node);
  return out;
}

}  // namespace

ProjectionMode ProjectionModeFromString(const std::string& name) {
  if (name == "euclidean") return ProjectionMode::kEuclidean;
  if (name == "paper_freeze") return ProjectionMode::kPaperFreeze;
  throw ValidationError("unknown projection mode '" + name + "'");
}

std::string ProjectionModeName(ProjectionMode mode) {
  return mode == ProjectionMode::kEuclidean ? "euclidean" : "paper_freeze";
}

void CheckBudgets(const Eigen::MatrixXd& budgets, int firms, int nodes,
                  double cap) {
  if (budgets.rows() != firms || budgets.cols() != nodes) {
    throw ValidationError("budget matrix must be " + std::to_string(firms) +
                          " x " + std::to_string(nodes));
  }
  for (int s = 0; s < firms; ++s) {
    for (int i = 0; i < nodes; ++i) {
      if (!(budgets(s, i) >= 0.0) || !std::isfinite(budgets(s, i))) {
        throw ValidationError("negative or non-finite budget at firm " +
                              std::to_string(s) + ", node " +
                              std::to_string(i));
      }
    }
    if (budgets.row(s).sum() > cap + kFeasibilitySlack) {
      throw ValidationError("firm " + std::to_string(s) +
                            " exceeds the budget cap");
    }
  }
}

Game::Game(InfluenceNetwork network, Csf csf, int firms, double cap)
    : network_(std::move(network)),
      csf_(std::move(csf)),
      firms_(firms),
      cap_(cap),
      centrality_(ComputeCentrality(network_)) {
  if (firms_ < 1) throw ValidationError("need at least one firm");
  if (!(cap_ > 0.0) || !std::isfinite(cap_)) {
    throw ValidationError("budget cap must be positive");
  }
}

void Game::Check(const Eigen::MatrixXd& budgets) const {
  CheckBudgets(budgets, firms_, nodes(), cap_);
}

void Game::Evaluate(const Eigen::MatrixXd& budgets, Eigen::VectorXd* utilities,
                    Eigen::MatrixXd* gradients) const {
  Check(budgets);
  const int n = nodes();
  const Eigen::VectorXd& weight = centrality_.weighted;
  // Plain per-node accumulation: identical rows must give identical
  // utilities, which vectorized row reductions do not guarantee.
  if (utilities) *utilities = Eigen::VectorXd::Zero(firms_);
  if (gradients) gradients->resize(firms_, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> column = Column(budgets, i);
    const NodeCsf node = csf_.EvaluateNode(column);
    if (utilities) {
      *utilities += weight[i] * node.h - budgets.col(i);
    }
    if (gradients) {
      gradients->col(i) = weight[i] * node.dh.diagonal().array() - 1.0;
    }
  }
}

Eigen::VectorXd Game::Utilities(const Eigen::MatrixXd& budgets) const {
  Eigen::VectorXd out;
  Evaluate(budgets, &out, nullptr);
  return out;
}

Eigen::MatrixXd Game::SuccessProbabilities(
    const Eigen::MatrixXd& budgets) const {
  Check(budgets);
  Eigen::MatrixXd out(firms_, nodes());
  std::vector<double> values(static_cast<size_t>(firms_));
  for (int i = 0; i < nodes(); ++i) {
    csf_.Values(Column(budgets, i), values);
    for (int s = 0; s < firms_; ++s) out(s, i) = values[s];
  }
  return out;
}

Eigen::VectorXd Game::UtilityGradient(const Eigen::MatrixXd& budgets,
                                      int firm) const {
  if (firm < 0 || firm >= firms_) throw ValidationError("firm out of range");
  return Gradients(budgets).row(firm).transpose();
}

Eigen::MatrixXd Game::Gradients(const Eigen::MatrixXd& budgets) const {
  Eigen::MatrixXd out;
  Evaluate(budgets, nullptr, &out);
  return out;
}

Eigen::MatrixXd Game::WeightedUtilityGradient(
    const Eigen::MatrixXd& budgets, const Eigen::VectorXd& weights) const {
  Check(budgets);
  if (weights.size() != firms_) throw ValidationError("one weight per firm");
  Eigen::MatrixXd out(firms_, nodes());
  for (int i = 0; i < nodes(); ++i) {
    const NodeCsf node = csf_.EvaluateNode(Column(budgets, i));
    // d/d b_si of sum_r w_r M_i h_ri.
    out.col(i) = centrality_.weighted[i] * (node.dh.transpose() * weights);
  }
  out.colwise() -= weights;
  return out;
}

Eigen::MatrixXd Game::NodeHessian(const Eigen::MatrixXd& budgets,
                                  int node) const {
  const NodeCsf values = csf_.EvaluateNode(Column(budgets, node));
  return centrality_.weighted[node] * values.d2h;
}

Eigen::MatrixXd Game::HessianBlocks(const Eigen::MatrixXd& budgets) const {
  Check(budgets);
  const int n = nodes();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(firms_ * n, firms_ * n);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd block = NodeHessian(budgets, i);
    for (int s1 = 0; s1 < firms_; ++s1) {
      for (int s2 = 0; s2 < firms_; ++s2) {
        out(s1 * n + i, s2 * n + i) = block(s1, s2);
      }
    }
  }
  return out;
}

double SmoothnessEstimate::StepSize() const {
  if (!strongly_concave() || !(b_hat > 0.0)) return 0.0;
  return lambda_hat / (b_hat * b_hat);
}

double SmoothnessEstimate::IterationBound(double initial_norm,
                                          double eps) const {
  if (!strongly_concave()) return std::numeric_limits<double>::infinity();
  if (initial_norm <= eps) return 0.0;
  const double ratio = b_hat / lambda_hat;
  return std::ceil(2.0 * ratio * ratio * std::log(initial_norm / eps));
}

SmoothnessEstimate EstimateSmoothness(const Game& game, int samples,
                                      uint64_t seed) {
  if (samples < 1) throw ValidationError("need at least one sample");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exponential(1.0);
  const int m = game.firms();
  const int n = game.nodes();
  SmoothnessEstimate out;
  out.lambda_hat = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd budgets(m, n);
  for (int sample = 0; sample < samples; ++sample) {
    // First n coordinates of a flat Dirichlet on n + 1 parts.
    for (int s = 0; s < m; ++s) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += budgets(s, i) = exponential(rng);
      total += exponential(rng);
      budgets.row(s) *= game.cap() / total;
    }
    // G is block diagonal across nodes once its entries are regrouped, so
    // its spectrum is the union of the per-node spectra.
    double top_eigenvalue = -std::numeric_limits<double>::infinity();
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXd block = game.NodeHessian(budgets, i);
      const Eigen::MatrixXd sym = 0.5 * (block + block.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          sym, Eigen::EigenvaluesOnly);
      top_eigenvalue = std::max(top_eigenvalue, eig.eigenvalues().maxCoeff());
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
      norm = std::max(norm, svd.singularValues()[0]);
    }
    out.lambda_hat = std::min(out.lambda_hat, -top_eigenvalue);
    out.b_hat = std::max(out.b_hat, norm);
    ++out.sample_points;
  }
  return out;
}

BrdTrace RunBrd(const Game& game, const Eigen::MatrixXd& initial,
                const BrdOptions& options) {
  if (!(options.gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (options.max_iterations < 1) throw ValidationError("K must be >= 1");
  if (!(options.tolerance > 0.0)) throw ValidationError("eps must be positive");
  game.Check(initial);
  const int m = game.firms();
  const double gamma = options.gamma;
  BrdTrace trace;
  trace.records.reserve(static_cast<size_t>(options.max_iterations) + 1);
  Eigen::MatrixXd budgets = initial;
  Eigen::MatrixXd next(budgets.rows(), budgets.cols());
  Eigen::MatrixXd direction(budgets.rows(), budgets.cols());
  Eigen::VectorXd utilities;
  Eigen::MatrixXd gradients;
  for (int k = 0;; ++k) {
    game.Evaluate(budgets, &utilities, &gradients);
    for (int s = 0; s < m; ++s) {
      Eigen::VectorXd raw = (budgets.row(s) + gamma * gradients.row(s))
                                .transpose();
      if (options.projection == ProjectionMode::kEuclidean) {
        next.row(s) = ProjectOntoCappedSimplex(raw, game.cap()).transpose();
        // g + mu with mu = (projected - raw) / gamma.
        direction.row(s) = (next.row(s) - budgets.row(s)) / gamma;
      } else if (LeavesFeasibleSet(raw, game.cap())) {
        next.row(s) = budgets.row(s);
        direction.row(s).setZero();
      } else {
        next.row(s) = raw.transpose();
        direction.row(s) = gradients.row(s);
      }
    }
    BrdRecord record;
    record.k = k;
    record.utilities = utilities;
    record.firm_norms = direction.rowwise().norm();
    record.joint_norm = direction.norm();
    for (const auto& ref : options.references) {
      const WelfareResult w = PMean(utilities, ref.spec);
      record.welfare_ratios.push_back(
          w.defined ? w.value / ref.optimum
                    : std::numeric_limits<double>::quiet_NaN());
    }
    if (options.record_budgets) record.budgets = budgets;
    const double joint = record.joint_norm;
    trace.records.push_back(std::move(record));
    if (joint < options.tolerance) {
      trace.converged = true;
      break;
    }
    if (k == options.max_iterations) break;
    budgets.swap(next);
  }
  trace.final_budgets = budgets;
  return trace;
}

std::vector<Eigen::VectorXd> SimplexGrid(int dim, int divisions, double cap) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd point = Eigen::VectorXd::Zero(dim);
  const double unit = cap / divisions;
  auto fill = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim) {
      out.push_back(point);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      point[pos] = c * unit;
      self(self, pos + 1, remaining - c);
    }
    point[pos] = 0.0;
  };
  fill(fill, 0, divisions);
  return out;
}

int CoarseGridDivisions(int dim, long max_points) {
  for (int divisions : {20, 10, 4, 2, 1}) {
    // C(divisions + dim, dim) without overflow.
    double count = 1.0;
    for (int k = 1; k <= divisions; ++k) {
      count *= static_cast<double>(dim + k) / k;
    }
    if (count <= static_cast<double>(max_points)) return divisions;
  }
  return 1;
}

BestResponseResult BestResponse(const Game& game,
                                const Eigen::MatrixXd& budgets, int firm) {
  game.Check(budgets);
  const int n = game.nodes();
  Eigen::MatrixXd profile = budgets;
  auto value_at = [&](const Eigen::VectorXd& own) {
    profile.row(firm) = own.transpose();
    return game.Utilities(profile)[firm];
  };
  RowObjective objective = [&](const Eigen::MatrixXd& x,
                               Eigen::MatrixXd* grad) {
    profile.row(firm) = x.row(0);
    Eigen::VectorXd utilities;
    Eigen::MatrixXd gradients;
    game.Evaluate(profile, &utilities, grad ? &gradients : nullptr);
    if (grad) *grad = gradients.row(firm);
    return utilities[firm];
  };

  std::vector<Eigen::VectorXd> starts = {
      budgets.row(firm).transpose(), Eigen::VectorXd::Zero(n),
      Eigen::VectorXd::Constant(n, game.cap() / n)};
  // Best few points of a coarse grid seed further ascents.
  const int divisions = CoarseGridDivisions(n, 5000);
  std::vector<std::pair<double, Eigen::VectorXd>> scored;
  for (auto& point : SimplexGrid(n, divisions, game.cap())) {
    scored.emplace_back(value_at(point), std::move(point));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; k < std::min<size_t>(3, scored.size()); ++k) {
    starts.push_back(scored[k].second);
  }

  BestResponseResult best;
  best.utility = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    AscentResult result =
        ProjectedAscent(objective, start.transpose(), game.cap());
    if (result.value > best.utility) {
      best.utility = result.value;
      best.budgets = result.x.row(0).transpose();
    }
  }
  if (!scored.empty() && scored.front().first > best.utility) {
    best.utility = scored.front().first;
    best.budgets = scored.front().second;
  }
  return best;
}

NashCheck VerifyNash(const Game& game, const Eigen::MatrixXd& budgets,
                     double tol) {
  const Eigen::VectorXd current = game.Utilities(budgets);
  NashCheck out;
  out.improvements.resize(game.firms());
  for (int s = 0; s < game.firms(); ++s) {
    const BestResponseResult br = BestResponse(game, budgets, s);
    out.improvements[s] = std::max(0.0, br.utility - current[s]);
  }
  out.is_nash = (out.improvements.array() <= tol).all();
  return out;
}

}  // namespace netcontest
