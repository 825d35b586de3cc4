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

#include "netcontest/network.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "netcontest/errors.h"

namespace netcontest {

namespace {

constexpr double kResidualLimit = 1e-10;

void CheckInitialState(const Eigen::MatrixXd& initial, Eigen::Index firms,
                       Eigen::Index nodes) {
  if (initial.rows() != firms || initial.cols() != nodes) {
    throw ValidationError("initial awareness has wrong shape");
  }
  if ((initial.array() < 0.0).any() || (initial.array() > 1.0).any()) {
    throw ValidationError("initial awareness outside [0, 1]");
  }
}

void CheckCsfValues(const Eigen::MatrixXd& csf_values, int nodes) {
  if (csf_values.cols() != nodes) {
    throw ValidationError("CSF value matrix has " +
                          std::to_string(csf_values.cols()) +
                          " columns, network has " + std::to_string(nodes) +
                          " nodes");
  }
  for (Eigen::Index s = 0; s < csf_values.rows(); ++s) {
    for (Eigen::Index i = 0; i < csf_values.cols(); ++i) {
      double h = csf_values(s, i);
      if (!(h >= 0.0 && h <= 1.0)) {
        throw ValidationError("CSF value outside [0, 1] at firm " +
                              std::to_string(s) + ", node " +
                              std::to_string(i));
      }
    }
  }
}

// One step of the running-average recursion, in place.
void StepAwareness(const Eigen::MatrixXd& influence, double alpha,
                   const Eigen::MatrixXd& csf_values, int t,
                   Eigen::MatrixXd* state, Eigen::MatrixXd* scratch) {
  const double inv_t = 1.0 / t;
  scratch->noalias() = *state * influence;
  *state = inv_t * (alpha * *scratch + (1.0 - alpha) * csf_values) +
           (1.0 - inv_t) * *state;
}

}  // namespace

InfluenceNetwork::InfluenceNetwork(Eigen::MatrixXd influence, double alpha)
    : influence_(std::move(influence)), alpha_(alpha) {
  if (influence_.rows() == 0 || influence_.rows() != influence_.cols()) {
    throw ValidationError("influence matrix must be square and non-empty");
  }
  if (!(alpha_ >= 0.0 && alpha_ < 1.0)) {
    throw ValidationError("alpha must lie in [0, 1)");
  }
  const int n = size();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double w = influence_(j, i);
      if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
        throw ValidationError("influence entry (" + std::to_string(j) + ", " +
                              std::to_string(i) + ") outside [0, 1]");
      }
    }
    if (influence_(j, j) != 0.0) {
      throw ValidationError("nonzero diagonal at node " + std::to_string(j));
    }
  }
  for (int i = 0; i < n; ++i) {
    double sum = influence_.col(i).sum();
    if (sum > 1.0 + kSubStochasticTolerance) {
      std::ostringstream msg;
      msg << "column " << i << " not sub-stochastic (sum " << sum << ")";
      throw ValidationError(msg.str());
    }
  }
}

InfluenceNetwork NetworkFromJson(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("alpha")) {
    throw ValidationError("network JSON needs \"n\" and \"alpha\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1) {
    throw ValidationError("network \"n\" must be a positive integer");
  }
  const int n = doc["n"].get<int>();
  Eigen::MatrixXd influence = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
  if (doc.contains("edges")) {
    for (const auto& edge : doc["edges"]) {
      if (!edge.is_array() || edge.size() != 3) {
        throw ValidationError("edge entries must be [j, i, w]");
      }
      int j = edge[0].get<int>();
      int i = edge[1].get<int>();
      if (j < 0 || j >= n || i < 0 || i >= n) {
        throw ValidationError("edge index out of range");
      }
      if (seen(j, i)++) {
        throw ValidationError("duplicate edge (" + std::to_string(j) + ", " +
                              std::to_string(i) + ")");
      }
      influence(j, i) = edge[2].get<double>();
    }
  }
  return InfluenceNetwork(std::move(influence), doc["alpha"].get<double>());
}

nlohmann::json NetworkToJson(const InfluenceNetwork& network) {
  nlohmann::json edges = nlohmann::json::array();
  const auto& e = network.influence();
  for (int j = 0; j < network.size(); ++j) {
    for (int i = 0; i < network.size(); ++i) {
      if (e(j, i) != 0.0) edges.push_back({j, i, e(j, i)});
    }
  }
  return {{"n", network.size()}, {"alpha", network.alpha()}, {"edges", edges}};
}

InfluenceNetwork NetworkFromCsv(std::istream& in, double alpha) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ValidationError("bad number on CSV line " +
                              std::to_string(line_no) + ": '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd influence(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (static_cast<Eigen::Index>(rows[j].size()) != n) {
      throw ValidationError("CSV matrix is not square (row " +
                            std::to_string(j) + ")");
    }
    for (Eigen::Index i = 0; i < n; ++i) influence(j, i) = rows[j][i];
  }
  return InfluenceNetwork(std::move(influence), alpha);
}

InfluenceNetwork LoadNetwork(const std::filesystem::path& path,
                             double csv_alpha) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file " + path.string());
  if (path.extension() == ".csv") return NetworkFromCsv(in, csv_alpha);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError("cannot parse " + path.string() + ": " + err.what());
  }
  return NetworkFromJson(doc);
}

InfluenceNetwork Example1Network() {
  Eigen::Matrix<double, 5, 5> table;
  // Row r: weights node r puts on each of the five nodes.
  table << 0.0, 0.3901, 0.3003, 0.2456, 0.0640,
           0.0669, 0.0, 0.3715, 0.2578, 0.3037,
           0.0149, 0.7005, 0.0, 0.1534, 0.1313,
           0.1407, 0.2334, 0.4025, 0.0, 0.2234,
           0.4340, 0.0989, 0.2072, 0.2599, 0.0;
  return InfluenceNetwork(table.transpose(), 0.5);
}

Centrality ComputeCentrality(const InfluenceNetwork& network) {
  const int n = network.size();
  const double alpha = network.alpha();
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - alpha * network.influence();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Centrality out;
  out.absorption = lu.solve(ones);
  double residual = (system * out.absorption - ones).lpNorm<Eigen::Infinity>();
  if (!(residual <= kResidualLimit)) {
    throw std::runtime_error("centrality solve failed (residual " +
                             std::to_string(residual) + ")");
  }
  out.weighted = (1.0 - alpha) * out.absorption;
  return out;
}

Eigen::MatrixXd AwarenessLimit(const InfluenceNetwork& network,
                               const Eigen::MatrixXd& csf_values) {
  CheckCsfValues(csf_values, network.size());
  const int n = network.size();
  const double alpha = network.alpha();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) -
                           alpha * network.influence().transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  // Columns of the right-hand side are the firms' CSF vectors.
  Eigen::MatrixXd rhs = (1.0 - alpha) * csf_values.transpose();
  Eigen::MatrixXd solved = lu.solve(rhs);
  return solved.transpose();
}

AwarenessTrajectory SimulateAwareness(const InfluenceNetwork& network,
                                      const Eigen::MatrixXd& csf_values,
                                      int horizon,
                                      const Eigen::MatrixXd& initial) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  CheckCsfValues(csf_values, network.size());
  Eigen::MatrixXd state =
      initial.size() == 0
          ? Eigen::MatrixXd::Zero(csf_values.rows(), csf_values.cols())
          : initial;
  CheckInitialState(state, csf_values.rows(), csf_values.cols());
  AwarenessTrajectory out;
  out.steps.reserve(static_cast<size_t>(horizon) + 1);
  out.steps.push_back(state);
  Eigen::MatrixXd scratch(state.rows(), state.cols());
  for (int t = 1; t <= horizon; ++t) {
    StepAwareness(network.influence(), network.alpha(), csf_values, t, &state,
                  &scratch);
    out.steps.push_back(state);
  }
  return out;
}

Eigen::MatrixXd SimulateAwarenessFinal(const InfluenceNetwork& network,
                                       const Eigen::MatrixXd& csf_values,
                                       int horizon,
                                       const Eigen::MatrixXd& initial) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  CheckCsfValues(csf_values, network.size());
  Eigen::MatrixXd state =
      initial.size() == 0
          ? Eigen::MatrixXd::Zero(csf_values.rows(), csf_values.cols())
          : initial;
  CheckInitialState(state, csf_values.rows(), csf_values.cols());
  Eigen::MatrixXd scratch(state.rows(), state.cols());
  for (int t = 1; t <= horizon; ++t) {
    StepAwareness(network.influence(), network.alpha(), csf_values, t, &state,
                  &scratch);
  }
  return state;
}

}  // namespace netcontest
