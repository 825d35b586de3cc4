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

#ifndef NETCONTEST_CSF_H_
#define NETCONTEST_CSF_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace netcontest {

// Budgets below this are raised to it before derivatives of the transform are
// taken; b^q with q < 1 has an unbounded slope at zero.
inline constexpr double kDerivativeFloor = 1e-9;

enum class CsfFamily {
  kTullock,  // f(b) = b^q
  kLog,      // f(b) = log(1 + b)
  kExp,      // f(b) = exp(b)
  kSoftmax,  // f(b) = exp(k b)
};

// Value and derivatives of firm s's success probability on one node.
struct CsfValue {
  double h = 0.0;
  double dh_own = 0.0;
  double d2h_own = 0.0;
  // Indexed like the opponent list: d h / d b_r and d^2 h / d b_s d b_r.
  std::vector<double> dh_cross;
  std::vector<double> d2h_cross;
};

// All firms on one node at once. Matrix entry (s, r) differentiates h_s with
// respect to b_r; the diagonals hold the own derivatives.
struct NodeCsf {
  Eigen::VectorXd h;
  Eigen::MatrixXd dh;
  Eigen::MatrixXd d2h;
};

// Ratio-form contest success function
//   h_s = f(b_s) / (sum_r f(b_r) + delta),   delta > 0,
// shared by every (firm, node) pair. Immutable.
class Csf {
 public:
  static Csf Tullock(double q, double delta);
  static Csf Log(double delta);
  static Csf Exp(double delta);
  static Csf Softmax(double k, double delta);

  // {"family": "tullock|log|exp|softmax", "q": .., "delta": .., "k": ..}
  static Csf FromJson(const nlohmann::json& doc);
  nlohmann::json ToJson() const;
  std::string Name() const;

  CsfFamily family() const { return family_; }
  double delta() const { return delta_; }
  double exponent() const { return exponent_; }
  // True when f(0) = 0, so a node nobody spends on yields h = 0.
  bool ZeroAtOrigin() const;

  double Transform(double b) const;
  double TransformSlope(double b) const;
  double TransformCurvature(double b) const;

  // Throws ValidationError on a negative budget.
  CsfValue Evaluate(double own, std::span<const double> others) const;
  NodeCsf EvaluateNode(std::span<const double> budgets) const;
  // Success probabilities only.
  void Values(std::span<const double> budgets, std::span<double> out) const;

 private:
  Csf(CsfFamily family, double exponent, double delta);

  CsfFamily family_;
  double exponent_;  // q for Tullock, k for softmax, unused otherwise
  double delta_;
};

struct AssumptionWitness {
  std::string condition;        // "concavity", "substitutability", "dominance"
  std::vector<double> point;    // budgets, own first
  double value = 0.0;           // offending quantity (or LHS - RHS)
  double offset = 0.0;          // dominance offset, 0 otherwise
};

struct AssumptionReport {
  bool concavity_ok = true;
  bool substitutability_ok = true;
  bool dominance_ok = true;
  long concavity_violations = 0;
  long substitutability_violations = 0;
  long dominance_violations = 0;
  std::vector<AssumptionWitness> witnesses;

  bool AllOk() const {
    return concavity_ok && substitutability_ok && dominance_ok;
  }
  nlohmann::json ToJson() const;
};

struct AuditOptions {
  int firms = 3;
  double grid = 0.05;
  // Dominance offsets; empty means every grid multiple in (0, 1].
  std::vector<double> offsets;
  double slack = 1e-12;
  // Witnesses retained per failed condition.
  int max_witnesses = 8;
};

// Grid audit of strict concavity, strategic substitutability and dominance
// of diminishing returns. A strict inequality a < b passes only when
// a < b - slack.
AssumptionReport CheckAssumptions(const Csf& csf, const AuditOptions& options);

}  // namespace netcontest

#endif  // NETCONTEST_CSF_H_
