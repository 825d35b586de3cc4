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

#ifndef NETCONTEST_PMEAN_H_
#define NETCONTEST_PMEAN_H_

#include <limits>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace netcontest {

// Power-mean aggregation of firm utilities. p = 0 stands for the geometric
// mean (Nash social welfare) and p = -infinity for the minimum.
struct WelfareSpec {
  static constexpr double kNash = 0.0;
  static constexpr double kEgalitarian =
      -std::numeric_limits<double>::infinity();

  double p = 1.0;

  static WelfareSpec Utilitarian() { return {1.0}; }
  static WelfareSpec Nash() { return {kNash}; }
  static WelfareSpec Egalitarian() { return {kEgalitarian}; }

  // Accepts a number or the string "-inf"; rejects p > 1.
  static WelfareSpec FromJson(const nlohmann::json& doc);
  nlohmann::json ToJson() const;
  // "utilitarian", "nash", "egalitarian" or "p=<value>".
  std::string Name() const;
  bool IsEgalitarian() const { return p == kEgalitarian; }
};

struct WelfareResult {
  double value = 0.0;  // meaningful only when defined
  Eigen::VectorXd utilities;
  bool defined = false;
};

// Undefined when p < 1 and some utility is <= 0.
WelfareResult PMean(const Eigen::VectorXd& utilities, const WelfareSpec& spec);

// dW/du_r at a point where PMean is defined. For the minimum this returns the
// one-hot subgradient of the first minimizer.
Eigen::VectorXd PMeanGradient(const Eigen::VectorXd& utilities,
                              const WelfareSpec& spec, double value);

}  // namespace netcontest

#endif  // NETCONTEST_PMEAN_H_
