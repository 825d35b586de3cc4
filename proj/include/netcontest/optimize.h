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

#ifndef NETCONTEST_OPTIMIZE_H_
#define NETCONTEST_OPTIMIZE_H_

#include <functional>

#include <Eigen/Dense>

namespace netcontest {

// Euclidean projection of v onto {x >= 0, sum x <= cap}. Clips at zero first;
// if the clipped point still exceeds the cap, projects onto the face
// sum x = cap with the sort-based O(n log n) method.
Eigen::VectorXd ProjectOntoCappedSimplex(const Eigen::VectorXd& v, double cap);

// Row-wise projection: every row of x becomes a feasible budget vector.
void ProjectRows(Eigen::MatrixXd* x, double cap);

// Objective over an m x n matrix whose rows each live in the capped simplex.
// Returns the value and, when grad is non-null, the gradient. A non-finite
// value marks the point as outside the objective's domain.
using RowObjective =
    std::function<double(const Eigen::MatrixXd& x, Eigen::MatrixXd* grad)>;

struct AscentOptions {
  int max_iterations = 3000;
  double initial_step = 0.5;
  double shrink = 0.5;
  double armijo = 1e-4;
  // Stops when the projected step moves no coordinate by more than this.
  double tolerance = 1e-10;
};

struct AscentResult {
  Eigen::MatrixXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent with Armijo backtracking along the projection arc.
// x0 is projected before the first evaluation.
AscentResult ProjectedAscent(const RowObjective& objective, Eigen::MatrixXd x0,
                             double cap, const AscentOptions& options = {});

}  // namespace netcontest

#endif  // NETCONTEST_OPTIMIZE_H_
