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

#include "netcontest/optimize.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace netcontest {

Eigen::VectorXd ProjectOntoCappedSimplex(const Eigen::VectorXd& v,
                                         double cap) {
  Eigen::VectorXd clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= cap) return clipped;
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - cap) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

void ProjectRows(Eigen::MatrixXd* x, double cap) {
  for (Eigen::Index s = 0; s < x->rows(); ++s) {
    x->row(s) = ProjectOntoCappedSimplex(x->row(s).transpose(), cap);
  }
}

AscentResult ProjectedAscent(const RowObjective& objective, Eigen::MatrixXd x0,
                             double cap, const AscentOptions& options) {
  AscentResult out;
  ProjectRows(&x0, cap);
  out.x = std::move(x0);
  Eigen::MatrixXd grad(out.x.rows(), out.x.cols());
  out.value = objective(out.x, &grad);
  if (!std::isfinite(out.value)) return out;
  double step = options.initial_step;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    bool accepted = false;
    Eigen::MatrixXd trial;
    while (step > 1e-16) {
      trial = out.x + step * grad;
      ProjectRows(&trial, cap);
      const double predicted = (grad.array() * (trial - out.x).array()).sum();
      const double value = objective(trial, nullptr);
      if (std::isfinite(value) &&
          value >= out.value + options.armijo * predicted) {
        accepted = true;
        break;
      }
      step *= options.shrink;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double moved = (trial - out.x).cwiseAbs().maxCoeff();
    out.x = std::move(trial);
    out.value = objective(out.x, &grad);
    if (moved <= options.tolerance) {
      out.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e6);
  }
  return out;
}

}  // namespace netcontest
