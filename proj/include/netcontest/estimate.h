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

#ifndef NETCONTEST_ESTIMATE_H_
#define NETCONTEST_ESTIMATE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "netcontest/synthgen.h"

namespace netcontest {

struct EstimatedEdge {
  int from = 0;
  int to = 0;
  int successes = 0;         // A_{j->i}
  double probability = 0.0;  // after any column rescaling
};

struct ColumnRescale {
  int column = 0;
  double sum = 0.0;  // column sum before scaling
};

// Bernoulli maximum-likelihood influence probabilities on candidate edges.
struct EstimatedInfluence {
  int n = 0;
  std::vector<int> attempts;  // A_j
  std::vector<EstimatedEdge> edges;
  std::vector<ColumnRescale> rescaled;

  // Network JSON; only edges with positive probability are listed.
  nlohmann::json ToJson(double alpha) const;
  InfluenceNetwork ToNetwork(double alpha) const;
};

// Training window is days < cut_day. A_j counts products j adopted in the
// window; A_{j->i} counts those that i adopted strictly later, also in the
// window. e_ji = A_{j->i} / A_j, or 0 when A_j = 0. Columns summing above one
// are scaled to one and listed in `rescaled`.
EstimatedInfluence EstimateInfluence(const AdoptionLog& log,
                                     const SocialGraph& candidates,
                                     int cut_day);

// 1 - prod_j (1 - e_j).
double GtJointProbability(std::span<const double> active_influences);

struct GtResult {
  AdoptionLog predicted;
  int rounds_run = 0;
  bool fixed_point = false;
};

// Adoptions before cut_day form the initial active set. Each round, every
// inactive (node, product) whose joint probability p over active
// in-neighbours satisfies p > 0 and p >= theta activates, dated
// cut_day + round. thetas is [product][customer].
GtResult GtPredict(const EstimatedInfluence& influence,
                   const AdoptionLog& actual, int cut_day,
                   const std::vector<std::vector<double>>& thetas,
                   int rounds = 100);

// Uniform(0, 1) thresholds, [product][customer].
std::vector<std::vector<double>> SampleThresholds(int customers, int products,
                                                  uint64_t seed);

struct ValidationScore {
  double accuracy = 0.0;      // percent, over pairs not adopted at the cut
  long pairs = 0;
  double all_pairs_accuracy = 0.0;  // percent, over every pair
};

// Compares adopted-by-horizon status of predicted and actual logs.
ValidationScore Validate(const AdoptionLog& predicted,
                         const AdoptionLog& actual, int cut_day);

struct ValidationRun {
  uint64_t seed = 0;
  double accuracy = 0.0;
  double all_pairs_accuracy = 0.0;
  double mean_degree = 0.0;
  long events = 0;
  long post_cut_events = 0;
  int rescaled_columns = 0;
};

struct ValidationReport {
  int n = 0;
  GenParams params;
  Date cut;
  std::vector<ValidationRun> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation
  double mean_all_pairs_accuracy = 0.0;

  nlohmann::json ToJson() const;
};

// One full generate / estimate / predict / validate cycle per repetition;
// repetition r uses MixSeed(seed, r).
ValidationReport RunValidation(int n, const GenParams& params,
                               const Demographics& demographics,
                               const ContactMatrix& contact, Date cut,
                               int repetitions, uint64_t seed, int threads);

}  // namespace netcontest

#endif  // NETCONTEST_ESTIMATE_H_
