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

#include "netcontest/estimate.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "netcontest/errors.h"
#include "netcontest/parallel.h"

namespace netcontest {

nlohmann::json EstimatedInfluence::ToJson(double alpha) const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : edges) {
    if (e.probability > 0.0) list.push_back({e.from, e.to, e.probability});
  }
  return {{"n", n}, {"alpha", alpha}, {"edges", list}};
}

InfluenceNetwork EstimatedInfluence::ToNetwork(double alpha) const {
  return NetworkFromJson(ToJson(alpha));
}

EstimatedInfluence EstimateInfluence(const AdoptionLog& log,
                                     const SocialGraph& candidates,
                                     int cut_day) {
  if (candidates.n != log.customers) {
    throw ValidationError("candidate graph and log cover different customers");
  }
  EstimatedInfluence out;
  out.n = log.customers;
  out.attempts.assign(static_cast<size_t>(out.n), 0);
  auto in_window = [cut_day](int day) { return day >= 0 && day < cut_day; };
  for (int p = 0; p < log.products; ++p) {
    for (int c = 0; c < out.n; ++c) out.attempts[c] += in_window(log.Day(c, p));
  }
  std::vector<double> column_sum(static_cast<size_t>(out.n), 0.0);
  for (const auto& edge : candidates.edges) {
    EstimatedEdge e{edge.from, edge.to, 0, 0.0};
    for (int p = 0; p < log.products; ++p) {
      const int dj = log.Day(edge.from, p);
      const int di = log.Day(edge.to, p);
      if (in_window(dj) && in_window(di) && dj < di) ++e.successes;
    }
    if (out.attempts[e.from] > 0) {
      e.probability =
          static_cast<double>(e.successes) / out.attempts[e.from];
    }
    column_sum[e.to] += e.probability;
    out.edges.push_back(e);
  }
  for (int i = 0; i < out.n; ++i) {
    if (column_sum[i] > 1.0) out.rescaled.push_back({i, column_sum[i]});
  }
  if (!out.rescaled.empty()) {
    for (auto& e : out.edges) {
      if (column_sum[e.to] > 1.0) e.probability /= column_sum[e.to];
    }
  }
  return out;
}

double GtJointProbability(std::span<const double> active_influences) {
  double miss = 1.0;
  for (double e : active_influences) miss *= 1.0 - e;
  return 1.0 - miss;
}

std::vector<std::vector<double>> SampleThresholds(int customers, int products,
                                                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::vector<double>> out(static_cast<size_t>(products));
  for (auto& row : out) {
    row.resize(static_cast<size_t>(customers));
    for (auto& theta : row) theta = uniform(rng);
  }
  return out;
}

GtResult GtPredict(const EstimatedInfluence& influence,
                   const AdoptionLog& actual, int cut_day,
                   const std::vector<std::vector<double>>& thetas,
                   int rounds) {
  const int n = influence.n;
  if (actual.customers != n) {
    throw ValidationError("influence and log cover different customers");
  }
  if (static_cast<int>(thetas.size()) != actual.products) {
    throw ValidationError("one threshold row per product required");
  }
  struct InEdge {
    int from;
    double e;
  };
  std::vector<std::vector<InEdge>> in_lists(static_cast<size_t>(n));
  for (const auto& e : influence.edges) {
    if (e.probability > 0.0) in_lists[e.to].push_back({e.from, e.probability});
  }
  GtResult out;
  out.predicted = AdoptionLog(n, actual.products, actual.launch);
  out.fixed_point = true;
  for (int p = 0; p < actual.products; ++p) {
    const auto& theta = thetas[p];
    if (static_cast<int>(theta.size()) != n) {
      throw ValidationError("one threshold per customer required");
    }
    std::vector<int>& day = out.predicted.days[p];
    for (int c = 0; c < n; ++c) {
      const int d = actual.Day(c, p);
      if (d >= 0 && d < cut_day) day[c] = d;
    }
    bool settled = false;
    for (int round = 1; round <= rounds; ++round) {
      std::vector<int> activated;
      for (int i = 0; i < n; ++i) {
        if (day[i] >= 0) continue;
        double miss = 1.0;
        for (const auto& in : in_lists[i]) {
          if (day[in.from] >= 0) miss *= 1.0 - in.e;
        }
        const double joint = 1.0 - miss;
        if (joint > 0.0 && joint >= theta[i]) activated.push_back(i);
      }
      if (activated.empty()) {
        settled = true;
        break;
      }
      for (int i : activated) day[i] = cut_day + round;
      out.rounds_run = std::max(out.rounds_run, round);
    }
    out.fixed_point = out.fixed_point && settled;
  }
  return out;
}

ValidationScore Validate(const AdoptionLog& predicted,
                         const AdoptionLog& actual, int cut_day) {
  if (predicted.customers != actual.customers ||
      predicted.products != actual.products) {
    throw ValidationError("predicted and actual logs differ in shape");
  }
  ValidationScore out;
  long matches = 0;
  long all_matches = 0;
  long all_pairs = 0;
  for (int p = 0; p < actual.products; ++p) {
    for (int c = 0; c < actual.customers; ++c) {
      const int d = actual.Day(c, p);
      const bool same = predicted.Adopted(c, p) == (d >= 0);
      ++all_pairs;
      all_matches += same;
      if (d >= 0 && d < cut_day) continue;
      ++out.pairs;
      matches += same;
    }
  }
  out.accuracy = out.pairs == 0 ? 100.0 : 100.0 * matches / out.pairs;
  out.all_pairs_accuracy =
      all_pairs == 0 ? 100.0 : 100.0 * all_matches / all_pairs;
  return out;
}

nlohmann::json ValidationReport::ToJson() const {
  nlohmann::json run_list = nlohmann::json::array();
  for (const auto& r : runs) {
    run_list.push_back({{"seed", r.seed},
                        {"accuracy", r.accuracy},
                        {"all_pairs_accuracy", r.all_pairs_accuracy},
                        {"mean_degree", r.mean_degree},
                        {"events", r.events},
                        {"post_cut_events", r.post_cut_events},
                        {"rescaled_columns", r.rescaled_columns}});
  }
  return {{"n", n},
          {"beta_a", params.beta_a},
          {"beta_b", params.beta_b},
          {"mean_accuracy", mean_accuracy},
          {"std", std_accuracy},
          {"runs", static_cast<int>(runs.size())},
          {"mean_all_pairs_accuracy", mean_all_pairs_accuracy},
          {"cut_date", FormatDate(cut)},
          {"params", params.ToJson()},
          {"repetitions", run_list}};
}

ValidationReport RunValidation(int n, const GenParams& params,
                               const Demographics& demographics,
                               const ContactMatrix& contact, Date cut,
                               int repetitions, uint64_t seed, int threads) {
  if (repetitions < 1) throw ValidationError("repetitions must be >= 1");
  params.Validate();
  ValidationReport report;
  report.n = n;
  report.params = params;
  report.cut = cut;
  report.runs.resize(static_cast<size_t>(repetitions));
  const int cut_day = (cut - params.launch).count();
  ParallelFor(repetitions, threads, [&](int r) {
    const uint64_t rep_seed = MixSeed(seed, r);
    const Population pop =
        GeneratePopulation(n, demographics, MixSeed(rep_seed, kPopulationStream));
    const SocialGraph graph =
        SampleNetwork(pop, contact, params, MixSeed(rep_seed, kNetworkStream));
    const AdoptionLog actual =
        IcDiffuse(graph, params, MixSeed(rep_seed, kDiffusionStream));
    const SocialGraph candidates = SampleCandidates(
        pop, contact, params, MixSeed(rep_seed, kCandidateStream));
    const EstimatedInfluence est =
        EstimateInfluence(actual, candidates, cut_day);
    const auto thetas = SampleThresholds(n, params.n_products,
                                         MixSeed(rep_seed, kThresholdStream));
    const GtResult gt = GtPredict(est, actual, cut_day, thetas);
    const ValidationScore score = Validate(gt.predicted, actual, cut_day);
    ValidationRun& run = report.runs[r];
    run.seed = rep_seed;
    run.accuracy = score.accuracy;
    run.all_pairs_accuracy = score.all_pairs_accuracy;
    run.mean_degree = graph.MeanOutDegree();
    run.events = actual.EventCount();
    for (const auto& row : actual.days) {
      for (int d : row) run.post_cut_events += d >= cut_day;
    }
    run.rescaled_columns = static_cast<int>(est.rescaled.size());
  });
  double sum = 0.0;
  double sum_all = 0.0;
  for (const auto& r : report.runs) {
    sum += r.accuracy;
    sum_all += r.all_pairs_accuracy;
  }
  report.mean_accuracy = sum / repetitions;
  report.mean_all_pairs_accuracy = sum_all / repetitions;
  double sq = 0.0;
  for (const auto& r : report.runs) {
    sq += (r.accuracy - report.mean_accuracy) *
          (r.accuracy - report.mean_accuracy);
  }
  report.std_accuracy =
      repetitions > 1 ? std::sqrt(sq / (repetitions - 1)) : 0.0;
  return report;
}

}  // namespace netcontest
