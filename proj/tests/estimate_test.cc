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

#include <random>
#include <vector>

#include "doctest.h"
#include "netcontest/errors.h"

namespace netcontest {
namespace {

const Date kLaunch = ParseDate("2020-01-01");

SocialGraph Graph(int n, std::vector<std::pair<int, int>> arcs) {
  SocialGraph g;
  g.n = n;
  for (auto [from, to] : arcs) g.edges.push_back({from, to, 1.0});
  return g;
}

EstimatedInfluence Influence(int n, std::vector<EstimatedEdge> edges) {
  EstimatedInfluence out;
  out.n = n;
  out.attempts.assign(static_cast<size_t>(n), 1);
  out.edges = std::move(edges);
  return out;
}

std::vector<std::vector<double>> Thetas(int n, int products, double value) {
  return std::vector<std::vector<double>>(
      static_cast<size_t>(products),
      std::vector<double>(static_cast<size_t>(n), value));
}

TEST_CASE("ratio of successes to attempts") {
  // Node 0 adopts ten products, node 1 follows on three of them.
  AdoptionLog log(3, 10, kLaunch);
  for (int p = 0; p < 10; ++p) log.days[p][0] = 5;
  for (int p = 0; p < 3; ++p) log.days[p][1] = 9;
  log.days[3][1] = 5;  // same day: not a propagation
  log.days[4][1] = 2;  // earlier: not a propagation
  const EstimatedInfluence est =
      EstimateInfluence(log, Graph(3, {{0, 1}, {2, 1}, {1, 0}}), 700);
  CHECK(est.attempts[0] == 10);
  CHECK(est.attempts[1] == 5);
  CHECK(est.attempts[2] == 0);
  REQUIRE(est.edges.size() == 3);
  CHECK(est.edges[0].successes == 3);
  CHECK(est.edges[0].probability == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(est.edges[1].probability == 0.0);  // no attempts
  CHECK(est.edges[2].successes == 1);       // product 4: day 2 before day 5
  CHECK(est.edges[2].probability == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(est.rescaled.empty());
}

TEST_CASE("certain chain") {
  AdoptionLog log(2, 10, kLaunch);
  for (int p = 0; p < 10; ++p) {
    log.days[p][0] = 3 * p;
    log.days[p][1] = 3 * p + 1;
  }
  const EstimatedInfluence est = EstimateInfluence(log, Graph(2, {{0, 1}}), 731);
  CHECK(est.edges[0].probability == 1.0);
  const InfluenceNetwork net = est.ToNetwork(0.5);
  CHECK(net.influence()(0, 1) == 1.0);
  CHECK(net.influence()(1, 0) == 0.0);
}

TEST_CASE("only the training window counts") {
  AdoptionLog log(2, 2, kLaunch);
  log.days[0][0] = 10;
  log.days[0][1] = 800;  // after the cut
  log.days[1][0] = 900;
  log.days[1][1] = 901;
  const EstimatedInfluence est = EstimateInfluence(log, Graph(2, {{0, 1}}), 731);
  CHECK(est.attempts[0] == 1);
  CHECK(est.edges[0].successes == 0);
}

TEST_CASE("heavy columns are rescaled and reported") {
  AdoptionLog log(3, 4, kLaunch);
  for (int p = 0; p < 4; ++p) {
    log.days[p][0] = 1;
    log.days[p][1] = 1;
    log.days[p][2] = 2;
  }
  const EstimatedInfluence est =
      EstimateInfluence(log, Graph(3, {{0, 2}, {1, 2}}), 731);
  REQUIRE(est.rescaled.size() == 1);
  CHECK(est.rescaled[0].column == 2);
  CHECK(est.rescaled[0].sum == 2.0);
  CHECK(est.edges[0].probability == 0.5);
  CHECK(est.edges[1].probability == 0.5);
  CHECK(est.ToJson(0.5)["edges"].size() == 2);
  CHECK_NOTHROW(est.ToNetwork(0.5));
}

TEST_CASE("random logs keep estimates in range") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> day(-1, 1000);
  std::uniform_int_distribution<int> node(0, 19);
  for (int trial = 0; trial < 20; ++trial) {
    AdoptionLog log(20, 8, kLaunch);
    for (auto& row : log.days) {
      for (int& d : row) d = day(rng);
    }
    SocialGraph g;
    g.n = 20;
    for (int k = 0; k < 80; ++k) {
      const int a = node(rng);
      const int b = node(rng);
      if (a != b) g.edges.push_back({a, b, 1.0});
    }
    const EstimatedInfluence est = EstimateInfluence(log, g, 731);
    std::vector<double> column(20, 0.0);
    for (const auto& e : est.edges) {
      CHECK(e.probability >= 0.0);
      CHECK(e.probability <= 1.0);
      CHECK(e.successes <= est.attempts[e.from]);
      column[e.to] += e.probability;
    }
    for (double s : column) CHECK(s <= 1.0 + 1e-12);
  }
}

TEST_CASE("joint influence probability") {
  CHECK(GtJointProbability(std::vector<double>{0.5, 0.5}) == 0.75);
  CHECK(GtJointProbability(std::vector<double>{}) == 0.0);
  CHECK(GtJointProbability(std::vector<double>{0.2, 0.3, 0.5}) ==
        doctest::Approx(0.72).epsilon(1e-15));
}

TEST_CASE("threshold activation") {
  // Nodes 0 and 1 are active at the cut and each influence node 2 by 0.5.
  AdoptionLog actual(3, 1, kLaunch);
  actual.days[0][0] = 1;
  actual.days[0][1] = 2;
  const EstimatedInfluence est =
      Influence(3, {{0, 2, 1, 0.5}, {1, 2, 1, 0.5}});
  auto thetas = Thetas(3, 1, 0.7);
  CHECK(GtPredict(est, actual, 100, thetas).predicted.Day(2, 0) == 101);
  thetas[0][2] = 0.8;
  const GtResult none = GtPredict(est, actual, 100, thetas);
  CHECK_FALSE(none.predicted.Adopted(2, 0));
  CHECK(none.fixed_point);
  CHECK(none.rounds_run == 0);
}

TEST_CASE("zero thresholds close over positive edges only") {
  AdoptionLog actual(5, 1, kLaunch);
  actual.days[0][0] = 0;
  const EstimatedInfluence est = Influence(
      5, {{0, 1, 1, 0.2}, {1, 2, 1, 0.1}, {2, 3, 0, 0.0}, {4, 0, 1, 0.9}});
  const GtResult r = GtPredict(est, actual, 731, Thetas(5, 1, 0.0));
  CHECK(r.predicted.Day(1, 0) == 732);
  CHECK(r.predicted.Day(2, 0) == 733);
  CHECK_FALSE(r.predicted.Adopted(3, 0));
  CHECK_FALSE(r.predicted.Adopted(4, 0));
  CHECK(r.fixed_point);
}

TEST_CASE("unit thresholds block influence below one") {
  AdoptionLog actual(3, 1, kLaunch);
  actual.days[0][0] = 0;
  actual.days[0][1] = 0;
  const EstimatedInfluence est =
      Influence(3, {{0, 2, 1, 0.9}, {1, 2, 1, 0.9}});
  CHECK_FALSE(
      GtPredict(est, actual, 731, Thetas(3, 1, 1.0)).predicted.Adopted(2, 0));
}

TEST_CASE("prediction is monotone, deterministic and stops at a fixed point") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> weight(0.0, 0.6);
  std::uniform_int_distribution<int> node(0, 39);
  EstimatedInfluence est;
  est.n = 40;
  est.attempts.assign(40, 1);
  for (int k = 0; k < 120; ++k) {
    const int a = node(rng);
    const int b = node(rng);
    if (a != b) est.edges.push_back({a, b, 1, weight(rng)});
  }
  const auto thetas = SampleThresholds(40, 3, 7);
  CHECK(thetas == SampleThresholds(40, 3, 7));
  for (int trial = 0; trial < 30; ++trial) {
    AdoptionLog small(40, 3, kLaunch);
    AdoptionLog large(40, 3, kLaunch);
    for (int p = 0; p < 3; ++p) {
      for (int c = 0; c < 40; ++c) {
        const double u = std::uniform_real_distribution<double>(0, 1)(rng);
        if (u < 0.05) small.days[p][c] = large.days[p][c] = 10;
        else if (u < 0.15) large.days[p][c] = 20;
      }
    }
    const GtResult a = GtPredict(est, small, 731, thetas);
    const GtResult b = GtPredict(est, large, 731, thetas);
    for (int p = 0; p < 3; ++p) {
      for (int c = 0; c < 40; ++c) {
        if (a.predicted.Adopted(c, p)) CHECK(b.predicted.Adopted(c, p));
      }
    }
    CHECK(GtPredict(est, small, 731, thetas).predicted.days == a.predicted.days);
    REQUIRE(a.fixed_point);
    const GtResult longer = GtPredict(est, small, 731, thetas, 500);
    CHECK(longer.predicted.days == a.predicted.days);
    if (a.rounds_run > 1) {
      const GtResult cut_short =
          GtPredict(est, small, 731, thetas, a.rounds_run - 1);
      CHECK_FALSE(cut_short.fixed_point);
    }
  }
}

TEST_CASE("certain tree cascade is reproduced from its roots") {
  // Binary tree of depth 4; every edge transmits with probability 1.
  SocialGraph tree;
  tree.n = 31;
  for (int v = 1; v < 31; ++v) tree.edges.push_back({(v - 1) / 2, v, 1.0});
  GenParams params;
  params.p0 = 0.1;
  params.n_products = 20;
  const AdoptionLog actual = IcDiffuse(tree, params, 5);
  EstimatedInfluence est;
  est.n = 31;
  est.attempts.assign(31, 1);
  for (const Edge& e : tree.edges) est.edges.push_back({e.from, e.to, 1, 1.0});
  // Only the launch-day adopters are inside the window.
  const GtResult r = GtPredict(est, actual, 1, Thetas(31, 20, 0.0));
  for (int p = 0; p < 20; ++p) {
    for (int c = 0; c < 31; ++c) {
      CHECK(r.predicted.Adopted(c, p) == actual.Adopted(c, p));
    }
  }
}

TEST_CASE("validation accuracy") {
  AdoptionLog actual(4, 2, kLaunch);
  actual.days[0][0] = 10;   // before the cut: excluded
  actual.days[0][1] = 800;  // after the cut
  actual.days[1][2] = 900;
  CHECK(Validate(actual, actual, 731).accuracy == 100.0);
  CHECK(Validate(actual, actual, 731).pairs == 7);

  AdoptionLog empty(4, 2, kLaunch);
  CHECK(Validate(empty, empty, 731).accuracy == 100.0);

  AdoptionLog predicted(4, 2, kLaunch);
  predicted.days[0][0] = 10;
  predicted.days[0][1] = 732;
  predicted.days[1][3] = 732;  // false positive; customer 2 missed
  const ValidationScore s = Validate(predicted, actual, 731);
  CHECK(s.pairs == 7);
  CHECK(s.accuracy == doctest::Approx(100.0 * 5.0 / 7.0));
  CHECK(s.all_pairs_accuracy == doctest::Approx(100.0 * 6.0 / 8.0));
  CHECK_THROWS_AS(Validate(AdoptionLog(3, 2, kLaunch), actual, 731),
                  ValidationError);
}

TEST_CASE("validation pipeline is reproducible") {
  GenParams params;
  const ValidationReport a = RunValidation(
      200, params, Demographics{}, ContactMatrix::Default(5),
      ParseDate("2022-01-01"), 3, 42, 1);
  const ValidationReport b = RunValidation(
      200, params, Demographics{}, ContactMatrix::Default(5),
      ParseDate("2022-01-01"), 3, 42, 2);
  REQUIRE(a.runs.size() == 3);
  CHECK(a.ToJson() == b.ToJson());
  for (const ValidationRun& run : a.runs) {
    CHECK(run.accuracy >= 0.0);
    CHECK(run.accuracy <= 100.0);
    CHECK(run.events > 0);
  }
  CHECK(a.ToJson()["runs"] == 3);
}

}  // namespace
}  // namespace netcontest
