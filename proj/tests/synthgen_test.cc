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

#include "netcontest/synthgen.h"

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "netcontest/errors.h"

namespace netcontest {
namespace {

Population CoLocated(int n, int groups) {
  Population pop;
  pop.demographics.age_labels.clear();
  pop.demographics.age_weights.clear();
  for (int g = 0; g < groups; ++g) {
    pop.demographics.age_labels.push_back("g" + std::to_string(g));
    pop.demographics.age_weights.push_back(1.0);
  }
  pop.grid_side = 1;
  pop.tiles.push_back(Tile{0, 0});
  for (int id = 0; id < n; ++id) {
    Customer c;
    c.id = id;
    c.age_group = id % groups;
    pop.customers.push_back(c);
  }
  return pop;
}

SocialGraph Chain() {
  SocialGraph g;
  g.n = 3;
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  return g;
}

std::string CsvOf(const AdoptionLog& log) {
  std::ostringstream out;
  log.WriteCsv(out);
  return out.str();
}

TEST_CASE("dates") {
  const Date d = ParseDate("2022-01-01");
  CHECK(FormatDate(d) == "2022-01-01");
  CHECK((d - GenParams{}.launch).count() == 731);
  CHECK(GenParams{}.HorizonDays() == 1826);
  CHECK_THROWS_AS(ParseDate("2022-02-30"), ValidationError);
  CHECK_THROWS_AS(ParseDate("2022/01/01"), ValidationError);
  CHECK_THROWS_AS(ParseDate("22-01-01"), ValidationError);
}

TEST_CASE("tile layout") {
  const Population hundred = GeneratePopulation(100, Demographics{}, 1);
  CHECK(hundred.tiles.size() == 25);
  CHECK(hundred.grid_side == 5);
  CHECK(hundred.size() == 100);

  const Population four = GeneratePopulation(4, Demographics{}, 1);
  CHECK(four.tiles.size() == 1);
  for (const Customer& c : four.customers) {
    CHECK(c.tile_x == four.customers[0].tile_x);
    CHECK(c.tile_y == four.customers[0].tile_y);
  }
  for (int n = 21; n <= 3000; n += 7) {
    const double occupancy = static_cast<double>(n) / TileCount(n);
    CHECK(occupancy >= 3.5);
    CHECK(occupancy <= 4.5);
  }
  CHECK_THROWS_AS(GeneratePopulation(0, Demographics{}, 1), ValidationError);
}

TEST_CASE("population is deterministic and centre weighted") {
  const Population a = GeneratePopulation(400, Demographics{}, 11);
  const Population b = GeneratePopulation(400, Demographics{}, 11);
  std::ostringstream ca, cb;
  WriteCustomersCsv(a, ca);
  WriteCustomersCsv(b, cb);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("id,age_group,gender,tile_x,tile_y\n", 0) == 0);

  const Population c = GeneratePopulation(400, Demographics{}, 12);
  std::ostringstream cc;
  WriteCustomersCsv(c, cc);
  CHECK(cc.str() != ca.str());

  // Tiles are listed centre first; the first tile should be busier than the
  // last on average.
  const Population big = GeneratePopulation(20000, Demographics{}, 13);
  int first = 0;
  int last = 0;
  for (const Customer& cu : big.customers) {
    if (cu.tile_x == big.tiles.front().x && cu.tile_y == big.tiles.front().y) {
      ++first;
    }
    if (cu.tile_x == big.tiles.back().x && cu.tile_y == big.tiles.back().y) {
      ++last;
    }
  }
  CHECK(first > last);
  const auto counts = big.GroupCounts();
  CHECK(counts.size() == 5);
  CHECK(std::abs(counts[0] / 20000.0 - 0.30) < 0.02);
}

TEST_CASE("co-located pair uses the fallback distance factor") {
  const Population pop = CoLocated(2, 1);
  const EdgeModel model(pop, ContactMatrix::Default(1), 4.0);
  CHECK(model.RawRate(0, 1) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(model.Probability(0, 1) == 1.0);
  CHECK(model.RawRate(0, 0) == 0.0);
}

TEST_CASE("zero contact rate between groups gives zero probability") {
  const Population pop = GeneratePopulation(60, Demographics{}, 4);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(5, 5);
  const EdgeModel model(pop, ContactMatrix(s), 2.0);
  for (int u = 0; u < pop.size(); ++u) {
    for (int v = 0; v < pop.size(); ++v) {
      if (pop.customers[u].age_group != pop.customers[v].age_group) {
        CHECK(model.Probability(u, v) == 0.0);
      }
    }
  }
}

TEST_CASE("rates scale linearly with the mean degree") {
  const Population pop = GeneratePopulation(50, Demographics{}, 5);
  const ContactMatrix contact = ContactMatrix::Default(5);
  const EdgeModel one(pop, contact, 1.0);
  const EdgeModel two(pop, contact, 2.0);
  for (int u = 0; u < 50; ++u) {
    for (int v = 0; v < 50; ++v) {
      CHECK(two.RawRate(u, v) ==
            doctest::Approx(2.0 * one.RawRate(u, v)).epsilon(1e-14));
      CHECK(one.Probability(u, v) >= 0.0);
      CHECK(one.Probability(u, v) <= 1.0);
    }
  }
  CHECK(one.Perturbed(0, 1, 0.01, 0.0) == one.Probability(0, 1));
  CHECK(one.Perturbed(0, 1, 0.5, -10.0) == 0.0);
}

TEST_CASE("contact matrix input") {
  std::istringstream csv("age,a,b\na,2,1\nb,1,3\n");
  const ContactMatrix m = ContactMatrix::FromCsv(csv);
  CHECK(m.groups() == 2);
  CHECK(m.rates()(1, 1) == 3.0);
  CHECK(m.labels() == std::vector<std::string>{"a", "b"});
  std::istringstream asym("age,a,b\na,2,1\nb,0.5,3\n");
  CHECK_THROWS_AS(ContactMatrix::FromCsv(asym), ValidationError);
  std::istringstream negative("age,a,b\na,2,-1\nb,-1,3\n");
  CHECK_THROWS_AS(ContactMatrix::FromCsv(negative), ValidationError);
}

TEST_CASE("realised mean degree concentrates around the target") {
  const Demographics demo;
  const ContactMatrix contact = ContactMatrix::Default(5);
  GenParams params;
  params.noise_sigma = 0.0;
  double total = 0.0;
  int outside = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    const Population pop = GeneratePopulation(100, demo, 100 + seed);
    const EdgeModel model(pop, contact, params.mean_degree);
    double expected = 0.0;
    double variance = 0.0;
    for (int u = 0; u < 100; ++u) {
      for (int v = 0; v < 100; ++v) {
        const double p = model.Probability(u, v);
        expected += p;
        variance += p * (1.0 - p);
      }
    }
    const SocialGraph g = SampleNetwork(pop, contact, params, 200 + seed);
    const double degree = g.MeanOutDegree();
    total += degree;
    if (std::abs(degree - params.mean_degree) > 3.0 * std::sqrt(variance) / 100)
      ++outside;
    // With nothing clamped the expected degree is exactly the target.
    CHECK(expected / 100 == doctest::Approx(params.mean_degree).epsilon(1e-9));
  }
  CHECK(outside <= 2);
  CHECK(std::abs(total / seeds - params.mean_degree) < 0.15);
}

TEST_CASE("sampled weights lie strictly inside the unit interval") {
  const Population pop = GeneratePopulation(150, Demographics{}, 6);
  GenParams params;
  params.mean_degree = 8.0;
  params.beta_a = 0.2;
  params.beta_b = 0.2;
  const SocialGraph g =
      SampleNetwork(pop, ContactMatrix::Default(5), params, 7);
  REQUIRE(g.edges.size() > 500);
  for (const Edge& e : g.edges) {
    CHECK(e.from != e.to);
    CHECK(e.weight > 0.0);
    CHECK(e.weight < 1.0);
  }
  const SocialGraph h =
      SampleNetwork(pop, ContactMatrix::Default(5), params, 7);
  CHECK(h.ToJson() == g.ToJson());
  const SocialGraph back = SocialGraph::FromJson(g.ToJson());
  CHECK(back.ToJson() == g.ToJson());
  const SocialGraph cand =
      SampleCandidates(pop, ContactMatrix::Default(5), params, 7);
  for (const Edge& e : cand.edges) CHECK(e.weight == 1.0);
}

TEST_CASE("extreme edge probabilities") {
  const Population pop = GeneratePopulation(30, Demographics{}, 8);
  GenParams params;
  params.noise_sigma = 0.0;
  params.mean_degree = 1e-300;
  CHECK(SampleNetwork(pop, ContactMatrix::Default(5), params, 1).edges.empty());
  params.mean_degree = 1e6;
  const SocialGraph full =
      SampleNetwork(pop, ContactMatrix::Default(5), params, 1);
  // The distance factor vanishes for customers sharing a tile.
  size_t apart = 0;
  for (const Customer& u : pop.customers) {
    for (const Customer& v : pop.customers) {
      apart += u.tile_x != v.tile_x || u.tile_y != v.tile_y;
    }
  }
  CHECK(full.edges.size() == apart);
  double mean = 0.0;
  for (const Edge& e : full.edges) mean += e.weight;
  mean /= static_cast<double>(full.edges.size());
  CHECK(std::abs(mean - 0.5) < 0.05);
}

TEST_CASE("graph to network rescales heavy columns") {
  SocialGraph g;
  g.n = 3;
  g.edges = {{0, 2, 0.8}, {1, 2, 0.6}, {0, 1, 0.3}};
  const InfluenceNetwork net = GraphToNetwork(g, 0.5);
  CHECK(net.influence()(0, 2) == doctest::Approx(0.8 / 1.4));
  CHECK(net.influence()(1, 2) == doctest::Approx(0.6 / 1.4));
  CHECK(net.influence()(0, 1) == 0.3);
}

TEST_CASE("cascade along a certain chain") {
  GenParams params;
  params.n_products = 300;
  params.p0 = 0.3;
  const AdoptionLog log = IcDiffuse(Chain(), params, 17);
  int checked = 0;
  for (int p = 0; p < params.n_products; ++p) {
    if (log.InitialAdopters(p) != std::vector<int>{0}) continue;
    ++checked;
    CHECK(log.Day(0, p) == 0);
    CHECK(log.Day(1, p) > log.Day(0, p));
    CHECK(log.Day(2, p) > log.Day(1, p));
    CHECK(log.Day(1, p) - log.Day(0, p) <= params.gap_days);
    CHECK(log.Day(2, p) - log.Day(1, p) <= params.gap_days);
  }
  CHECK(checked > 10);
}

TEST_CASE("zero weights leave only the initial adopters") {
  SocialGraph g = Chain();
  for (Edge& e : g.edges) e.weight = 0.0;
  GenParams params;
  params.p0 = 0.4;
  const AdoptionLog log = IcDiffuse(g, params, 3);
  for (int p = 0; p < params.n_products; ++p) {
    for (int c = 0; c < 3; ++c) {
      if (log.Adopted(c, p)) CHECK(log.Day(c, p) == 0);
    }
  }
}

TEST_CASE("cascades are reproducible and temporally consistent") {
  const Population pop = GeneratePopulation(300, Demographics{}, 9);
  GenParams params;
  params.mean_degree = 4.0;
  const SocialGraph g = SampleNetwork(pop, ContactMatrix::Default(5), params, 10);
  const AdoptionLog a = IcDiffuse(g, params, 11);
  const AdoptionLog b = IcDiffuse(g, params, 11);
  CHECK(CsvOf(a) == CsvOf(b));
  CHECK(CsvOf(IcDiffuse(g, params, 12)) != CsvOf(a));

  std::vector<std::vector<int>> in(static_cast<size_t>(g.n));
  for (const Edge& e : g.edges) in[e.to].push_back(e.from);
  long followers = 0;
  for (int p = 0; p < params.n_products; ++p) {
    for (int v = 0; v < g.n; ++v) {
      if (!a.Adopted(v, p) || a.Day(v, p) == 0) continue;
      ++followers;
      bool explained = false;
      for (int u : in[v]) {
        const int du = a.Day(u, p);
        if (du >= 0 && du < a.Day(v, p) &&
            a.Day(v, p) - du <= params.gap_days) {
          explained = true;
        }
      }
      CHECK(explained);
      CHECK(a.Day(v, p) <= params.HorizonDays());
    }
  }
  CHECK(followers > 0);
}

TEST_CASE("holdings CSV round trip and errors") {
  const Population pop = GeneratePopulation(80, Demographics{}, 14);
  const GenParams params;
  const SocialGraph g = SampleNetwork(pop, ContactMatrix::Default(5), params, 15);
  const AdoptionLog log = IcDiffuse(g, params, 16);
  const std::string text = CsvOf(log);
  std::istringstream in(text);
  const AdoptionLog back = AdoptionLog::ReadCsv(in, 80, 10, params.launch);
  CHECK(back.days == log.days);
  CHECK(back.EventCount() == log.EventCount());

  auto error_of = [](const std::string& body) {
    std::istringstream s("customer_id,product_id,adoption_date\n" + body);
    try {
      AdoptionLog::ReadCsv(s, 5, 2, ParseDate("2020-01-01"));
    } catch (const ValidationError& err) {
      return std::string(err.what());
    }
    return std::string();
  };
  CHECK(error_of("0,0,2020-01-05\n1,x,2020-01-05\n").find("row 3") !=
        std::string::npos);
  CHECK(error_of("0,0,2020-01-05\n0,0,2020-02-05\n").find("duplicate") !=
        std::string::npos);
  CHECK(error_of("7,0,2020-01-05\n").find("out of range") != std::string::npos);
  CHECK(error_of("0,0,2019-12-31\n").find("before launch") !=
        std::string::npos);
  CHECK(error_of("0,0\n").find("row 2") != std::string::npos);
  CHECK(error_of("0,0,2020-13-01\n").find("row 2") != std::string::npos);
}

TEST_CASE("generation parameters") {
  GenParams params;
  params.p0 = 1.5;
  CHECK_THROWS_AS(params.Validate(), ValidationError);
  params = GenParams{};
  params.beta_a = 0.0;
  CHECK_THROWS_AS(params.Validate(), ValidationError);
  params = GenParams{};
  params.mean_degree = 3.5;
  params.launch = ParseDate("2021-03-04");
  const GenParams back = GenParams::FromJson(params.ToJson());
  CHECK(back.mean_degree == 3.5);
  CHECK(back.launch == params.launch);
  CHECK(back.ToJson() == params.ToJson());
}

}  // namespace
}  // namespace netcontest
