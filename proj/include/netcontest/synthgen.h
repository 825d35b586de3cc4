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

#ifndef NETCONTEST_SYNTHGEN_H_
#define NETCONTEST_SYNTHGEN_H_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "netcontest/network.h"

namespace netcontest {

using Date = std::chrono::sys_days;

// "YYYY-MM-DD".
std::string FormatDate(Date date);
// Throws ValidationError on anything but a valid "YYYY-MM-DD".
Date ParseDate(const std::string& text);

// Categorical demographics. Weights need not be normalized.
struct Demographics {
  std::vector<std::string> age_labels = {"18-29", "30-39", "40-49", "50-64",
                                         "65+"};
  std::vector<double> age_weights = {0.30, 0.25, 0.19, 0.16, 0.10};
  std::vector<std::string> gender_labels = {"male", "female"};
  std::vector<double> gender_weights = {0.52, 0.48};

  static Demographics FromJson(const nlohmann::json& doc);
  void Validate() const;
};

struct Customer {
  int id = 0;
  int age_group = 0;
  int gender = 0;
  int tile_x = 0;
  int tile_y = 0;
};

struct Tile {
  int x = 0;
  int y = 0;
};

// Customers placed on unit tiles of a side x side grid. Only the
// ceil(n / 4) tiles nearest the grid center are inhabited.
struct Population {
  std::vector<Customer> customers;
  std::vector<Tile> tiles;
  int grid_side = 0;
  Demographics demographics;

  int size() const { return static_cast<int>(customers.size()); }
  int age_groups() const {
    return static_cast<int>(demographics.age_labels.size());
  }
  // Customers per age group.
  std::vector<int> GroupCounts() const;
};

int TileCount(int customers);

// Tiles near the center are proportionally more crowded (Gaussian weight
// with scale side / 2).
Population GeneratePopulation(int n, const Demographics& demographics,
                              uint64_t seed);

void WriteCustomersCsv(const Population& population, std::ostream& out);

// Symmetric nonnegative interaction rates between age groups.
class ContactMatrix {
 public:
  explicit ContactMatrix(Eigen::MatrixXd rates,
                         std::vector<std::string> labels = {});
  // Off-diagonal 1, diagonal 2.
  static ContactMatrix Default(int groups);
  // Header row of labels, then one "label,v1,...,vk" row per group.
  static ContactMatrix FromCsv(std::istream& in);

  const Eigen::MatrixXd& rates() const { return rates_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int groups() const { return static_cast<int>(rates_.rows()); }

 private:
  Eigen::MatrixXd rates_;
  std::vector<std::string> labels_;
};

struct GenParams {
  double mean_degree = 2.0;
  double beta_a = 1.0;
  double beta_b = 1.0;
  double p0 = 0.05;
  int n_products = 10;
  int gap_days = 30;
  // Standard deviation of the multiplicative Gaussian noise on edge rates.
  double noise_sigma = 0.01;
  Date launch = std::chrono::year{2020} / std::chrono::January / 1;
  Date horizon_end = std::chrono::year{2024} / std::chrono::December / 31;

  static GenParams FromJson(const nlohmann::json& doc);
  nlohmann::json ToJson() const;
  void Validate() const;
  int HorizonDays() const { return (horizon_end - launch).count(); }
};

// Noise-free edge rates. Pairs in group pair (a, b):
//   (mu N / 2) (m_ab s_ab / Z) (D(u, v) / DS_ab)
// with m_ab the number of unordered customer pairs, Z = sum_{a <= b} m_ab
// s_ab, D the tile-center distance and DS_ab the total distance over those
// pairs. When DS_ab = 0 the distance factor becomes 1 / m_ab.
class EdgeModel {
 public:
  EdgeModel(const Population& population, const ContactMatrix& contact,
            double mean_degree);

  // Unclamped; zero for u == v.
  double RawRate(int u, int v) const;
  // RawRate clamped to [0, 1].
  double Probability(int u, int v) const;
  // Probability with multiplicative noise (1 + sigma z), clamped.
  double Perturbed(int u, int v, double sigma, double z) const;

 private:
  const Population* population_;
  Eigen::MatrixXd prefactor_;  // (mu N / 2) m_ab s_ab / Z / DS_ab per pair
  Eigen::MatrixXi fallback_;   // 1 where DS_ab = 0
};

struct Edge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct SocialGraph {
  int n = 0;
  std::vector<Edge> edges;  // ordered by (from, to)

  // Outgoing edge indices per node.
  std::vector<std::vector<int>> OutLists() const;
  double MeanOutDegree() const;
  // {"n": n, "edges": [[from, to, weight], ...]}
  nlohmann::json ToJson() const;
  static SocialGraph FromJson(const nlohmann::json& doc);
};

// One Bernoulli trial per ordered pair; realized edges get Beta(a, b)
// weights strictly inside (0, 1).
SocialGraph SampleNetwork(const Population& population,
                          const ContactMatrix& contact, const GenParams& params,
                          uint64_t seed);

// Same trials without weights; every weight is set to 1.
SocialGraph SampleCandidates(const Population& population,
                             const ContactMatrix& contact,
                             const GenParams& params, uint64_t seed);

// Columns with incoming weight above one are scaled to sum to one.
InfluenceNetwork GraphToNetwork(const SocialGraph& graph, double alpha);

// Adoption days counted from the launch date; -1 means never adopted.
struct AdoptionLog {
  int customers = 0;
  int products = 0;
  Date launch = std::chrono::year{2020} / std::chrono::January / 1;
  std::vector<std::vector<int>> days;  // [product][customer]

  AdoptionLog() = default;
  AdoptionLog(int customers, int products, Date launch);

  int Day(int customer, int product) const { return days[product][customer]; }
  bool Adopted(int customer, int product) const {
    return days[product][customer] >= 0;
  }
  long EventCount() const;
  // Customers adopting product p on the launch date.
  std::vector<int> InitialAdopters(int product) const;

  // customer_id,product_id,adoption_date sorted by customer then product.
  void WriteCsv(std::ostream& out) const;
  // Throws ValidationError with the offending row number.
  static AdoptionLog ReadCsv(std::istream& in, int customers, int products,
                             Date launch);
};

// Independent cascade. Initial adopters are Bernoulli(p0) on the launch
// date; each newly active node gets one attempt per out-edge, succeeding
// when r <= w, and the adopter's date is U{1..gap_days} days after its
// parent's. Adoptions after horizon_end are dropped and do not spread.
AdoptionLog IcDiffuse(const SocialGraph& graph, const GenParams& params,
                      uint64_t seed);

// Stream indices for MixSeed; one independent generator per pipeline stage.
enum SeedStream : uint64_t {
  kPopulationStream = 1,
  kNetworkStream = 2,
  kDiffusionStream = 3,
  kCandidateStream = 4,
  kThresholdStream = 5,
};

}  // namespace netcontest

#endif  // NETCONTEST_SYNTHGEN_H_
