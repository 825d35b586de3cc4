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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "netcontest/errors.h"

namespace netcontest {

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    size_t start = cell.find_first_not_of(' ');
    cells.push_back(start == std::string::npos ? "" : cell.substr(start));
  }
  return cells;
}

void CheckWeights(const std::vector<std::string>& labels,
                  const std::vector<double>& weights, const char* what) {
  if (labels.empty() || labels.size() != weights.size()) {
    throw ValidationError(std::string(what) +
                          ": labels and weights must be non-empty and match");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError(std::string(what) + ": negative weight");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw ValidationError(std::string(what) + ": weights sum to zero");
  }
}

double Beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  while (true) {
    const double x = ga(rng);
    const double y = gb(rng);
    const double value = x / (x + y);
    if (value > 0.0 && value < 1.0) return value;
  }
}

// Shared trial loop for the weighted network and the candidate graph.
SocialGraph SampleEdges(const Population& population,
                        const ContactMatrix& contact, const GenParams& params,
                        uint64_t seed, bool weighted) {
  params.Validate();
  const EdgeModel model(population, contact, params.mean_degree);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  SocialGraph graph;
  graph.n = population.size();
  for (int u = 0; u < graph.n; ++u) {
    for (int v = 0; v < graph.n; ++v) {
      if (u == v) continue;
      if (model.RawRate(u, v) <= 0.0) continue;
      const double p =
          model.Perturbed(u, v, params.noise_sigma, normal(rng));
      if (uniform(rng) < p) {
        const double w =
            weighted ? Beta(rng, params.beta_a, params.beta_b) : 1.0;
        graph.edges.push_back({u, v, w});
      }
    }
  }
  return graph;
}

}  // namespace

std::string FormatDate(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buffer;
}

Date ParseDate(const std::string& text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (text.size() != 10 ||
      std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw ValidationError("bad date '" + text + "' (want YYYY-MM-DD)");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date '" + text + "'");
  return Date{ymd};
}

Demographics Demographics::FromJson(const nlohmann::json& doc) {
  Demographics out;
  if (doc.contains("age_labels")) {
    out.age_labels = doc["age_labels"].get<std::vector<std::string>>();
  }
  if (doc.contains("age_weights")) {
    out.age_weights = doc["age_weights"].get<std::vector<double>>();
  }
  if (doc.contains("gender_labels")) {
    out.gender_labels = doc["gender_labels"].get<std::vector<std::string>>();
  }
  if (doc.contains("gender_weights")) {
    out.gender_weights = doc["gender_weights"].get<std::vector<double>>();
  }
  out.Validate();
  return out;
}

void Demographics::Validate() const {
  CheckWeights(age_labels, age_weights, "age groups");
  CheckWeights(gender_labels, gender_weights, "genders");
}

std::vector<int> Population::GroupCounts() const {
  std::vector<int> counts(static_cast<size_t>(age_groups()), 0);
  for (const auto& c : customers) ++counts[c.age_group];
  return counts;
}

int TileCount(int customers) { return (customers + 3) / 4; }

Population GeneratePopulation(int n, const Demographics& demographics,
                              uint64_t seed) {
  if (n < 1) throw ValidationError("population size must be >= 1");
  demographics.Validate();
  Population pop;
  pop.demographics = demographics;
  const int tile_count = TileCount(n);
  int side = static_cast<int>(std::ceil(std::sqrt(tile_count)));
  while (side * side < tile_count) ++side;
  pop.grid_side = side;

  const double center = (side - 1) / 2.0;
  std::vector<std::pair<double, Tile>> cells;
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      const double dx = x - center;
      const double dy = y - center;
      cells.push_back({dx * dx + dy * dy, Tile{x, y}});
    }
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> tile_weights;
  const double scale = side / 2.0;
  for (int t = 0; t < tile_count; ++t) {
    pop.tiles.push_back(cells[t].second);
    tile_weights.push_back(std::exp(-cells[t].first / (2.0 * scale * scale)));
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick_tile(tile_weights.begin(),
                                            tile_weights.end());
  std::discrete_distribution<int> pick_age(demographics.age_weights.begin(),
                                           demographics.age_weights.end());
  std::discrete_distribution<int> pick_gender(
      demographics.gender_weights.begin(), demographics.gender_weights.end());
  pop.customers.reserve(static_cast<size_t>(n));
  for (int id = 0; id < n; ++id) {
    Customer c;
    c.id = id;
    const Tile& tile = pop.tiles[pick_tile(rng)];
    c.tile_x = tile.x;
    c.tile_y = tile.y;
    c.age_group = pick_age(rng);
    c.gender = pick_gender(rng);
    pop.customers.push_back(c);
  }
  return pop;
}

void WriteCustomersCsv(const Population& population, std::ostream& out) {
  out << "id,age_group,gender,tile_x,tile_y\n";
  const auto& demo = population.demographics;
  for (const auto& c : population.customers) {
    out << c.id << ',' << demo.age_labels[c.age_group] << ','
        << demo.gender_labels[c.gender] << ',' << c.tile_x << ',' << c.tile_y
        << '\n';
  }
}

ContactMatrix::ContactMatrix(Eigen::MatrixXd rates,
                             std::vector<std::string> labels)
    : rates_(std::move(rates)), labels_(std::move(labels)) {
  if (rates_.rows() == 0 || rates_.rows() != rates_.cols()) {
    throw ValidationError("contact matrix must be square and non-empty");
  }
  if (!labels_.empty() &&
      static_cast<Eigen::Index>(labels_.size()) != rates_.rows()) {
    throw ValidationError("contact matrix label count mismatch");
  }
  for (Eigen::Index a = 0; a < rates_.rows(); ++a) {
    for (Eigen::Index b = 0; b < rates_.cols(); ++b) {
      if (!(rates_(a, b) >= 0.0) || !std::isfinite(rates_(a, b))) {
        throw ValidationError("contact matrix entries must be >= 0");
      }
      if (std::abs(rates_(a, b) - rates_(b, a)) > 1e-12) {
        throw ValidationError("contact matrix must be symmetric");
      }
    }
  }
}

ContactMatrix ContactMatrix::Default(int groups) {
  Eigen::MatrixXd rates = Eigen::MatrixXd::Ones(groups, groups);
  rates.diagonal().setConstant(2.0);
  return ContactMatrix(std::move(rates));
}

ContactMatrix ContactMatrix::FromCsv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cells = SplitCsvLine(line);
    if (labels.empty()) {
      labels.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != labels.size() + 1) {
      throw ValidationError("contact CSV row " + std::to_string(line_no) +
                            " has the wrong number of cells");
    }
    std::vector<double> row;
    for (size_t k = 1; k < cells.size(); ++k) {
      try {
        row.push_back(std::stod(cells[k]));
      } catch (const std::exception&) {
        throw ValidationError("bad number in contact CSV row " +
                              std::to_string(line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != labels.size()) {
    throw ValidationError("contact CSV must have one row per label");
  }
  const auto g = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd rates(g, g);
  for (Eigen::Index a = 0; a < g; ++a) {
    for (Eigen::Index b = 0; b < g; ++b) rates(a, b) = rows[a][b];
  }
  return ContactMatrix(std::move(rates), std::move(labels));
}

GenParams GenParams::FromJson(const nlohmann::json& doc) {
  GenParams out;
  out.mean_degree = doc.value("mean_degree", out.mean_degree);
  out.mean_degree = doc.value("mu_deg", out.mean_degree);  // short alias
  out.beta_a = doc.value("beta_a", out.beta_a);
  out.beta_b = doc.value("beta_b", out.beta_b);
  out.p0 = doc.value("p0", out.p0);
  out.n_products = doc.value("n_products", out.n_products);
  out.gap_days = doc.value("gap_days", out.gap_days);
  out.noise_sigma = doc.value("noise_sigma", out.noise_sigma);
  if (doc.contains("launch")) out.launch = ParseDate(doc["launch"]);
  if (doc.contains("horizon_end")) {
    out.horizon_end = ParseDate(doc["horizon_end"]);
  }
  out.Validate();
  return out;
}

nlohmann::json GenParams::ToJson() const {
  return {{"mean_degree", mean_degree}, {"beta_a", beta_a},
          {"beta_b", beta_b},           {"p0", p0},
          {"n_products", n_products},   {"gap_days", gap_days},
          {"noise_sigma", noise_sigma}, {"launch", FormatDate(launch)},
          {"horizon_end", FormatDate(horizon_end)}};
}

void GenParams::Validate() const {
  if (!(mean_degree > 0.0)) throw ValidationError("mean_degree must be > 0");
  if (!(beta_a > 0.0) || !(beta_b > 0.0)) {
    throw ValidationError("Beta shape parameters must be > 0");
  }
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ValidationError("p0 must lie in [0,1]");
  if (n_products < 1) throw ValidationError("n_products must be >= 1");
  if (gap_days < 1) throw ValidationError("gap_days must be >= 1");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  if (horizon_end < launch) throw ValidationError("horizon ends before launch");
}

EdgeModel::EdgeModel(const Population& population,
                     const ContactMatrix& contact, double mean_degree)
    : population_(&population) {
  const int g = population.age_groups();
  if (contact.groups() != g) {
    throw ValidationError("contact matrix has " +
                          std::to_string(contact.groups()) +
                          " groups, population has " + std::to_string(g));
  }
  const std::vector<int> counts = population.GroupCounts();
  Eigen::MatrixXd pairs(g, g);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      pairs(a, b) = a == b ? 0.5 * counts[a] * (counts[a] - 1.0)
                           : static_cast<double>(counts[a]) * counts[b];
    }
  }
  const Eigen::MatrixXd& s = contact.rates();
  double z = 0.0;
  for (int a = 0; a < g; ++a) {
    for (int b = a; b < g; ++b) z += pairs(a, b) * s(a, b);
  }

  // Distance totals per group pair from per-tile head counts.
  const auto tiles = static_cast<int>(population.tiles.size());
  Eigen::MatrixXd head(g, tiles);
  head.setZero();
  auto tile_index = [&](int x, int y) {
    for (int t = 0; t < tiles; ++t) {
      if (population.tiles[t].x == x && population.tiles[t].y == y) return t;
    }
    throw ValidationError("customer on an uninhabited tile");
  };
  for (const auto& c : population.customers) {
    head(c.age_group, tile_index(c.tile_x, c.tile_y)) += 1.0;
  }
  Eigen::MatrixXd dist(tiles, tiles);
  for (int t = 0; t < tiles; ++t) {
    for (int r = 0; r < tiles; ++r) {
      dist(t, r) = std::hypot(population.tiles[t].x - population.tiles[r].x,
                              population.tiles[t].y - population.tiles[r].y);
    }
  }
  Eigen::MatrixXd total_distance = head * dist * head.transpose();
  total_distance.diagonal() *= 0.5;

  const double n = population.size();
  prefactor_.setZero(g, g);
  fallback_.setZero(g, g);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      if (!(z > 0.0) || pairs(a, b) <= 0.0) continue;
      const double share = 0.5 * mean_degree * n * pairs(a, b) * s(a, b) / z;
      if (total_distance(a, b) > 0.0) {
        prefactor_(a, b) = share / total_distance(a, b);
      } else {
        fallback_(a, b) = 1;
        prefactor_(a, b) = share / pairs(a, b);
      }
    }
  }
}

double EdgeModel::RawRate(int u, int v) const {
  if (u == v) return 0.0;
  const Customer& cu = population_->customers[u];
  const Customer& cv = population_->customers[v];
  const double factor = prefactor_(cu.age_group, cv.age_group);
  if (fallback_(cu.age_group, cv.age_group)) return factor;
  return factor *
         std::hypot(cu.tile_x - cv.tile_x, cu.tile_y - cv.tile_y);
}

double EdgeModel::Probability(int u, int v) const {
  return std::clamp(RawRate(u, v), 0.0, 1.0);
}

double EdgeModel::Perturbed(int u, int v, double sigma, double z) const {
  return std::clamp(RawRate(u, v) * (1.0 + sigma * z), 0.0, 1.0);
}

std::vector<std::vector<int>> SocialGraph::OutLists() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(n));
  for (size_t k = 0; k < edges.size(); ++k) {
    out[edges[k].from].push_back(static_cast<int>(k));
  }
  return out;
}

double SocialGraph::MeanOutDegree() const {
  return n == 0 ? 0.0 : static_cast<double>(edges.size()) / n;
}

nlohmann::json SocialGraph::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : edges) list.push_back({e.from, e.to, e.weight});
  return {{"n", n}, {"edges", list}};
}

SocialGraph SocialGraph::FromJson(const nlohmann::json& doc) {
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ValidationError("graph JSON needs integer \"n\"");
  }
  SocialGraph graph;
  graph.n = doc["n"].get<int>();
  if (graph.n < 1) throw ValidationError("graph \"n\" must be >= 1");
  for (const auto& e : doc.value("edges", nlohmann::json::array())) {
    if (!e.is_array() || e.size() < 2) {
      throw ValidationError("graph edges must be [from, to, weight]");
    }
    Edge edge{e[0].get<int>(), e[1].get<int>(),
              e.size() > 2 ? e[2].get<double>() : 1.0};
    if (edge.from < 0 || edge.from >= graph.n || edge.to < 0 ||
        edge.to >= graph.n || edge.from == edge.to) {
      throw ValidationError("graph edge out of range or self-loop");
    }
    graph.edges.push_back(edge);
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Edge& a, const Edge& b) {
              return std::tie(a.from, a.to) < std::tie(b.from, b.to);
            });
  return graph;
}

SocialGraph SampleNetwork(const Population& population,
                          const ContactMatrix& contact, const GenParams& params,
                          uint64_t seed) {
  return SampleEdges(population, contact, params, seed, true);
}

SocialGraph SampleCandidates(const Population& population,
                             const ContactMatrix& contact,
                             const GenParams& params, uint64_t seed) {
  return SampleEdges(population, contact, params, seed, false);
}

InfluenceNetwork GraphToNetwork(const SocialGraph& graph, double alpha) {
  Eigen::MatrixXd influence = Eigen::MatrixXd::Zero(graph.n, graph.n);
  for (const auto& e : graph.edges) influence(e.from, e.to) = e.weight;
  for (int i = 0; i < graph.n; ++i) {
    const double sum = influence.col(i).sum();
    if (sum > 1.0) influence.col(i) /= sum;
  }
  return InfluenceNetwork(std::move(influence), alpha);
}

AdoptionLog::AdoptionLog(int customers_in, int products_in, Date launch_in)
    : customers(customers_in),
      products(products_in),
      launch(launch_in),
      days(static_cast<size_t>(products_in),
           std::vector<int>(static_cast<size_t>(customers_in), -1)) {}

long AdoptionLog::EventCount() const {
  long count = 0;
  for (const auto& row : days) {
    for (int d : row) count += d >= 0;
  }
  return count;
}

std::vector<int> AdoptionLog::InitialAdopters(int product) const {
  std::vector<int> out;
  for (int c = 0; c < customers; ++c) {
    if (days[product][c] == 0) out.push_back(c);
  }
  return out;
}

void AdoptionLog::WriteCsv(std::ostream& out) const {
  out << "customer_id,product_id,adoption_date\n";
  for (int c = 0; c < customers; ++c) {
    for (int p = 0; p < products; ++p) {
      if (days[p][c] >= 0) {
        out << c << ',' << p << ','
            << FormatDate(launch + std::chrono::days{days[p][c]}) << '\n';
      }
    }
  }
}

AdoptionLog AdoptionLog::ReadCsv(std::istream& in, int customers, int products,
                                 Date launch) {
  AdoptionLog log(customers, products, launch);
  std::string line;
  int row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("customer_id", 0) == 0) continue;
    }
    const auto cells = SplitCsvLine(line);
    if (cells.size() != 3) {
      throw ValidationError("holdings CSV row " + std::to_string(row) +
                            ": expected 3 columns");
    }
    int c = 0;
    int p = 0;
    Date date;
    try {
      size_t used = 0;
      c = std::stoi(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("id");
      p = std::stoi(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("id");
      date = ParseDate(cells[2]);
    } catch (const std::exception& err) {
      throw ValidationError("holdings CSV row " + std::to_string(row) + ": " +
                            err.what());
    }
    if (c < 0 || c >= customers || p < 0 || p >= products) {
      throw ValidationError("holdings CSV row " + std::to_string(row) +
                            ": id out of range");
    }
    if (date < launch) {
      throw ValidationError("holdings CSV row " + std::to_string(row) +
                            ": adoption before launch");
    }
    if (log.days[p][c] >= 0) {
      throw ValidationError("holdings CSV row " + std::to_string(row) +
                            ": duplicate (customer, product)");
    }
    log.days[p][c] = (date - launch).count();
  }
  return log;
}

AdoptionLog IcDiffuse(const SocialGraph& graph, const GenParams& params,
                      uint64_t seed) {
  params.Validate();
  const int n = graph.n;
  const int horizon = params.HorizonDays();
  AdoptionLog log(n, params.n_products, params.launch);
  const auto out_lists = graph.OutLists();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_int_distribution<int> gap(1, params.gap_days);
  for (int p = 0; p < params.n_products; ++p) {
    std::vector<int>& day = log.days[p];
    std::vector<int> frontier;
    for (int c = 0; c < n; ++c) {
      if (uniform(rng) < params.p0) {
        day[c] = 0;
        frontier.push_back(c);
      }
    }
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int u : frontier) {
        for (int k : out_lists[u]) {
          const Edge& e = graph.edges[k];
          if (day[e.to] >= 0) continue;
          if (uniform(rng) <= e.weight) {
            const int d = day[u] + gap(rng);
            if (d <= horizon) {
              day[e.to] = d;
              next.push_back(e.to);
            }
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return log;
}

}  // namespace netcontest
