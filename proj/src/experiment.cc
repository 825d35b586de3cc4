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

#include "netcontest/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "netcontest/errors.h"
#include "netcontest/estimate.h"
#include "netcontest/parallel.h"

namespace netcontest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed streams for the batch runner, disjoint from the pipeline streams.
constexpr uint64_t kOptimumStream = 1000;
constexpr uint64_t kExample1Stream = 2000;

std::ostream& Log(const RunContext& ctx) {
  static std::ostringstream sink;
  return ctx.log ? *ctx.log : sink;
}

std::string Hex(uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string());
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  EnsureDir(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out = OpenOut(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError("cannot parse " + path.string() + ": " + err.what());
  }
}

nlohmann::json MatrixToJson(const Eigen::MatrixXd& x) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> row(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    rows.push_back(row);
  }
  return rows;
}

// NaN has no JSON representation.
nlohmann::json Number(double value) {
  return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json();
}

const nlohmann::json& Section(const nlohmann::json& config, const char* key) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!config.contains(key)) return empty;
  if (!config[key].is_object()) {
    throw ValidationError(std::string("config \"") + key +
                          "\" must be an object");
  }
  return config[key];
}

ContactMatrix ContactFromConfig(const nlohmann::json& block, int groups) {
  if (!block.contains("contact_csv")) return ContactMatrix::Default(groups);
  const std::string path = block["contact_csv"].get<std::string>();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open contact matrix " + path);
  return ContactMatrix::FromCsv(in);
}

// Population and weighted social graph from a generation block.
std::pair<Population, SocialGraph> GenerateGraph(const nlohmann::json& block,
                                                 uint64_t seed) {
  if (!block.contains("n") || !block["n"].is_number_integer() ||
      block["n"].get<long>() < 1) {
    throw ValidationError("generation block needs integer n >= 1");
  }
  const int n = block["n"].get<int>();
  const GenParams params = GenParams::FromJson(block.value(
      "params", nlohmann::json::object()));
  const Demographics demo = Demographics::FromJson(
      block.value("demographics", nlohmann::json::object()));
  const ContactMatrix contact =
      ContactFromConfig(block, static_cast<int>(demo.age_labels.size()));
  Population pop = GeneratePopulation(n, demo, MixSeed(seed, kPopulationStream));
  SocialGraph graph =
      SampleNetwork(pop, contact, params, MixSeed(seed, kNetworkStream));
  return {std::move(pop), std::move(graph)};
}

double SampleStd(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / (values.size() - 1));
}

nlohmann::json BandToJson(const RatioBand& band) {
  return {{"final_mean", Number(band.mean.empty() ? kNaN : band.mean.back())},
          {"final_std", Number(band.std.empty() ? kNaN : band.std.back())}};
}

}  // namespace

uint64_t Fnv1a(const std::string& text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

InitMode InitMode::FromJson(const nlohmann::json& doc) {
  InitMode out;
  const std::string mode =
      doc.is_string() ? doc.get<std::string>() : doc.value("mode", "uniform");
  if (mode == "uniform") {
    out.kind = InitKind::kUniform;
  } else if (mode == "random") {
    out.kind = InitKind::kRandom;
  } else if (mode == "biased") {
    out.kind = InitKind::kBiased;
  } else {
    throw ValidationError("unknown init mode '" + mode + "'");
  }
  if (doc.is_object()) out.mass = doc.value("mass", out.mass);
  if (!(out.mass > 0.0 && out.mass <= 1.0)) {
    throw ValidationError("biased init mass must lie in (0, 1]");
  }
  return out;
}

std::string InitMode::Name() const {
  switch (kind) {
    case InitKind::kUniform:
      return "uniform";
    case InitKind::kRandom:
      return "random";
    case InitKind::kBiased:
      return "biased";
  }
  return "";
}

Eigen::MatrixXd InitialProfile(const InitMode& mode, int firms, int nodes,
                               double cap, uint64_t seed) {
  Eigen::MatrixXd out(firms, nodes);
  std::mt19937_64 rng(seed);
  switch (mode.kind) {
    case InitKind::kUniform:
      out.setConstant(cap / nodes);
      break;
    case InitKind::kRandom: {
      std::exponential_distribution<double> exponential(1.0);
      for (int s = 0; s < firms; ++s) {
        double total = 0.0;
        for (int i = 0; i < nodes; ++i) total += out(s, i) = exponential(rng);
        total += exponential(rng);
        out.row(s) *= cap / total;
      }
      break;
    }
    case InitKind::kBiased: {
      std::uniform_int_distribution<int> pick(0, nodes - 1);
      for (int s = 0; s < firms; ++s) {
        const int hot = pick(rng);
        if (nodes == 1) {
          out(s, 0) = cap;
          continue;
        }
        out.row(s).setConstant((1.0 - mode.mass) * cap / (nodes - 1));
        out(s, hot) = mode.mass * cap;
      }
      break;
    }
  }
  return out;
}

InitMode RepetitionInit(int repetition, double biased_mass) {
  InitMode mode;
  mode.mass = biased_mass;
  if (repetition == 0) {
    mode.kind = InitKind::kUniform;
  } else {
    mode.kind = repetition % 2 == 1 ? InitKind::kRandom : InitKind::kBiased;
  }
  return mode;
}

BrdExperimentResult RunBrdExperiment(const Game& game,
                                     const BrdExperimentOptions& options) {
  if (options.repetitions < 1) throw ValidationError("repetitions must be >= 1");
  BrdExperimentResult out;
  BrdOptions brd = options.brd;
  brd.references.clear();
  for (size_t k = 0; k < options.welfare.size(); ++k) {
    WelfareOptimizeOptions opt;
    opt.restarts = options.restarts;
    opt.seed = MixSeed(options.seed, kOptimumStream + k);
    opt.threads = options.threads;
    out.optima.push_back(WelfareOptimize(game, options.welfare[k], opt));
    const bool usable = out.optima.back().defined && out.optima.back().value > 0.0;
    out.ratio_defined.push_back(usable);
    brd.references.push_back(
        {options.welfare[k], usable ? out.optima.back().value : kNaN});
  }
  const int reps = options.repetitions;
  out.traces.resize(static_cast<size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    out.inits.push_back(options.fixed_init
                            ? *options.fixed_init
                            : RepetitionInit(r, options.biased_mass));
  }
  ParallelFor(reps, options.threads, [&](int r) {
    const Eigen::MatrixXd initial =
        InitialProfile(out.inits[r], game.firms(), game.nodes(), game.cap(),
                       MixSeed(options.seed, static_cast<uint64_t>(r)));
    out.traces[r] = RunBrd(game, initial, brd);
  });

  size_t length = 0;
  for (const auto& t : out.traces) length = std::max(length, t.records.size());
  for (size_t k = 0; k < options.welfare.size(); ++k) {
    RatioBand band;
    std::vector<double> values;
    for (size_t step = 0; step < length; ++step) {
      values.clear();
      for (const auto& t : out.traces) {
        const auto& rec = t.records[std::min(step, t.records.size() - 1)];
        if (std::isfinite(rec.welfare_ratios[k])) {
          values.push_back(rec.welfare_ratios[k]);
        }
      }
      if (values.empty()) {
        band.mean.push_back(kNaN);
        band.std.push_back(kNaN);
        band.min.push_back(kNaN);
        band.max.push_back(kNaN);
        continue;
      }
      double sum = 0.0;
      for (double v : values) sum += v;
      const double mean = sum / values.size();
      band.mean.push_back(mean);
      band.std.push_back(SampleStd(values, mean));
      band.min.push_back(*std::min_element(values.begin(), values.end()));
      band.max.push_back(*std::max_element(values.begin(), values.end()));
    }
    std::vector<double> terminal;
    bool all_defined = true;
    for (const auto& t : out.traces) {
      const double v = t.records.back().welfare_ratios[k];
      if (std::isfinite(v)) {
        terminal.push_back(v);
      } else {
        all_defined = false;
      }
    }
    if (all_defined && !terminal.empty()) {
      double sum = 0.0;
      for (double v : terminal) sum += v;
      const double mean = sum / terminal.size();
      out.terminal_mean.push_back(mean);
      out.terminal_std.push_back(SampleStd(terminal, mean));
    } else {
      out.terminal_mean.push_back(kNaN);
      out.terminal_std.push_back(kNaN);
    }
    out.bands.push_back(std::move(band));
  }
  return out;
}

Eigen::MatrixXd Example1PublishedBudgets() {
  Eigen::MatrixXd b(2, 5);
  b << 0.1496, 0.0, 0.5263, 0.1907, 0.1334,
       0.0337, 0.0, 0.9663, 0.0, 0.0;
  return b;
}

Eigen::Vector2d Example1PublishedUtilities() { return {1.0431, 1.1021}; }

Game Example1Game() {
  return Game(Example1Network(), Csf::Softmax(1.0, 0.5), 2, 1.0);
}

bool Example1Report::AllPass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Example1Check& c) { return c.pass; });
}

nlohmann::json Example1Report::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    list.push_back({{"quantity", c.quantity},
                    {"expected", Number(c.expected)},
                    {"actual", Number(c.actual)},
                    {"tolerance", c.tolerance},
                    {"pass", c.pass}});
  }
  return {{"checks", list},
          {"brd_final_budgets", MatrixToJson(trace.final_budgets)},
          {"brd_converged", trace.converged},
          {"brd_iterations", trace.records.back().k},
          {"brd_final_utilities",
           std::vector<double>(utilities.data(),
                               utilities.data() + utilities.size())},
          {"welfare_optimal_budgets", MatrixToJson(optimum.budgets)},
          {"welfare_optimum", optimum.value},
          {"poa_utilitarian", Number(poa.defined ? poa.ratio : kNaN)},
          {"all_pass", AllPass()}};
}

Example1Report RunExample1(uint64_t seed, int threads) {
  const Game game = Example1Game();
  Example1Report report;
  auto check = [&](std::string name, double expected, double actual,
                   double tol) {
    report.checks.push_back({std::move(name), expected, actual, tol,
                             std::isfinite(actual) &&
                                 std::abs(actual - expected) <= tol});
  };

  const Eigen::MatrixXd published = Example1PublishedBudgets();
  const Eigen::Vector2d published_u = Example1PublishedUtilities();
  const Eigen::VectorXd u_at_published = game.Utilities(published);
  check("u_A at published budgets", published_u[0], u_at_published[0], 0.01);
  check("u_B at published budgets", published_u[1], u_at_published[1], 0.01);

  const Eigen::MatrixXd initial =
      InitialProfile({InitKind::kRandom, 0.5}, 2, 5, 1.0,
                     MixSeed(seed, kExample1Stream));
  report.trace = RunBrd(game, initial, BrdOptions{});
  report.utilities = report.trace.records.back().utilities;
  report.budget_distance =
      (report.trace.final_budgets - published).cwiseAbs().maxCoeff();
  check("BRD budgets L-inf distance to published", 0.0, report.budget_distance,
        0.02);
  check("u_A after BRD", published_u[0], report.utilities[0], 0.01);
  check("u_B after BRD", published_u[1], report.utilities[1], 0.01);

  // Welfare values at the BRD outcome, matched as a set.
  std::vector<double> expected_set = {1.0431, 1.0726, 1.0722};
  std::vector<double> actual_set;
  for (const auto& spec : {WelfareSpec::Utilitarian(), WelfareSpec::Egalitarian(),
                           WelfareSpec::Nash()}) {
    const WelfareResult w = PMean(report.utilities, spec);
    actual_set.push_back(w.defined ? w.value : kNaN);
  }
  std::sort(expected_set.begin(), expected_set.end());
  std::sort(actual_set.begin(), actual_set.end());
  double set_gap = 0.0;
  for (size_t k = 0; k < 3; ++k) {
    set_gap = std::max(set_gap, std::abs(actual_set[k] - expected_set[k]));
  }
  check("welfare set {mean, min, geometric} after BRD", 0.0, set_gap, 0.001);

  const NashCheck nash = VerifyNash(game, published, 0.01);
  check("largest deviation gain at published budgets", 0.0,
        nash.improvements.maxCoeff(), 0.01);

  WelfareOptimizeOptions opt;
  opt.seed = MixSeed(seed, kExample1Stream + 1);
  opt.threads = threads;
  for (const auto& spec : {WelfareSpec::Utilitarian(), WelfareSpec::Egalitarian(),
                           WelfareSpec::Nash()}) {
    WelfareOptimum best = WelfareOptimize(game, spec, opt);
    check("W_opt (" + spec.Name() + ")", 2.0, best.defined ? best.value : kNaN,
          1e-4);
    if (spec.p == 1.0) report.optimum = std::move(best);
  }
  check("welfare-optimal budgets max entry", 0.0,
        report.optimum.budgets.cwiseAbs().maxCoeff(), 1e-4);

  report.poa = PriceOfAnarchy(game, WelfareSpec::Utilitarian(),
                              {report.trace.final_budgets},
                              report.optimum.value);
  check("utilitarian PoA", 1.865, report.poa.defined ? report.poa.ratio : kNaN,
        0.02);
  return report;
}

nlohmann::json RunContext::Provenance() const {
  return {{"config_hash", config_hash}, {"seed", seed}};
}

std::string RunContext::CsvProvenance() const {
  return "# config_hash=" + config_hash + ",seed=" + std::to_string(seed);
}

RunContext MakeContext(const std::optional<std::filesystem::path>& config_path,
                       std::optional<uint64_t> seed,
                       const std::filesystem::path& out_dir, int threads,
                       std::ostream* log) {
  RunContext ctx;
  if (config_path) {
    ctx.config = ReadJsonFile(*config_path);
    if (!ctx.config.is_object()) {
      throw ValidationError("config must be a JSON object");
    }
  }
  if (seed) {
    ctx.seed = *seed;
  } else if (ctx.config.contains("seed")) {
    if (!ctx.config["seed"].is_number_unsigned()) {
      throw ValidationError("config \"seed\" must be a non-negative integer");
    }
    ctx.seed = ctx.config["seed"].get<uint64_t>();
  } else {
    std::random_device device;
    ctx.seed = (static_cast<uint64_t>(device()) << 32) | device();
    ctx.seed_generated = true;
  }
  ctx.config["seed"] = ctx.seed;
  ctx.out_dir = out_dir;
  ctx.threads = std::max(1, threads);
  ctx.config_hash = Hex(Fnv1a(ctx.config.dump()));
  ctx.log = log;
  return ctx;
}

InfluenceNetwork NetworkFromConfig(const nlohmann::json& config,
                                   uint64_t seed) {
  const nlohmann::json& block = Section(config, "network");
  if (block.value("example1", false)) return Example1Network();
  if (block.contains("path")) {
    return LoadNetwork(block["path"].get<std::string>(),
                       block.value("alpha", 0.5));
  }
  if (block.contains("generate")) {
    const auto& gen = block["generate"];
    auto [pop, graph] = GenerateGraph(gen, seed);
    return GraphToNetwork(graph, gen.value("alpha", 0.5));
  }
  throw ValidationError(
      "config \"network\" needs \"path\", \"generate\" or \"example1\"");
}

std::vector<Csf> CsfsFromConfig(const nlohmann::json& config) {
  std::vector<Csf> out;
  if (config.contains("csfs")) {
    for (const auto& block : config["csfs"]) out.push_back(Csf::FromJson(block));
  } else if (config.contains("csf")) {
    out.push_back(Csf::FromJson(config["csf"]));
  } else {
    out.push_back(Csf::Tullock(1.0, 0.5));
  }
  if (out.empty()) throw ValidationError("config \"csfs\" is empty");
  return out;
}

std::vector<WelfareSpec> WelfareFromConfig(const nlohmann::json& config) {
  if (!config.contains("welfare")) {
    return {WelfareSpec::Utilitarian(), WelfareSpec::Nash(),
            WelfareSpec::Egalitarian()};
  }
  std::vector<WelfareSpec> out;
  if (config["welfare"].is_array()) {
    for (const auto& w : config["welfare"]) out.push_back(WelfareSpec::FromJson(w));
  } else {
    out.push_back(WelfareSpec::FromJson(config["welfare"]));
  }
  if (out.empty()) throw ValidationError("config \"welfare\" is empty");
  return out;
}

BrdOptions BrdOptionsFromConfig(const nlohmann::json& config) {
  const nlohmann::json& block = Section(config, "game");
  BrdOptions out;
  out.gamma = block.value("gamma", out.gamma);
  out.max_iterations = block.value("K", out.max_iterations);
  out.tolerance = block.value("eps", out.tolerance);
  out.projection =
      ProjectionModeFromString(block.value("projection_mode", "euclidean"));
  if (!(out.gamma > 0.0)) throw ValidationError("gamma must be > 0");
  if (out.max_iterations < 1) throw ValidationError("K must be >= 1");
  if (!(out.tolerance > 0.0)) throw ValidationError("eps must be > 0");
  return out;
}

Game GameFromConfig(const nlohmann::json& config, uint64_t seed) {
  const nlohmann::json& block = Section(config, "game");
  return Game(NetworkFromConfig(config, seed), CsfsFromConfig(config).front(),
              block.value("m", 2), block.value("C", 1.0));
}

Population ReadCustomersCsv(std::istream& in,
                            const Demographics& demographics) {
  Population pop;
  pop.demographics = demographics;
  std::map<std::string, int> ages;
  std::map<std::string, int> genders;
  for (size_t k = 0; k < demographics.age_labels.size(); ++k) {
    ages[demographics.age_labels[k]] = static_cast<int>(k);
  }
  for (size_t k = 0; k < demographics.gender_labels.size(); ++k) {
    genders[demographics.gender_labels[k]] = static_cast<int>(k);
  }
  std::set<std::pair<int, int>> tiles;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
    std::stringstream cells(line);
    std::string id, age, gender, x, y;
    std::getline(cells, id, ',');
    std::getline(cells, age, ',');
    std::getline(cells, gender, ',');
    std::getline(cells, x, ',');
    std::getline(cells, y, ',');
    Customer c;
    try {
      c.id = std::stoi(id);
      c.tile_x = std::stoi(x);
      c.tile_y = std::stoi(y);
    } catch (const std::exception&) {
      throw ValidationError("customers CSV row " + std::to_string(row) +
                            ": bad number");
    }
    if (!ages.count(age) || !genders.count(gender)) {
      throw ValidationError("customers CSV row " + std::to_string(row) +
                            ": unknown age group or gender");
    }
    if (c.id != pop.size()) {
      throw ValidationError("customers CSV row " + std::to_string(row) +
                            ": ids must be 0, 1, 2, ... in order");
    }
    c.age_group = ages[age];
    c.gender = genders[gender];
    tiles.insert({c.tile_x, c.tile_y});
    pop.grid_side = std::max({pop.grid_side, c.tile_x + 1, c.tile_y + 1});
    pop.customers.push_back(c);
  }
  if (pop.customers.empty()) throw ValidationError("customers CSV is empty");
  for (const auto& [x, y] : tiles) pop.tiles.push_back({x, y});
  return pop;
}

int CmdGenData(const RunContext& ctx) {
  const nlohmann::json& block = Section(ctx.config, "data");
  auto [pop, graph] = GenerateGraph(block, ctx.seed);
  const GenParams params =
      GenParams::FromJson(block.value("params", nlohmann::json::object()));
  const AdoptionLog log =
      IcDiffuse(graph, params, MixSeed(ctx.seed, kDiffusionStream));
  EnsureDir(ctx.out_dir);
  {
    std::ofstream out = OpenOut(ctx.out_dir / "customers.csv");
    out << ctx.CsvProvenance() << '\n';
    WriteCustomersCsv(pop, out);
  }
  {
    std::ofstream out = OpenOut(ctx.out_dir / "holdings.csv");
    out << ctx.CsvProvenance() << '\n';
    log.WriteCsv(out);
  }
  nlohmann::json graph_doc = graph.ToJson();
  graph_doc["provenance"] = ctx.Provenance();
  WriteJson(ctx.out_dir / "graph.json", graph_doc);
  const auto& demo = pop.demographics;
  WriteJson(ctx.out_dir / "manifest.json",
            {{"provenance", ctx.Provenance()},
             {"n", pop.size()},
             {"n_products", params.n_products},
             {"launch", FormatDate(params.launch)},
             {"horizon_end", FormatDate(params.horizon_end)},
             {"params", params.ToJson()},
             {"demographics",
              {{"age_labels", demo.age_labels},
               {"age_weights", demo.age_weights},
               {"gender_labels", demo.gender_labels},
               {"gender_weights", demo.gender_weights}}},
             {"tiles", static_cast<int>(pop.tiles.size())},
             {"grid_side", pop.grid_side},
             {"edges", graph.edges.size()},
             {"adoptions", log.EventCount()}});
  Log(ctx) << "seed: " << ctx.seed << '\n'
           << "customers: " << pop.size() << ", tiles: " << pop.tiles.size()
           << ", edges: " << graph.edges.size()
           << ", adoptions: " << log.EventCount() << '\n';
  return 0;
}

int CmdGenNetwork(const RunContext& ctx) {
  const nlohmann::json& block = Section(ctx.config, "network");
  if (!block.contains("generate")) {
    throw ValidationError("gen-network needs config network.generate");
  }
  const InfluenceNetwork net = NetworkFromConfig(ctx.config, ctx.seed);
  nlohmann::json doc = NetworkToJson(net);
  doc["provenance"] = ctx.Provenance();
  WriteJson(ctx.out_dir / "network.json", doc);
  const Centrality c = ComputeCentrality(net);
  Log(ctx) << "seed: " << ctx.seed << '\n'
           << "nodes: " << net.size() << ", edges: " << doc["edges"].size()
           << ", sum of weighted centrality: " << c.weighted.sum() << '\n';
  return 0;
}

int CmdEstimate(const RunContext& ctx) {
  const nlohmann::json& block = Section(ctx.config, "estimate");
  const Date cut = ParseDate(block.value("cut_date", "2022-01-01"));
  const double alpha = block.value("alpha", 0.5);
  const int rounds = block.value("rounds", 100);
  bool did_something = false;

  if (block.contains("dataset")) {
    did_something = true;
    const std::filesystem::path dir = block["dataset"].get<std::string>();
    const nlohmann::json manifest = ReadJsonFile(dir / "manifest.json");
    const Demographics demo = Demographics::FromJson(
        manifest.value("demographics", nlohmann::json::object()));
    const GenParams params = GenParams::FromJson(
        manifest.value("params", nlohmann::json::object()));
    std::ifstream customers_in(dir / "customers.csv");
    if (!customers_in) {
      throw ValidationError("missing " + (dir / "customers.csv").string());
    }
    const Population pop = ReadCustomersCsv(customers_in, demo);
    std::ifstream holdings_in(dir / "holdings.csv");
    if (!holdings_in) {
      throw ValidationError("missing " + (dir / "holdings.csv").string());
    }
    const AdoptionLog actual = AdoptionLog::ReadCsv(
        holdings_in, pop.size(), params.n_products, params.launch);
    SocialGraph candidates;
    if (block.contains("candidates")) {
      candidates = SocialGraph::FromJson(
          ReadJsonFile(block["candidates"].get<std::string>()));
      if (candidates.n != pop.size()) {
        throw ValidationError("candidate graph size does not match customers");
      }
    } else {
      const ContactMatrix contact = ContactFromConfig(
          block, static_cast<int>(demo.age_labels.size()));
      candidates = SampleCandidates(pop, contact, params,
                                    MixSeed(ctx.seed, kCandidateStream));
    }
    const int cut_day = (cut - params.launch).count();
    const EstimatedInfluence est = EstimateInfluence(actual, candidates, cut_day);
    const auto thetas = SampleThresholds(pop.size(), params.n_products,
                                         MixSeed(ctx.seed, kThresholdStream));
    const GtResult gt = GtPredict(est, actual, cut_day, thetas, rounds);
    const ValidationScore score = Validate(gt.predicted, actual, cut_day);

    nlohmann::json net_doc = est.ToJson(alpha);
    nlohmann::json rescaled = nlohmann::json::array();
    for (const auto& r : est.rescaled) {
      rescaled.push_back({{"column", r.column}, {"sum", r.sum}});
    }
    net_doc["rescaled_columns"] = rescaled;
    net_doc["provenance"] = ctx.Provenance();
    WriteJson(ctx.out_dir / "estimated_network.json", net_doc);
    {
      std::ofstream out = OpenOut(ctx.out_dir / "predicted_holdings.csv");
      out << ctx.CsvProvenance() << '\n';
      gt.predicted.WriteCsv(out);
    }
    WriteJson(ctx.out_dir / "validation.json",
              {{"provenance", ctx.Provenance()},
               {"n", pop.size()},
               {"beta_a", params.beta_a},
               {"beta_b", params.beta_b},
               {"mean_accuracy", score.accuracy},
               {"std", 0.0},
               {"runs", 1},
               {"all_pairs_accuracy", score.all_pairs_accuracy},
               {"pairs", score.pairs},
               {"cut_date", FormatDate(cut)},
               {"gt_rounds", gt.rounds_run},
               {"gt_fixed_point", gt.fixed_point}});
    for (const auto& r : est.rescaled) {
      Log(ctx) << "rescaled column " << r.column << " (sum " << r.sum << ")\n";
    }
    Log(ctx) << "estimated edges: " << est.edges.size()
             << ", accuracy: " << score.accuracy << "%\n";
  }

  if (ctx.config.contains("validation")) {
    did_something = true;
    const nlohmann::json& v = Section(ctx.config, "validation");
    const int n = v.value("n", 2000);
    if (n < 1) throw ValidationError("validation n must be >= 1");
    const GenParams params =
        GenParams::FromJson(v.value("params", nlohmann::json::object()));
    const Demographics demo = Demographics::FromJson(
        v.value("demographics", nlohmann::json::object()));
    const ContactMatrix contact =
        ContactFromConfig(v, static_cast<int>(demo.age_labels.size()));
    const Date vcut = ParseDate(v.value("cut_date", FormatDate(cut)));
    ValidationReport report =
        RunValidation(n, params, demo, contact, vcut,
                      v.value("repetitions", 100), ctx.seed, ctx.threads);
    nlohmann::json doc = report.ToJson();
    doc["provenance"] = ctx.Provenance();
    WriteJson(ctx.out_dir / "validation_report.json", doc);
    Log(ctx) << "validation: n=" << n << " runs=" << report.runs.size()
             << " mean accuracy " << report.mean_accuracy << "% (std "
             << report.std_accuracy << ")\n";
  }
  if (!did_something) {
    throw ValidationError(
        "estimate needs config estimate.dataset and/or a validation block");
  }
  return 0;
}

int CmdBrd(const RunContext& ctx) {
  const nlohmann::json& game_block = Section(ctx.config, "game");
  const InfluenceNetwork net = NetworkFromConfig(ctx.config, ctx.seed);
  const std::vector<Csf> csfs = CsfsFromConfig(ctx.config);
  BrdExperimentOptions options;
  options.brd = BrdOptionsFromConfig(ctx.config);
  options.welfare = WelfareFromConfig(ctx.config);
  options.repetitions = ctx.config.value("repetitions", 50);
  options.restarts = ctx.config.value("restarts", 8);
  options.seed = ctx.seed;
  options.threads = ctx.threads;
  if (ctx.config.contains("init")) {
    const auto& init = ctx.config["init"];
    const std::string mode =
        init.is_string() ? init.get<std::string>() : init.value("mode", "mixed");
    if (init.is_object()) options.biased_mass = init.value("mass", 0.5);
    if (mode != "mixed") options.fixed_init = InitMode::FromJson(init);
  }
  const int stride =
      std::max(1, Section(ctx.config, "output").value("record_every", 1));

  nlohmann::json summary = {{"provenance", ctx.Provenance()},
                            {"band", "mean and sample std, plus min and max, "
                                     "of R(k) across repetitions"},
                            {"results", nlohmann::json::array()}};
  for (size_t c = 0; c < csfs.size(); ++c) {
    const Game game(net, csfs[c], game_block.value("m", 2),
                    game_block.value("C", 1.0));
    const BrdExperimentResult result = RunBrdExperiment(game, options);
    const std::filesystem::path dir =
        ctx.out_dir / ("csf_" + std::to_string(c));
    EnsureDir(dir);
    nlohmann::json finals = {{"provenance", ctx.Provenance()},
                             {"csf", csfs[c].ToJson()},
                             {"repetitions", nlohmann::json::array()}};
    for (size_t r = 0; r < result.traces.size(); ++r) {
      const BrdTrace& trace = result.traces[r];
      std::ofstream out =
          OpenOut(dir / ("trace_" + std::to_string(r) + ".csv"));
      out << ctx.CsvProvenance() << '\n'
          << "k,firm,utility,grad_norm,welfare_ratio\n";
      for (size_t idx = 0; idx < trace.records.size(); ++idx) {
        const BrdRecord& rec = trace.records[idx];
        if (rec.k % stride != 0 && idx + 1 != trace.records.size()) continue;
        for (int s = 0; s < game.firms(); ++s) {
          out << rec.k << ',' << s << ',' << rec.utilities[s] << ','
              << rec.firm_norms[s] << ',';
          if (std::isfinite(rec.welfare_ratios[0])) out << rec.welfare_ratios[0];
          out << '\n';
        }
      }
      finals["repetitions"].push_back(
          {{"rep", r},
           {"init", result.inits[r].Name()},
           {"converged", trace.converged},
           {"iterations", trace.records.back().k},
           {"final_joint_norm", trace.records.back().joint_norm},
           {"budgets", MatrixToJson(trace.final_budgets)}});
    }
    WriteJson(dir / "final_budgets.json", finals);
    {
      std::ofstream out = OpenOut(dir / "band.csv");
      out << ctx.CsvProvenance() << '\n' << "welfare,k,mean,std,min,max\n";
      for (size_t w = 0; w < options.welfare.size(); ++w) {
        const RatioBand& band = result.bands[w];
        for (size_t k = 0; k < band.mean.size(); ++k) {
          if (k % stride != 0 && k + 1 != band.mean.size()) continue;
          out << options.welfare[w].Name() << ',' << k;
          for (double v : {band.mean[k], band.std[k], band.min[k], band.max[k]}) {
            out << ',';
            if (std::isfinite(v)) out << v;
          }
          out << '\n';
        }
      }
    }
    nlohmann::json entry = {{"csf", csfs[c].ToJson()},
                            {"directory", dir.filename().string()},
                            {"welfare", nlohmann::json::array()}};
    int converged = 0;
    for (const auto& t : result.traces) converged += t.converged;
    entry["converged_runs"] = converged;
    for (size_t w = 0; w < options.welfare.size(); ++w) {
      const WelfareOptimum& opt = result.optima[w];
      nlohmann::json item = {
          {"welfare", options.welfare[w].Name()},
          {"W_opt", opt.defined ? Number(opt.value) : nlohmann::json()},
          {"ratio_defined", static_cast<bool>(result.ratio_defined[w])},
          {"terminal_mean_R", Number(result.terminal_mean[w])},
          {"terminal_std_R", Number(result.terminal_std[w])}};
      item.update(BandToJson(result.bands[w]));
      entry["welfare"].push_back(item);
      Log(ctx) << csfs[c].Name() << " " << options.welfare[w].Name()
               << ": W_opt=" << (opt.defined ? opt.value : kNaN)
               << " terminal R mean=" << result.terminal_mean[w]
               << " std=" << result.terminal_std[w] << '\n';
    }
    summary["results"].push_back(entry);
  }
  WriteJson(ctx.out_dir / "brd_summary.json", summary);
  return 0;
}

int CmdWelfare(const RunContext& ctx) {
  const nlohmann::json& game_block = Section(ctx.config, "game");
  const InfluenceNetwork net = NetworkFromConfig(ctx.config, ctx.seed);
  const std::vector<Csf> csfs = CsfsFromConfig(ctx.config);
  const std::vector<WelfareSpec> specs = WelfareFromConfig(ctx.config);
  const double tol = ctx.config.value("nash_tolerance", 0.01);
  BrdExperimentOptions options;
  options.brd = BrdOptionsFromConfig(ctx.config);
  options.welfare = specs;
  options.repetitions = ctx.config.value("repetitions", 10);
  options.restarts = ctx.config.value("restarts", 8);
  options.seed = ctx.seed;
  options.threads = ctx.threads;

  nlohmann::json report = {{"provenance", ctx.Provenance()},
                           {"results", nlohmann::json::array()}};
  for (size_t c = 0; c < csfs.size(); ++c) {
    const Game game(net, csfs[c], game_block.value("m", 2),
                    game_block.value("C", 1.0));
    const BrdExperimentResult result = RunBrdExperiment(game, options);
    std::vector<Eigen::MatrixXd> equilibria;
    int rejected = 0;
    if (game.firms() == 1) {
      // With one firm the equilibria are exactly the welfare maximizers.
      equilibria.push_back(result.optima.front().budgets);
    } else {
      for (const auto& trace : result.traces) {
        if (VerifyNash(game, trace.final_budgets, tol).is_nash) {
          equilibria.push_back(trace.final_budgets);
        } else {
          ++rejected;
        }
      }
    }
    nlohmann::json entry = {{"csf", csfs[c].ToJson()},
                            {"equilibria", equilibria.size()},
                            {"rejected_runs", rejected},
                            {"nash_tolerance", tol},
                            {"welfare", nlohmann::json::array()}};
    const std::filesystem::path dir =
        ctx.out_dir / ("csf_" + std::to_string(c));
    EnsureDir(dir);
    std::ofstream ratio_out = OpenOut(dir / "welfare_ratio.csv");
    ratio_out << ctx.CsvProvenance() << '\n' << "welfare,k,R\n";
    for (size_t w = 0; w < specs.size(); ++w) {
      const WelfareOptimum& opt = result.optima[w];
      nlohmann::json item = {{"welfare", specs[w].Name()},
                             {"W_opt", opt.defined ? Number(opt.value)
                                                   : nlohmann::json()},
                             {"B_opt", MatrixToJson(opt.budgets)},
                             {"PoA", nullptr},
                             {"poa_defined", false}};
      if (!equilibria.empty() && opt.defined) {
        const PoaResult poa = PriceOfAnarchy(game, specs[w], equilibria,
                                             opt.value);
        item["poa_defined"] = poa.defined;
        if (poa.defined) {
          item["PoA"] = poa.ratio;
          item["worst_equilibrium_welfare"] = poa.worst_welfare;
        }
        Log(ctx) << csfs[c].Name() << " " << specs[w].Name()
                 << ": W_opt=" << opt.value << " PoA="
                 << (poa.defined ? poa.ratio : kNaN) << '\n';
      } else {
        Log(ctx) << csfs[c].Name() << " " << specs[w].Name()
                 << ": PoA undefined\n";
      }
      if (result.ratio_defined[w]) {
        for (const auto& [k, r] :
             WelfareRatioCurve(result.traces.front(), specs[w], opt.value)) {
          ratio_out << specs[w].Name() << ',' << k << ',';
          if (std::isfinite(r)) ratio_out << r;
          ratio_out << '\n';
        }
      }
      entry["welfare"].push_back(item);
    }
    report["results"].push_back(entry);
  }
  WriteJson(ctx.out_dir / "welfare_report.json", report);
  return 0;
}

int CmdVerifyCsf(const RunContext& ctx) {
  const nlohmann::json& block = Section(ctx.config, "audit");
  AuditOptions options;
  options.firms = block.value("firms", options.firms);
  options.grid = block.value("grid", options.grid);
  options.slack = block.value("slack", options.slack);
  if (block.contains("offsets")) {
    options.offsets = block["offsets"].get<std::vector<double>>();
  }
  nlohmann::json report = {{"provenance", ctx.Provenance()},
                           {"results", nlohmann::json::array()}};
  for (const Csf& csf : CsfsFromConfig(ctx.config)) {
    const AssumptionReport audit = CheckAssumptions(csf, options);
    std::ostream& out = Log(ctx);
    out << csf.Name() << " (m=" << options.firms << ", grid=" << options.grid
        << ")\n";
    auto line = [&](const char* name, bool ok, long violations) {
      out << "  " << std::left << std::setw(26) << name
          << (ok ? "pass" : "FAIL");
      if (!ok) out << "  (" << violations << " grid violations)";
      out << '\n';
    };
    line("strict concavity", audit.concavity_ok, audit.concavity_violations);
    line("strategic substitutability", audit.substitutability_ok,
         audit.substitutability_violations);
    line("dominance", audit.dominance_ok, audit.dominance_violations);
    for (const auto& w : audit.witnesses) {
      out << "    witness " << w.condition << " at (";
      for (size_t k = 0; k < w.point.size(); ++k) {
        out << (k ? ", " : "") << w.point[k];
      }
      out << ")";
      if (w.condition == "dominance") out << " offset " << w.offset;
      out << ": " << w.value << '\n';
    }
    nlohmann::json entry = audit.ToJson();
    entry["csf"] = csf.ToJson();
    report["results"].push_back(entry);
  }
  WriteJson(ctx.out_dir / "csf_audit.json", report);
  return 0;
}

int CmdReproduceExample1(const RunContext& ctx) {
  const Example1Report report = RunExample1(ctx.seed, ctx.threads);
  std::ostream& out = Log(ctx);
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.quantity << ": expected "
        << c.expected << " +/- " << c.tolerance << ", got " << c.actual
        << '\n';
  }
  nlohmann::json doc = report.ToJson();
  doc["provenance"] = ctx.Provenance();
  WriteJson(ctx.out_dir / "example1.json", doc);
  return report.AllPass() ? 0 : 1;
}

}  // namespace netcontest
