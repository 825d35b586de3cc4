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

#include "netcontest/csf.h"

#include <cmath>
#include <sstream>

#include "netcontest/errors.h"

namespace netcontest {

namespace {

// Visits every nondecreasing sequence of length `len` over grid indices
// [0, count). By permutation symmetry of the opponents this covers the full
// opponent grid.
template <typename Visit>
void ForEachMultiset(int len, int count, Visit&& visit) {
  std::vector<int> idx(static_cast<size_t>(len), 0);
  if (len == 0) {
    visit(idx);
    return;
  }
  while (true) {
    visit(idx);
    int pos = len - 1;
    while (pos >= 0 && idx[pos] == count - 1) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int k = pos + 1; k < len; ++k) idx[k] = idx[pos];
  }
}

void AddWitness(AssumptionReport* report, const AuditOptions& options,
                long violations, AssumptionWitness witness) {
  if (violations <= options.max_witnesses) {
    report->witnesses.push_back(std::move(witness));
  }
}

}  // namespace

Csf::Csf(CsfFamily family, double exponent, double delta)
    : family_(family), exponent_(exponent), delta_(delta) {
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
    throw ValidationError("CSF delta must be positive");
  }
  if ((family_ == CsfFamily::kTullock || family_ == CsfFamily::kSoftmax) &&
      !(exponent_ > 0.0)) {
    throw ValidationError("CSF exponent must be positive");
  }
}

Csf Csf::Tullock(double q, double delta) {
  return Csf(CsfFamily::kTullock, q, delta);
}
Csf Csf::Log(double delta) { return Csf(CsfFamily::kLog, 0.0, delta); }
Csf Csf::Exp(double delta) { return Csf(CsfFamily::kExp, 0.0, delta); }
Csf Csf::Softmax(double k, double delta) {
  return Csf(CsfFamily::kSoftmax, k, delta);
}

Csf Csf::FromJson(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("family")) {
    throw ValidationError("CSF block needs a \"family\"");
  }
  const std::string family = doc["family"].get<std::string>();
  const double delta = doc.value("delta", 0.5);
  if (family == "tullock") return Tullock(doc.value("q", 1.0), delta);
  if (family == "log") return Log(delta);
  if (family == "exp") return Exp(delta);
  if (family == "softmax") return Softmax(doc.value("k", 1.0), delta);
  throw ValidationError("unknown CSF family '" + family + "'");
}

nlohmann::json Csf::ToJson() const {
  switch (family_) {
    case CsfFamily::kTullock:
      return {{"family", "tullock"}, {"q", exponent_}, {"delta", delta_}};
    case CsfFamily::kLog:
      return {{"family", "log"}, {"delta", delta_}};
    case CsfFamily::kExp:
      return {{"family", "exp"}, {"delta", delta_}};
    case CsfFamily::kSoftmax:
      return {{"family", "softmax"}, {"k", exponent_}, {"delta", delta_}};
  }
  return {};
}

std::string Csf::Name() const {
  std::ostringstream out;
  switch (family_) {
    case CsfFamily::kTullock:
      out << "tullock(q=" << exponent_ << ", delta=" << delta_ << ")";
      break;
    case CsfFamily::kLog:
      out << "log(delta=" << delta_ << ")";
      break;
    case CsfFamily::kExp:
      out << "exp(delta=" << delta_ << ")";
      break;
    case CsfFamily::kSoftmax:
      out << "softmax(k=" << exponent_ << ", delta=" << delta_ << ")";
      break;
  }
  return out.str();
}

bool Csf::ZeroAtOrigin() const {
  return family_ == CsfFamily::kTullock || family_ == CsfFamily::kLog;
}

double Csf::Transform(double b) const {
  switch (family_) {
    case CsfFamily::kTullock:
      return exponent_ == 1.0 ? b : std::pow(b, exponent_);
    case CsfFamily::kLog:
      return std::log1p(b);
    case CsfFamily::kExp:
      return std::exp(b);
    case CsfFamily::kSoftmax:
      return std::exp(exponent_ * b);
  }
  return 0.0;
}

double Csf::TransformSlope(double b) const {
  switch (family_) {
    case CsfFamily::kTullock: {
      const double x = std::max(b, kDerivativeFloor);
      return exponent_ == 1.0 ? 1.0 : exponent_ * std::pow(x, exponent_ - 1.0);
    }
    case CsfFamily::kLog:
      return 1.0 / (1.0 + b);
    case CsfFamily::kExp:
      return std::exp(b);
    case CsfFamily::kSoftmax:
      return exponent_ * std::exp(exponent_ * b);
  }
  return 0.0;
}

double Csf::TransformCurvature(double b) const {
  switch (family_) {
    case CsfFamily::kTullock: {
      if (exponent_ == 1.0) return 0.0;
      const double x = std::max(b, kDerivativeFloor);
      return exponent_ * (exponent_ - 1.0) * std::pow(x, exponent_ - 2.0);
    }
    case CsfFamily::kLog:
      return -1.0 / ((1.0 + b) * (1.0 + b));
    case CsfFamily::kExp:
      return std::exp(b);
    case CsfFamily::kSoftmax:
      return exponent_ * exponent_ * std::exp(exponent_ * b);
  }
  return 0.0;
}

CsfValue Csf::Evaluate(double own, std::span<const double> others) const {
  if (own < 0.0) throw ValidationError("negative own budget");
  const double f = Transform(own);
  const double fp = TransformSlope(own);
  const double fpp = TransformCurvature(own);
  double sum_others = 0.0;
  for (double b : others) {
    if (b < 0.0) throw ValidationError("negative opponent budget");
    sum_others += Transform(b);
  }
  // rest = everything in the denominator except the own term.
  const double rest = sum_others + delta_;
  const double total = f + rest;
  const double total2 = total * total;
  const double total3 = total2 * total;
  CsfValue out;
  out.h = f / total;
  out.dh_own = fp * rest / total2;
  out.d2h_own = rest * (fpp * total - 2.0 * fp * fp) / total3;
  out.dh_cross.reserve(others.size());
  out.d2h_cross.reserve(others.size());
  for (double b : others) {
    const double gp = TransformSlope(b);
    out.dh_cross.push_back(-f * gp / total2);
    out.d2h_cross.push_back(fp * gp * (2.0 * f - total) / total3);
  }
  return out;
}

NodeCsf Csf::EvaluateNode(std::span<const double> budgets) const {
  const auto m = static_cast<Eigen::Index>(budgets.size());
  Eigen::VectorXd f(m), fp(m), fpp(m);
  double total = delta_;
  for (Eigen::Index s = 0; s < m; ++s) {
    if (budgets[s] < 0.0) throw ValidationError("negative budget");
    f[s] = Transform(budgets[s]);
    fp[s] = TransformSlope(budgets[s]);
    fpp[s] = TransformCurvature(budgets[s]);
    total += f[s];
  }
  const double total2 = total * total;
  const double total3 = total2 * total;
  NodeCsf out;
  out.h = f / total;
  out.dh.resize(m, m);
  out.d2h.resize(m, m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const double rest = total - f[s];
    for (Eigen::Index r = 0; r < m; ++r) {
      if (r == s) {
        out.dh(s, s) = fp[s] * rest / total2;
        out.d2h(s, s) = rest * (fpp[s] * total - 2.0 * fp[s] * fp[s]) / total3;
      } else {
        out.dh(s, r) = -f[s] * fp[r] / total2;
        out.d2h(s, r) = fp[s] * fp[r] * (2.0 * f[s] - total) / total3;
      }
    }
  }
  return out;
}

void Csf::Values(std::span<const double> budgets, std::span<double> out) const {
  double total = delta_;
  for (size_t s = 0; s < budgets.size(); ++s) {
    out[s] = Transform(budgets[s]);
    total += out[s];
  }
  for (size_t s = 0; s < budgets.size(); ++s) out[s] /= total;
}

nlohmann::json AssumptionReport::ToJson() const {
  nlohmann::json witness_list = nlohmann::json::array();
  for (const auto& w : witnesses) {
    nlohmann::json entry = {
        {"condition", w.condition}, {"point", w.point}, {"value", w.value}};
    if (w.condition == "dominance") entry["offset"] = w.offset;
    witness_list.push_back(entry);
  }
  return {{"concavity_ok", concavity_ok},
          {"substitutability_ok", substitutability_ok},
          {"dominance_ok", dominance_ok},
          {"concavity_violations", concavity_violations},
          {"substitutability_violations", substitutability_violations},
          {"dominance_violations", dominance_violations},
          {"witnesses", witness_list}};
}

AssumptionReport CheckAssumptions(const Csf& csf, const AuditOptions& options) {
  if (options.firms < 2) throw ValidationError("audit needs at least 2 firms");
  if (!(options.grid > 0.0 && options.grid <= 0.5)) {
    throw ValidationError("audit grid must lie in (0, 0.5]");
  }
  const int steps = static_cast<int>(std::lround(1.0 / options.grid));
  const int count = steps + 1;
  auto grid_value = [&](int k) { return std::min(1.0, k * options.grid); };
  const int m = options.firms;
  const double slack = options.slack;

  AssumptionReport report;
  std::vector<double> others(static_cast<size_t>(m - 1));
  for (int own_idx = 0; own_idx < count; ++own_idx) {
    const double own = grid_value(own_idx);
    ForEachMultiset(m - 1, count, [&](const std::vector<int>& idx) {
      for (int r = 0; r < m - 1; ++r) others[r] = grid_value(idx[r]);
      const CsfValue v = csf.Evaluate(own, others);
      auto point = [&] {
        std::vector<double> p{own};
        p.insert(p.end(), others.begin(), others.end());
        return p;
      };
      if (!(v.d2h_own < -slack)) {
        report.concavity_ok = false;
        AddWitness(&report, options, ++report.concavity_violations,
                   {"concavity", point(), v.d2h_own, 0.0});
      }
      for (int r = 0; r < m - 1; ++r) {
        // Opponents with equal budgets give identical cross terms.
        if (r > 0 && idx[r] == idx[r - 1]) continue;
        if (!(v.d2h_cross[r] < -slack)) {
          report.substitutability_ok = false;
          AddWitness(&report, options, ++report.substitutability_violations,
                     {"substitutability", point(), v.d2h_cross[r], 0.0});
        }
      }
    });
  }

  std::vector<double> offsets = options.offsets;
  if (offsets.empty()) {
    for (int k = 1; k <= steps; ++k) offsets.push_back(grid_value(k));
  }
  for (double offset : offsets) {
    if (!(offset > 0.0)) throw ValidationError("dominance offsets must be > 0");
    for (int t_idx = 0; t_idx < count; ++t_idx) {
      const double t = grid_value(t_idx);
      if (t > 1.0 - offset + 1e-12) break;
      // Own spending raised to t + offset, every rival at t.
      std::vector<double> rivals(static_cast<size_t>(m - 1), t);
      const double lhs = csf.Evaluate(t + offset, rivals).d2h_own;
      // One rival raised to t + offset, the rest at t.
      rivals[0] = t + offset;
      const double rhs = csf.Evaluate(t, rivals).d2h_cross[0];
      if (!(lhs < rhs - slack) || !(rhs < -slack)) {
        report.dominance_ok = false;
        std::vector<double> point{t + offset};
        point.insert(point.end(), static_cast<size_t>(m - 1), t);
        AddWitness(&report, options, ++report.dominance_violations,
                   {"dominance", std::move(point), lhs - rhs, offset});
      }
    }
  }
  return report;
}

}  // namespace netcontest
