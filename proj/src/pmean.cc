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

#include "netcontest/pmean.h"

#include <cmath>
#include <sstream>

#include "netcontest/errors.h"

namespace netcontest {

WelfareSpec WelfareSpec::FromJson(const nlohmann::json& doc) {
  const nlohmann::json& value =
      doc.is_object() && doc.contains("p") ? doc["p"] : doc;
  WelfareSpec spec;
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    if (text == "-inf") return Egalitarian();
    throw ValidationError("welfare p must be a number or \"-inf\", got '" +
                          text + "'");
  }
  if (!value.is_number()) throw ValidationError("welfare p must be numeric");
  spec.p = value.get<double>();
  if (!(spec.p <= 1.0)) throw ValidationError("welfare p must be <= 1");
  return spec;
}

nlohmann::json WelfareSpec::ToJson() const {
  if (IsEgalitarian()) return {{"p", "-inf"}};
  return {{"p", p}};
}

std::string WelfareSpec::Name() const {
  if (IsEgalitarian()) return "egalitarian";
  if (p == 1.0) return "utilitarian";
  if (p == kNash) return "nash";
  std::ostringstream out;
  out << "p=" << p;
  return out.str();
}

WelfareResult PMean(const Eigen::VectorXd& utilities, const WelfareSpec& spec) {
  WelfareResult out;
  out.utilities = utilities;
  const double m = static_cast<double>(utilities.size());
  if (utilities.size() == 0) return out;
  if (spec.p == 1.0) {
    out.value = utilities.mean();
    out.defined = true;
    return out;
  }
  if ((utilities.array() <= 0.0).any()) return out;
  out.defined = true;
  if (spec.IsEgalitarian()) {
    out.value = utilities.minCoeff();
  } else if (spec.p == WelfareSpec::kNash) {
    out.value = std::exp(utilities.array().log().sum() / m);
  } else {
    // Factor out the utility that keeps every (u / pivot)^p <= 1: the largest
    // for p > 0, the smallest for p < 0. Otherwise large |p| overflows.
    const double pivot =
        spec.p > 0.0 ? utilities.maxCoeff() : utilities.minCoeff();
    const double mean = (utilities.array() / pivot).pow(spec.p).sum() / m;
    out.value = pivot * std::pow(mean, 1.0 / spec.p);
  }
  return out;
}

Eigen::VectorXd PMeanGradient(const Eigen::VectorXd& utilities,
                              const WelfareSpec& spec, double value) {
  const auto m = utilities.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
  if (spec.p == 1.0) {
    grad.setConstant(1.0 / static_cast<double>(m));
  } else if (spec.IsEgalitarian()) {
    Eigen::Index arg = 0;
    utilities.minCoeff(&arg);
    grad[arg] = 1.0;
  } else if (spec.p == WelfareSpec::kNash) {
    grad = value / static_cast<double>(m) * utilities.cwiseInverse();
  } else {
    // (1/m) u_r^{p-1} W^{1-p}, written as a ratio to stay in range.
    grad = ((utilities.array() / value).pow(spec.p - 1.0) /
            static_cast<double>(m))
               .matrix();
  }
  return grad;
}

}  // namespace netcontest
