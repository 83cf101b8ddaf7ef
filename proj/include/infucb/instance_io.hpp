// Copyright 2026 The infucb Authors.
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

#ifndef INFUCB_INSTANCE_IO_HPP
#define INFUCB_INSTANCE_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "infucb/instance.hpp"
#include "json.hpp"

// Instance files are JSON documents (schema in docs/file_formats.md):
//
//   {"format": "infucb-instance", "version": 1, "label": "...",
//    "mu0": 0.0, "epsilon": 0.5,
//    "arms": [{"kind": "gaussian", "mean": 0.5, "variance": 1.0},
//             {"kind": "bernoulli", "p": 0.3}]}
//
// "mu0" and "epsilon" are optional. Doubles are written in shortest
// round-trip form, so write/read is lossless.

namespace infucb {

inline constexpr const char* kInstanceFormat = "infucb-instance";
inline constexpr int kInstanceVersion = 1;

inline nlohmann::json instance_to_json(const BanditInstance& inst) {
  nlohmann::json j;
  j["format"] = kInstanceFormat;
  j["version"] = kInstanceVersion;
  j["label"] = inst.label;
  if (inst.threshold_mu0) {
    j["mu0"] = *inst.threshold_mu0;
  }
  if (inst.epsilon) {
    j["epsilon"] = *inst.epsilon;
  }
  auto arms = nlohmann::json::array();
  for (const auto& a : inst.arms) {
    if (const auto* g = std::get_if<Gaussian>(&a)) {
      arms.push_back({{"kind", "gaussian"}, {"mean", g->mean}, {"variance", g->variance}});
    } else {
      arms.push_back({{"kind", "bernoulli"}, {"p", std::get<Bernoulli>(a).p}});
    }
  }
  j["arms"] = std::move(arms);
  return j;
}

inline BanditInstance instance_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != kInstanceFormat) {
    throw std::runtime_error("instance file: missing or wrong \"format\" field");
  }
  if (j.value("version", 0) != kInstanceVersion) {
    throw std::runtime_error("instance file: unsupported version");
  }
  BanditInstance inst;
  inst.label = j.value("label", std::string{});
  if (j.contains("mu0") && !j["mu0"].is_null()) {
    inst.threshold_mu0 = j["mu0"].get<double>();
  }
  if (j.contains("epsilon") && !j["epsilon"].is_null()) {
    inst.epsilon = j["epsilon"].get<double>();
  }
  for (const auto& a : j.at("arms")) {
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "gaussian") {
      inst.arms.emplace_back(Gaussian{a.at("mean").get<double>(), a.value("variance", 1.0)});
    } else if (kind == "bernoulli") {
      inst.arms.emplace_back(Bernoulli{a.at("p").get<double>()});
    } else {
      throw std::runtime_error("instance file: unknown arm kind '" + kind + "'");
    }
  }
  inst.validate();
  return inst;
}

inline void write_instance(const BanditInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << instance_to_json(inst).dump(1) << '\n';
  if (!out) {
    throw std::runtime_error("failed writing '" + path + "'");
  }
}

inline BanditInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open instance file '" + path + "'");
  }
  try {
    return instance_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("instance file '" + path + "': " + e.what());
  }
}

}  // namespace infucb

#endif  // INFUCB_INSTANCE_IO_HPP
