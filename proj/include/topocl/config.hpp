// Copyright 2026 The topocl Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "topocl/augment.hpp"
#include "topocl/nn.hpp"
#include "topocl/wl.hpp"

namespace topocl {

// Full run configuration. One master seed feeds every random stream via
// labeled splits, so a config file pins a run completely.
struct TrainConfig {
  double alpha = 10.0;
  double beta = 1000.0;
  double tau = 0.5;
  double lambda = 1.0;
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 32;
  int layers = 3;
  int hidden_dim = 32;
  int embed_dim = 32;
  int subiso_inner_dim = 16;
  Pooling pooling = Pooling::kSum;
  AugmentSpec augment1{AugmentKind::kNodeDrop, 0.2};
  AugmentSpec augment2{AugmentKind::kNodeDrop, 0.2};
  WlSetPolicy wl_policy = WlSetPolicy::kFinalIteration;
  bool subiso_both_views = false;
  std::uint64_t seed = 1;
  std::string dataset_path;

  // WL refinement depth always tracks the encoder depth.
  int wl_iterations() const { return layers; }
};

inline void validate_config(const TrainConfig& c) {
  if (c.alpha < 0 || c.beta < 0) {
    throw ConfigError("alpha and beta must be non-negative");
  }
  if (c.tau <= 0) throw ConfigError("tau must be positive");
  if (c.lambda <= 0) throw ConfigError("lambda must be positive");
  if (c.learning_rate <= 0) throw ConfigError("learning_rate must be positive");
  if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (c.batch_size < 2) {
    throw ConfigError("batch_size must be >= 2 (the contrastive loss needs "
                      "a negative)");
  }
  if (c.layers < 1) throw ConfigError("layers must be >= 1");
  if (c.hidden_dim < 1 || c.embed_dim < 1 || c.subiso_inner_dim < 1) {
    throw ConfigError("model dimensions must be >= 1");
  }
  const auto check_ratio = [](const AugmentSpec& s, const char* which) {
    if (s.ratio < 0 || s.ratio >= 1) {
      throw ConfigError(std::string(which) + " ratio outside [0, 1)");
    }
    if (s.kind == AugmentKind::kSubgraph && s.ratio == 0) {
      throw ConfigError(std::string(which) + ": subgraph needs ratio > 0");
    }
  };
  check_ratio(c.augment1, "augment1");
  check_ratio(c.augment2, "augment2");
}

namespace detail {

inline nlohmann::json augment_to_json(const AugmentSpec& s) {
  return {{"kind", to_string(s.kind)}, {"ratio", s.ratio}};
}

inline AugmentSpec augment_from_json(const nlohmann::json& j) {
  AugmentSpec s;
  s.kind = augment_kind_from_string(j.at("kind").get<std::string>());
  s.ratio = j.at("ratio").get<double>();
  return s;
}

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace detail

inline constexpr int kConfigSchemaVersion = 1;

inline nlohmann::json config_to_json(const TrainConfig& c) {
  return {
      {"schema_version", kConfigSchemaVersion},
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"tau", c.tau},
      {"lambda", c.lambda},
      {"learning_rate", c.learning_rate},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"layers", c.layers},
      {"hidden_dim", c.hidden_dim},
      {"embed_dim", c.embed_dim},
      {"subiso_inner_dim", c.subiso_inner_dim},
      {"pooling", to_string(c.pooling)},
      {"augment1", detail::augment_to_json(c.augment1)},
      {"augment2", detail::augment_to_json(c.augment2)},
      {"wl_set_policy", c.wl_policy == WlSetPolicy::kFinalIteration
                            ? "final"
                            : "union"},
      {"subiso_both_views", c.subiso_both_views},
      {"seed", c.seed},
      {"dataset_path", c.dataset_path},
  };
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "schema_version", "alpha",        "beta",
      "tau",            "lambda",       "learning_rate",
      "epochs",         "batch_size",   "layers",
      "hidden_dim",     "embed_dim",    "subiso_inner_dim",
      "pooling",        "augment1",     "augment2",
      "wl_set_policy",  "subiso_both_views", "seed",
      "dataset_path",
  };
  detail::reject_unknown_keys(j, known, "config");
  if (!j.contains("schema_version")) {
    throw ConfigError("config is missing schema_version");
  }
  if (j.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " +
                      j.at("schema_version").dump());
  }
  TrainConfig c;
  const auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) {
      slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    }
  };
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("tau", c.tau);
  get("lambda", c.lambda);
  get("learning_rate", c.learning_rate);
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("layers", c.layers);
  get("hidden_dim", c.hidden_dim);
  get("embed_dim", c.embed_dim);
  get("subiso_inner_dim", c.subiso_inner_dim);
  if (j.contains("pooling")) {
    c.pooling = pooling_from_string(j.at("pooling").get<std::string>());
  }
  if (j.contains("augment1")) {
    detail::reject_unknown_keys(j.at("augment1"), {"kind", "ratio"},
                                "augment1");
    c.augment1 = detail::augment_from_json(j.at("augment1"));
  }
  if (j.contains("augment2")) {
    detail::reject_unknown_keys(j.at("augment2"), {"kind", "ratio"},
                                "augment2");
    c.augment2 = detail::augment_from_json(j.at("augment2"));
  }
  if (j.contains("wl_set_policy")) {
    const std::string policy = j.at("wl_set_policy").get<std::string>();
    if (policy == "final") {
      c.wl_policy = WlSetPolicy::kFinalIteration;
    } else if (policy == "union") {
      c.wl_policy = WlSetPolicy::kUnionAllIterations;
    } else {
      throw ConfigError("wl_set_policy must be 'final' or 'union'");
    }
  }
  get("subiso_both_views", c.subiso_both_views);
  get("seed", c.seed);
  get("dataset_path", c.dataset_path);
  validate_config(c);
  return c;
}

inline TrainConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline void save_config_file(const TrainConfig& c,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << config_to_json(c).dump(2) << "\n";
}

}  // namespace topocl
