/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uplift/estimators.h"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include "uplift/error.h"

namespace uplift {
namespace {

void AllowKeys(const nlohmann::json& s, std::string_view estimator,
               std::initializer_list<std::string_view> keys) {
  if (!s.is_object()) {
    throw ConfigError(std::string(estimator) + " setting must be an object");
  }
  for (const auto& [key, value] : s.items()) {
    bool ok = false;
    for (auto k : keys) ok = ok || k == key;
    if (!ok) {
      throw ConfigError("unknown " + std::string(estimator) + " parameter '" +
                        key + "'");
    }
  }
}

double Number(const nlohmann::json& s, const char* key, double fallback) {
  if (!s.contains(key)) return fallback;
  const auto& v = s.at(key);
  if (v.is_string()) {
    const std::string t = v.get<std::string>();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string("parameter '") + key + "' must be a number");
  }
  if (!v.is_number()) {
    throw ConfigError(std::string("parameter '") + key + "' must be a number");
  }
  return v.get<double>();
}

int Integer(const nlohmann::json& s, const char* key, int fallback) {
  const double v = Number(s, key, fallback);
  if (v != std::floor(v) ||
      std::abs(v) > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string("parameter '") + key +
                      "' must be an integer");
  }
  return static_cast<int>(v);
}

int Depth(const nlohmann::json& s, int fallback) {
  if (s.contains("max_depth") && s.at("max_depth").is_null()) {
    return std::numeric_limits<int>::max();
  }
  return Integer(s, "max_depth", fallback);
}

bool Flag(const nlohmann::json& s, const char* key, bool fallback) {
  if (!s.contains(key)) return fallback;
  if (!s.at(key).is_boolean()) {
    throw ConfigError(std::string("parameter '") + key + "' must be boolean");
  }
  return s.at(key).get<bool>();
}

uint64_t Seed(const nlohmann::json& s, uint64_t fallback) {
  if (!s.contains("seed")) return fallback;
  if (!s.at("seed").is_number_integer()) {
    throw ConfigError("parameter 'seed' must be an integer");
  }
  return s.at("seed").get<uint64_t>();
}

MaxFeatures Features(const nlohmann::json& s) {
  if (!s.contains("max_features")) return MaxFeatures::kAll;
  const std::string v = s.at("max_features").get<std::string>();
  if (v == "all") return MaxFeatures::kAll;
  if (v == "sqrt") return MaxFeatures::kSqrt;
  throw ConfigError("max_features must be 'all' or 'sqrt'");
}

}  // namespace

bool IsOutcomeEstimator(std::string_view name) {
  return name == "ols" || name == "lasso" || name == "cart" ||
         name == "random_forest" || name == "boosted_trees";
}

bool IsCateEstimator(std::string_view name) {
  return name == "causal_tree" || name == "causal_forest";
}

Interactions InteractionsFromJson(const nlohmann::json& s) {
  if (!s.contains("interactions")) return Interactions::kNonBaseline;
  const std::string v = s.at("interactions").get<std::string>();
  if (v == "none") return Interactions::kNone;
  if (v == "non_baseline") return Interactions::kNonBaseline;
  if (v == "all_arms") return Interactions::kAllArms;
  throw ConfigError("interactions must be none, non_baseline or all_arms");
}

CartParams CartParamsFromJson(const nlohmann::json& s) {
  AllowKeys(s, "cart", {"complexity", "min_leaf", "max_depth"});
  CartParams p;
  p.complexity = Number(s, "complexity", p.complexity);
  p.min_leaf = Number(s, "min_leaf", p.min_leaf);
  p.max_depth = Depth(s, p.max_depth);
  return p;
}

ForestParams ForestParamsFromJson(const nlohmann::json& s) {
  AllowKeys(s, "random_forest",
            {"num_trees", "max_features", "min_split", "min_leaf", "max_depth",
             "bootstrap", "seed"});
  ForestParams p;
  p.num_trees = Integer(s, "num_trees", p.num_trees);
  p.max_features = Features(s);
  p.min_split = Number(s, "min_split", p.min_split);
  p.min_leaf = Number(s, "min_leaf", p.min_leaf);
  p.max_depth = Depth(s, p.max_depth);
  p.bootstrap = Flag(s, "bootstrap", p.bootstrap);
  p.seed = Seed(s, p.seed);
  return p;
}

BoostParams BoostParamsFromJson(const nlohmann::json& s) {
  AllowKeys(s, "boosted_trees",
            {"learning_rate", "max_depth", "l1", "rounds", "min_leaf"});
  BoostParams p;
  p.learning_rate = Number(s, "learning_rate", p.learning_rate);
  p.max_depth = Integer(s, "max_depth", p.max_depth);
  p.l1 = Number(s, "l1", p.l1);
  p.rounds = Integer(s, "rounds", p.rounds);
  p.min_leaf = Number(s, "min_leaf", p.min_leaf);
  return p;
}

CausalTreeParams CausalTreeParamsFromJson(const nlohmann::json& s) {
  AllowKeys(s, "causal_tree", {"complexity", "min_arm_count", "max_depth"});
  CausalTreeParams p;
  p.complexity = Number(s, "complexity", p.complexity);
  p.min_arm_count = Integer(s, "min_arm_count", p.min_arm_count);
  p.max_depth = Depth(s, p.max_depth);
  return p;
}

CausalForestParams CausalForestParamsFromJson(const nlohmann::json& s) {
  AllowKeys(s, "causal_forest",
            {"num_trees", "subsample", "mtry", "min_arm_count", "max_imbalance",
             "max_depth", "seed", "estimate_propensity", "residual_folds",
             "residual_trees"});
  CausalForestParams p;
  p.num_trees = Integer(s, "num_trees", p.num_trees);
  p.subsample = Number(s, "subsample", p.subsample);
  p.mtry = Integer(s, "mtry", p.mtry);
  p.min_arm_count = Integer(s, "min_arm_count", p.min_arm_count);
  p.max_imbalance = Number(s, "max_imbalance", p.max_imbalance);
  p.max_depth = Depth(s, p.max_depth);
  p.seed = Seed(s, p.seed);
  p.estimate_propensity =
      Flag(s, "estimate_propensity", p.estimate_propensity);
  p.residual_folds = Integer(s, "residual_folds", p.residual_folds);
  p.residual_forest.num_trees =
      Integer(s, "residual_trees", p.residual_forest.num_trees);
  return p;
}

CateParams CateParamsFromJson(std::string_view estimator,
                              const nlohmann::json& setting) {
  CateParams p;
  p.kind = ParseCateModelKind(estimator);
  if (p.kind == CateModelKind::kCausalTree) {
    p.tree = CausalTreeParamsFromJson(setting);
  } else {
    p.forest = CausalForestParamsFromJson(setting);
  }
  return p;
}

void CheckSetting(std::string_view estimator, const nlohmann::json& setting) {
  if (estimator == "ols") {
    AllowKeys(setting, "ols", {"interactions"});
    InteractionsFromJson(setting);
  } else if (estimator == "lasso") {
    AllowKeys(setting, "lasso", {"interactions", "lambda"});
    InteractionsFromJson(setting);
    if (setting.contains("lambda") && !(Number(setting, "lambda", 0.0) >= 0.0)) {
      throw ConfigError("lasso penalty must be >= 0");
    }
  } else if (estimator == "cart") {
    CartParamsFromJson(setting);
  } else if (estimator == "random_forest") {
    ForestParamsFromJson(setting);
  } else if (estimator == "boosted_trees") {
    BoostParamsFromJson(setting);
  } else {
    CateParamsFromJson(estimator, setting);
  }
}

FittedOutcomeModel FitOutcomeEstimator(std::string_view estimator,
                                       const ExperimentDataset& ds,
                                       std::string_view outcome,
                                       const nlohmann::json& setting,
                                       int jobs) {
  if (estimator == "ols") {
    AllowKeys(setting, "ols", {"interactions"});
    return FitOls(ds, outcome, InteractionsFromJson(setting));
  }
  if (estimator == "lasso") {
    AllowKeys(setting, "lasso", {"interactions", "lambda"});
    if (!setting.contains("lambda")) {
      throw ConfigError("lasso setting needs 'lambda'");
    }
    return FitLasso(ds, outcome, Number(setting, "lambda", 0.0),
                    InteractionsFromJson(setting));
  }
  if (estimator == "cart") return FitCart(ds, outcome, CartParamsFromJson(setting));
  if (estimator == "random_forest") {
    ForestParams p = ForestParamsFromJson(setting);
    p.jobs = jobs;
    return FitRandomForest(ds, outcome, p);
  }
  if (estimator == "boosted_trees") {
    return FitBoosted(ds, outcome, BoostParamsFromJson(setting));
  }
  throw ConfigError("unknown outcome estimator '" + std::string(estimator) +
                    "'");
}

PairwiseCateModel FitCateEstimator(std::string_view estimator,
                                   const ExperimentDataset& ds,
                                   std::string_view outcome, int treated,
                                   int control, const nlohmann::json& setting,
                                   int jobs) {
  CateParams p = CateParamsFromJson(estimator, setting);
  p.forest.jobs = jobs;
  return FitCate(ds, outcome, treated, control, p);
}

}  // namespace uplift
