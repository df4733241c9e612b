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

#ifndef UPLIFT_ESTIMATORS_H_
#define UPLIFT_ESTIMATORS_H_

#include <string_view>

#include "json.hpp"
#include "uplift/cate_models.h"
#include "uplift/dataset.h"
#include "uplift/outcome_models.h"

namespace uplift {

// Estimator names accepted in settings, searches and pipeline configs.
bool IsOutcomeEstimator(std::string_view name);
bool IsCateEstimator(std::string_view name);

// Parameter structs from a flat JSON setting. Unknown keys are rejected so
// typos surface as configuration errors. A complexity may be "inf".
Interactions InteractionsFromJson(const nlohmann::json& setting);
CartParams CartParamsFromJson(const nlohmann::json& setting);
ForestParams ForestParamsFromJson(const nlohmann::json& setting);
BoostParams BoostParamsFromJson(const nlohmann::json& setting);
CausalTreeParams CausalTreeParamsFromJson(const nlohmann::json& setting);
CausalForestParams CausalForestParamsFromJson(const nlohmann::json& setting);
CateParams CateParamsFromJson(std::string_view estimator,
                              const nlohmann::json& setting);

// Parses a setting for the named estimator without fitting; throws
// ConfigError on unknown keys or invalid values.
void CheckSetting(std::string_view estimator, const nlohmann::json& setting);

// Fits the named outcome estimator with one setting; `jobs` applies to
// forests.
FittedOutcomeModel FitOutcomeEstimator(std::string_view estimator,
                                       const ExperimentDataset& ds,
                                       std::string_view outcome,
                                       const nlohmann::json& setting,
                                       int jobs = 1);

PairwiseCateModel FitCateEstimator(std::string_view estimator,
                                   const ExperimentDataset& ds,
                                   std::string_view outcome, int treated,
                                   int control, const nlohmann::json& setting,
                                   int jobs = 1);

}  // namespace uplift

#endif  // UPLIFT_ESTIMATORS_H_
