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

#ifndef UPLIFT_TUNING_H_
#define UPLIFT_TUNING_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.h"

namespace uplift {

// Unit-to-fold map built from contiguous blocks of a seeded permutation.
struct FoldAssignment {
  int folds = 0;
  uint64_t seed = 0;       // seed that produced the accepted permutation
  int redraws = 0;
  std::vector<int> fold_of;

  std::vector<int64_t> TrainRows(int k) const;
  std::vector<int64_t> ValidationRows(int k) const;
};

// With `require_arms`, a permutation whose validation folds miss an arm
// present in ds is redrawn with seed + 1, seed + 2, ... up to five times
// before giving up.
FoldAssignment MakeFolds(const ExperimentDataset& ds, int folds, uint64_t seed,
                         bool require_arms = true);

// Loss of a model fitted on `train` and scored on `validation`.
using FoldLoss = std::function<double(const ExperimentDataset& train,
                                      const ExperimentDataset& validation)>;

struct CvResult {
  std::vector<double> fold_loss;
  double mean_loss = 0.0;
};

CvResult CrossValidate(const FoldLoss& loss, const ExperimentDataset& ds,
                       const FoldAssignment& folds, int jobs = 1);
CvResult CrossValidate(const FoldLoss& loss, const ExperimentDataset& ds,
                       int folds, uint64_t seed, int jobs = 1);

// Cross-validation summary over a list of candidate settings. Lower loss is
// better; ties go to the earliest candidate.
struct CvReport {
  std::string estimator;
  std::vector<nlohmann::json> grid;
  std::vector<std::vector<double>> fold_loss;  // candidate x fold
  std::vector<double> mean_loss;
  size_t chosen = 0;
  int folds = 5;
  uint64_t seed = 0;

  const nlohmann::json& chosen_setting() const { return grid.at(chosen); }
  // Index of the first candidate with the smallest mean loss.
  static size_t ArgMin(const std::vector<double>& mean_loss);
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

using SearchResult = CvReport;

// One tunable parameter: explicit values, or an inclusive numeric range
// {"min", "max", "step"} expanded into values.
struct ParamRange {
  std::string name;
  std::vector<nlohmann::json> values;
};

struct SearchSpec {
  std::string estimator;
  std::vector<ParamRange> grid;
  // Settings shared by every candidate (e.g. number of boosting rounds).
  nlohmann::json fixed = nlohmann::json::object();
  int budget = 20;
  int folds = 5;
  uint64_t seed = 0;
  int jobs = 1;

  // Throws ConfigError describing the first violation.
  void Validate() const;
  // Cartesian product over parameters in name order; the last name varies
  // fastest, so the result does not depend on declaration order.
  std::vector<nlohmann::json> Candidates() const;
  // All candidates when they fit the budget, else `budget` of them chosen
  // uniformly at random by seed, kept in grid order.
  std::vector<nlohmann::json> SelectCandidates() const;

  static SearchSpec FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// Estimators known to the search: ols, lasso, cart, random_forest,
// boosted_trees, causal_tree, causal_forest.
SearchSpec DefaultSearchSpec(std::string_view estimator);

// What the candidates are scored on. CATE estimators need a treated and a
// control arm; outcome estimators ignore them.
struct SearchTarget {
  std::string outcome;
  int treated = -1;
  int control = -1;
};

// Outcome estimators are scored by validation MSE, CATE estimators by the
// negated held-out effect criterion. A candidate rejected with a
// configuration error (for instance a minimum leaf count larger than an arm)
// scores +inf; the search fails only if every candidate does.
SearchResult Search(const SearchSpec& spec, const ExperimentDataset& ds,
                    const SearchTarget& target);

}  // namespace uplift

#endif  // UPLIFT_TUNING_H_
