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

#ifndef UPLIFT_OUTCOME_MODELS_H_
#define UPLIFT_OUTCOME_MODELS_H_

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "uplift/dataset.h"
#include "uplift/encoder.h"
#include "uplift/tree.h"
#include "uplift/tuning.h"

namespace uplift {

enum class OutcomeModelKind { kOls, kLasso, kCart, kRandomForest, kBoostedTrees };

std::string_view OutcomeModelKindName(OutcomeModelKind kind);
OutcomeModelKind ParseOutcomeModelKind(std::string_view name);

struct CartParams {
  // A split must cut SSE by more than complexity * SSE(root).
  double complexity = 0.0;
  double min_leaf = 1.0;
  int max_depth = std::numeric_limits<int>::max();
};

enum class MaxFeatures { kAll, kSqrt };

struct ForestParams {
  int num_trees = 100;
  MaxFeatures max_features = MaxFeatures::kAll;
  // Nodes lighter than this are not split.
  double min_split = 2.0;
  double min_leaf = 1.0;
  int max_depth = std::numeric_limits<int>::max();
  bool bootstrap = true;
  uint64_t seed = 0;
  int jobs = 1;
};

struct BoostParams {
  double learning_rate = 0.3;
  int max_depth = 6;
  // Soft threshold applied to each leaf's mean residual before shrinkage.
  double l1 = 0.0;
  int rounds = 100;
  double min_leaf = 1.0;
};

// Distinct design rows of a dataset with outcome sufficient statistics.
struct OutcomeDesign {
  Encoder encoder;
  FeatureRows rows;
  std::vector<int> unit_row;   // design row of each unit
  std::vector<double> weight;  // units per design row
  std::vector<double> ysum;
  std::vector<double> yysum;
};

OutcomeDesign BuildOutcomeDesign(const ExperimentDataset& ds,
                                 std::string_view outcome,
                                 Interactions interactions);

// f(x, w) = E[Y | X = x, W = w] from one of five learners.
class FittedOutcomeModel {
 public:
  FittedOutcomeModel() = default;

  bool fitted() const { return fitted_; }
  OutcomeModelKind kind() const { return kind_; }
  const Encoder& encoder() const { return encoder_; }
  int num_arms() const { return encoder_.num_arms(); }
  double training_mse() const { return training_mse_; }
  const nlohmann::json& hyperparameters() const { return hyperparameters_; }

  // Codes are in this model's schema; -1 marks an unseen category.
  double Predict(std::span<const int> codes, int arm) const;
  double Predict(const std::map<std::string, std::string>& covariates,
                 int arm) const;
  // num_cells x num_arms, row-major over the cells of `ds`.
  std::vector<double> PredictCells(const ExperimentDataset& ds) const;
  // One prediction per unit at its observed arm.
  std::vector<double> PredictUnits(const ExperimentDataset& ds) const;

  double intercept() const { return intercept_; }
  const Eigen::VectorXd& coefficients() const { return coef_; }
  const std::vector<BinaryTree>& trees() const { return trees_; }
  double base_score() const { return base_score_; }

  nlohmann::json ToJson() const;
  static FittedOutcomeModel FromJson(const nlohmann::json& j);

  static FittedOutcomeModel Linear(OutcomeModelKind kind, Encoder encoder,
                                   double intercept, Eigen::VectorXd coef,
                                   nlohmann::json hyperparameters,
                                   double training_mse);
  static FittedOutcomeModel Trees(OutcomeModelKind kind, Encoder encoder,
                                  double base_score,
                                  std::vector<BinaryTree> trees,
                                  nlohmann::json hyperparameters,
                                  double training_mse);

 private:

  double PredictActive(std::span<const int> active) const;
  void RequireFitted() const;

  bool fitted_ = false;
  OutcomeModelKind kind_ = OutcomeModelKind::kOls;
  Encoder encoder_;
  nlohmann::json hyperparameters_;
  double training_mse_ = 0.0;
  double intercept_ = 0.0;
  Eigen::VectorXd coef_;
  std::vector<BinaryTree> trees_;
  double base_score_ = 0.0;
};

FittedOutcomeModel FitOls(const ExperimentDataset& ds, std::string_view outcome,
                          Interactions interactions = Interactions::kNonBaseline);
FittedOutcomeModel FitLasso(const ExperimentDataset& ds,
                            std::string_view outcome, double lambda,
                            Interactions interactions = Interactions::kNonBaseline);
FittedOutcomeModel FitCart(const ExperimentDataset& ds, std::string_view outcome,
                           const CartParams& params);
FittedOutcomeModel FitRandomForest(const ExperimentDataset& ds,
                                   std::string_view outcome,
                                   const ForestParams& params);
// `round_mse`, when given, receives the training MSE after each round.
FittedOutcomeModel FitBoosted(const ExperimentDataset& ds,
                              std::string_view outcome, const BoostParams& params,
                              std::vector<double>* round_mse = nullptr);

// (1/N) sum (f(x_i, w_i) - y_i)^2.
double Mse(const FittedOutcomeModel& model, const ExperimentDataset& ds,
           std::string_view outcome);

// Low-level learners on grouped rows.
BinaryTree FitRegressionTree(const FeatureRows& rows,
                             std::span<const RegressionStats> stats,
                             const RegressionCriterion& criterion,
                             const GrowOptions& options);
// Grows forest members; member b draws its bootstrap from seed stream b, so
// the result does not depend on `params.jobs`.
std::vector<BinaryTree> FitForestTrees(const FeatureRows& rows,
                                       std::span<const int> unit_row,
                                       std::span<const double> y,
                                       const ForestParams& params);
int ForestMtry(MaxFeatures max_features, int num_columns);

// Five-fold CV over a lambda path (default: 98 log-spaced values spanning
// [1e-5 lambda_max, lambda_max]). Picks the lowest mean validation MSE.
CvReport TuneLasso(const ExperimentDataset& ds, std::string_view outcome,
                   std::vector<double> lambdas = {}, int folds = 5,
                   uint64_t seed = 0,
                   Interactions interactions = Interactions::kNonBaseline);

}  // namespace uplift

#endif  // UPLIFT_OUTCOME_MODELS_H_
