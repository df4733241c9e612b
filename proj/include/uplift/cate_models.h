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

#ifndef UPLIFT_CATE_MODELS_H_
#define UPLIFT_CATE_MODELS_H_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.h"
#include "uplift/encoder.h"
#include "uplift/outcome_models.h"
#include "uplift/tree.h"

namespace uplift {

enum class CateModelKind { kCausalTree, kCausalForest };

std::string_view CateModelKindName(CateModelKind kind);
CateModelKind ParseCateModelKind(std::string_view name);

struct CausalTreeParams {
  // A split must raise sum_leaves n * tau^2 by more than complexity * N.
  double complexity = 0.0;
  // Minimum units of each arm per leaf.
  int min_arm_count = 100;
  int max_depth = std::numeric_limits<int>::max();
};

struct CausalForestParams {
  int num_trees = 200;
  double subsample = 0.5;
  // Candidate columns per split; 0 means all.
  int mtry = 0;
  int min_arm_count = 5;
  // Each child must hold at least this fraction of its parent's units.
  double max_imbalance = 0.05;
  int max_depth = std::numeric_limits<int>::max();
  uint64_t seed = 0;
  int jobs = 1;
  // Fit an out-of-fold propensity model instead of using known shares.
  bool estimate_propensity = false;
  int residual_folds = 5;
  ForestParams residual_forest{100, MaxFeatures::kAll, 10.0, 5.0,
                               std::numeric_limits<int>::max(), true, 0, 1};
};

// Sufficient statistics of a causal-tree node.
struct CausalStats {
  double nt = 0, st = 0, sst = 0;  // treated count, sum, sum of squares
  double nc = 0, sc = 0, ssc = 0;  // control

  bool Empty() const { return nt + nc <= 0; }
  double n() const { return nt + nc; }
  // Difference in arm means; 0 when an arm is absent.
  double Tau() const {
    return nt > 0 && nc > 0 ? st / nt - sc / nc : 0.0;
  }
  // s_t^2 / n_t + s_c^2 / n_c with unbiased sample variances.
  double TauVariance() const;
  CausalStats& operator+=(const CausalStats& o);
  friend CausalStats operator-(CausalStats a, const CausalStats& b);
};

// n_L tau_L^2 + n_R tau_R^2 - n_P tau_P^2.
double CausalTreeGain(const CausalStats& parent, const CausalStats& left,
                      const CausalStats& right);

// Residual statistics of a causal-forest node.
struct ResidualStats {
  double n = 0, nt = 0, nc = 0;
  double swy = 0;  // sum r_w r_y
  double sww = 0;  // sum r_w^2

  bool Empty() const { return n <= 0; }
  double Tau() const { return sww > 0 ? swy / sww : 0.0; }
  ResidualStats& operator+=(const ResidualStats& o);
  friend ResidualStats operator-(ResidualStats a, const ResidualStats& b);
};

// (n_L n_R / n_P^2) (tau_L - tau_R)^2 with exact child ratios.
double CausalForestGain(const ResidualStats& parent, const ResidualStats& left,
                        const ResidualStats& right);

// Training-time data a forest keeps for kernel-weight queries.
struct ForestTrainingData {
  FeatureRows cells{0};
  std::vector<int> unit_cell;
  std::vector<double> residual_y;
  std::vector<double> residual_w;
  std::vector<uint64_t> tree_seeds;  // subsample seed of each kept tree
  int64_t subsample_size = 0;
};

// Estimate of tau(x) = E[Y(treated) - Y(control) | X = x] for one arm pair.
class PairwiseCateModel {
 public:
  PairwiseCateModel() = default;

  bool fitted() const { return fitted_; }
  CateModelKind kind() const { return kind_; }
  int treated() const { return treated_; }
  int control() const { return control_; }
  const std::vector<std::string>& arm_labels() const {
    return encoder_.arm_labels();
  }
  const Encoder& encoder() const { return encoder_; }
  const nlohmann::json& hyperparameters() const { return hyperparameters_; }
  const std::vector<BinaryTree>& trees() const { return trees_; }

  // Codes are in this model's schema.
  double Estimate(std::span<const int> codes) const;
  std::vector<double> EstimateCells(const ExperimentDataset& ds) const;
  std::vector<double> EstimateUnits(const ExperimentDataset& ds) const;

  // Causal tree: per-node statistics of the training data.
  const std::vector<CausalStats>& node_stats() const { return tree_stats_; }

  // Causal forest: alpha_i(x) over the training units of the pair, in the
  // order of ds.RestrictToArms({treated, control}). Needs the in-memory
  // model; a model loaded from JSON cannot answer.
  std::vector<double> KernelWeights(std::span<const int> codes) const;
  const ForestTrainingData* training_data() const { return training_.get(); }

  nlohmann::json ToJson() const;
  static PairwiseCateModel FromJson(const nlohmann::json& j);

 private:
  friend PairwiseCateModel FitCausalTree(const ExperimentDataset&,
                                         std::string_view, int, int,
                                         const CausalTreeParams&);
  friend PairwiseCateModel FitCausalForest(const ExperimentDataset&,
                                           std::string_view, int, int,
                                           const CausalForestParams&);

  void RequireFitted() const;
  double EstimateActive(std::span<const int> active) const;

  bool fitted_ = false;
  CateModelKind kind_ = CateModelKind::kCausalTree;
  int treated_ = 0;
  int control_ = 1;
  Encoder encoder_;
  nlohmann::json hyperparameters_;
  std::vector<BinaryTree> trees_;
  std::vector<CausalStats> tree_stats_;
  // Forest: per tree, per node.
  std::vector<std::vector<ResidualStats>> forest_stats_;
  std::shared_ptr<const ForestTrainingData> training_;
};

PairwiseCateModel FitCausalTree(const ExperimentDataset& ds,
                                std::string_view outcome, int treated,
                                int control, const CausalTreeParams& params);
PairwiseCateModel FitCausalForest(const ExperimentDataset& ds,
                                  std::string_view outcome, int treated,
                                  int control, const CausalForestParams& params);

struct CateParams {
  CateModelKind kind = CateModelKind::kCausalTree;
  CausalTreeParams tree;
  CausalForestParams forest;
};

PairwiseCateModel FitCate(const ExperimentDataset& ds, std::string_view outcome,
                          int treated, int control, const CateParams& params);

// Models for every unordered arm pair (j, j') with j < j', each estimating
// tau_{j,j'}.
class PairwiseCates {
 public:
  PairwiseCates() = default;
  explicit PairwiseCates(int num_arms) : num_arms_(num_arms) {}

  int num_arms() const { return num_arms_; }
  size_t size() const { return models_.size(); }
  void Add(PairwiseCateModel model);
  bool Has(int a, int b) const;
  const PairwiseCateModel& Get(int a, int b) const;
  const std::map<std::pair<int, int>, PairwiseCateModel>& models() const {
    return models_;
  }

  // Per cell of ds, tau_{a,b}(x) for every ordered pair: entry
  // [(cell * W + a) * W + b]; antisymmetric with zero diagonal.
  std::vector<double> CellEffects(const ExperimentDataset& ds) const;

  nlohmann::json ToJson() const;
  static PairwiseCates FromJson(const nlohmann::json& j);

 private:
  int num_arms_ = 0;
  std::map<std::pair<int, int>, PairwiseCateModel> models_;
};

// W(W-1)/2 models; an error in one pair is rethrown naming the pair.
PairwiseCates FitAllPairs(const ExperimentDataset& ds, std::string_view outcome,
                          const CateParams& params);

// tau_hat(x_i) per unit and pair, sorted ascending within each pair.
struct CateCdfRow {
  std::string pair;
  int64_t unit = 0;
  double tau = 0.0;
  double cdf = 0.0;  // rank / N
};
std::vector<CateCdfRow> CateCdfExport(const PairwiseCates& cates,
                                      const ExperimentDataset& ds);
std::string CateCdfCsv(const std::vector<CateCdfRow>& rows);

// Held-out criteria used for tuning (higher score is better).
//
// Causal tree: sum over leaves of n_v (2 tau tau_v - tau^2) - n_v (V + V_v),
// with tau the training leaf effect, tau_v the validation difference in
// means, and V, V_v the variance estimates of the two leaf differences.
// Leaves lacking an arm in the validation data are skipped.
double CausalTreeValidationScore(const PairwiseCateModel& model,
                                 const ExperimentDataset& validation,
                                 std::string_view outcome);
// Transformed-outcome score sum_i (2 tau(x_i) z_i - tau(x_i)^2), with
// z_i = Y_i (T_i - e) / (e (1 - e)) and e the treated share of the pair.
double TransformedOutcomeScore(const PairwiseCateModel& model,
                               const ExperimentDataset& validation,
                               std::string_view outcome);

}  // namespace uplift

#endif  // UPLIFT_CATE_MODELS_H_
