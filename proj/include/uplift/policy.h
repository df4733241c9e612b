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

#ifndef UPLIFT_POLICY_H_
#define UPLIFT_POLICY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uplift/cate_models.h"
#include "uplift/dataset.h"
#include "uplift/outcome_models.h"
#include "uplift/synth.h"

namespace uplift {

enum class PolicyKind { kUniform, kOutcomeBased, kCateBased, kTable };

std::string_view PolicyKindName(PolicyKind kind);

// Deterministic map from covariates to an arm. Arms are indices into
// arm_labels(); datasets are matched to them by label.
class Policy {
 public:
  static Policy Uniform(std::vector<std::string> arm_labels, int arm,
                        std::string name = "");
  // argmax_w f(x, w); ties go to the lowest arm index.
  static Policy FromOutcomeModel(std::shared_ptr<const FittedOutcomeModel> model,
                                 std::string name = "");
  // The lowest arm j with tau_{j,j'}(x) >= 0 for every j' != j; the
  // fallback arm when no arm dominates.
  static Policy FromCates(std::shared_ptr<const PairwiseCates> cates,
                          int fallback, std::string name = "");
  // Explicit cell-signature -> arm map; other cells get `default_arm`.
  static Policy Table(std::shared_ptr<const Schema> schema,
                      std::vector<std::string> arm_labels,
                      std::map<std::string, int> arm_of_signature,
                      int default_arm, std::string name = "");
  // Table over the cells of `ds`, one arm per cell id.
  static Policy TableFromCells(const ExperimentDataset& ds,
                               std::span<const int> arm_of_cell,
                               int default_arm, std::string name = "");

  PolicyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& arm_labels() const { return arm_labels_; }
  int num_arms() const { return static_cast<int>(arm_labels_.size()); }
  int uniform_arm() const { return arm_; }
  int fallback_arm() const { return arm_; }

  // Arms for a flat table of covariate codes (num_cells x variables) in
  // `schema`, as indices into arm_labels().
  std::vector<int> AssignCodes(const Schema& schema,
                               std::span<const int> codes) const;
  int Assign(const Schema& schema, std::span<const int> codes) const;
  // Per cell / per unit of ds, as ds arm indices.
  std::vector<int> AssignCells(const ExperimentDataset& ds) const;
  std::vector<int> AssignUnits(const ExperimentDataset& ds) const;
  // Per DGP cell, as DGP arm indices.
  std::vector<int> AssignDgp(const SyntheticDgp& dgp) const;

  // Model-backed policies reference model files written next to the
  // policy document; `model_file` names that file.
  nlohmann::json ToJson(const std::string& model_file = "") const;
  static Policy FromJson(const nlohmann::json& j,
                         const std::filesystem::path& base_dir = {});
  static Policy Load(const std::filesystem::path& path);

 private:
  Policy() = default;
  std::vector<int> ToDatasetArms(const std::vector<std::string>& labels,
                                 const std::vector<int>& arms) const;

  PolicyKind kind_ = PolicyKind::kUniform;
  std::string name_;
  std::vector<std::string> arm_labels_;
  int arm_ = 0;  // uniform arm, CATE fallback, or table default
  std::shared_ptr<const FittedOutcomeModel> model_;
  std::shared_ptr<const PairwiseCates> cates_;
  std::shared_ptr<const Schema> schema_;
  std::map<std::string, int> table_;
};

// "var=category;..." in schema variable order; -1 codes print as "?".
std::string Signature(const Schema& schema, std::span<const int> codes);

// Lowest arm j with effects[j * W + j'] >= 0 for all j' != j, else -1.
// `effects` holds tau_{j,j'} for one covariate vector.
int DominantArm(std::span<const double> effects, int num_arms);

struct AllocationSummary {
  std::vector<std::string> arm_labels;
  std::vector<int64_t> counts;
  std::vector<double> fractions;
};

AllocationSummary Allocation(const Policy& policy, const ExperimentDataset& ds);

// cell signature -> arm label for every distinct cell of ds.
std::string PolicyTableCsv(const Policy& policy, const ExperimentDataset& ds);

double TruePolicyValue(const SyntheticDgp& dgp, const Policy& policy);

}  // namespace uplift

#endif  // UPLIFT_POLICY_H_
