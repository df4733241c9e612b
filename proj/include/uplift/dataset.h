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

#ifndef UPLIFT_DATASET_H_
#define UPLIFT_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uplift {

// Label used for missing self-reported covariates.
inline constexpr std::string_view kUnknownCategory = "unknown";

// Categorical covariate dictionary. Variables and the categories of each
// variable are sorted lexicographically, which fixes encoded column order.
struct Schema {
  std::vector<std::string> variables;
  std::vector<std::vector<std::string>> categories;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int VariableIndex(std::string_view name) const;
  int CategoryIndex(int variable, std::string_view label) const;
  bool operator==(const Schema&) const = default;
};

// Maps category codes of one schema onto another by label. Variables or
// categories missing from the target become -1.
class CodeTranslator {
 public:
  CodeTranslator(const Schema& from, const Schema& to);

  bool identity() const { return identity_; }
  void Translate(std::span<const int> from_codes, std::span<int> to_codes) const;

 private:
  bool identity_ = true;
  std::vector<int> source_variable_;           // per target variable
  std::vector<std::vector<int>> code_map_;     // per target variable
};

struct TreatmentArm {
  int index = 0;
  std::string label;
};

// Immutable table of experimental units. Covariates are stored per distinct
// covariate vector ("cell"); each unit references its cell.
class ExperimentDataset {
 public:
  ExperimentDataset() = default;

  size_t size() const { return arm_.size(); }
  bool empty() const { return arm_.empty(); }
  int num_arms() const { return static_cast<int>(arm_labels_.size()); }
  int num_variables() const { return schema_ ? schema_->num_variables() : 0; }

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }

  const std::vector<std::string>& arm_labels() const { return arm_labels_; }
  std::vector<TreatmentArm> arms() const;
  int ArmIndex(std::string_view label) const;  // -1 when absent

  int arm(size_t i) const { return arm_[i]; }
  std::span<const int> arm_column() const { return arm_; }

  int cell(size_t i) const { return cell_[i]; }
  std::span<const int> cell_column() const { return cell_; }
  int num_cells() const;
  std::span<const int> cell_codes(int c) const;
  std::span<const int> codes(size_t i) const { return cell_codes(cell_[i]); }
  // "var=category;var=category" in schema variable order.
  std::string CellSignature(int c) const;

  const std::vector<std::string>& outcome_names() const {
    return outcome_names_;
  }
  bool has_outcome(std::string_view name) const;
  std::span<const double> outcome(std::string_view name) const;

  const std::optional<std::vector<double>>& known_propensities() const {
    return known_propensities_;
  }
  // Known propensities if declared, otherwise empirical arm shares.
  std::vector<double> propensities() const;
  std::vector<int64_t> ArmCounts() const;

  ExperimentDataset Subset(std::span<const int64_t> rows) const;
  // Rows whose arm is in `arms`; arm indices are preserved.
  ExperimentDataset RestrictToArms(std::span<const int> arms) const;
  ExperimentDataset WithOutcome(const std::string& name,
                                std::vector<double> values) const;

  struct CellTable {
    int num_variables = 0;
    std::vector<int> codes;  // num_cells x num_variables
  };

  // Low-level factory; validates every invariant.
  static ExperimentDataset FromColumns(
      std::shared_ptr<const Schema> schema,
      std::shared_ptr<const CellTable> cells,
      std::vector<std::string> arm_labels, std::vector<int> cell,
      std::vector<int> arm, std::vector<std::string> outcome_names,
      std::vector<std::vector<double>> outcomes,
      std::optional<std::vector<double>> known_propensities);

 private:
  void Validate() const;

  std::shared_ptr<const Schema> schema_;
  std::shared_ptr<const CellTable> cells_;
  std::vector<std::string> arm_labels_;
  std::vector<int> cell_;
  std::vector<int> arm_;
  std::vector<std::string> outcome_names_;
  std::vector<std::vector<double>> outcomes_;
  std::optional<std::vector<double>> known_propensities_;
};

// Accumulates labelled units and produces an ExperimentDataset.
class DatasetBuilder {
 public:
  DatasetBuilder(std::vector<std::string> variables,
                 std::vector<std::string> outcome_names);

  // Fixes arm order; units with other arm labels are rejected.
  void DeclareArms(std::vector<std::string> labels);
  void DeclareCategories(std::string_view variable,
                         const std::vector<std::string>& labels);
  void SetPropensities(std::vector<double> propensities);
  void SetPropensitiesByLabel(std::map<std::string, double> propensities);

  // Empty covariate labels are recorded as "unknown".
  void AddUnit(std::span<const std::string> covariates, std::string_view arm,
               std::span<const double> outcomes);

  ExperimentDataset Build() &&;

 private:
  std::vector<std::string> variables_;
  std::vector<std::string> outcome_names_;
  bool arms_declared_ = false;
  std::vector<std::string> arm_labels_;
  std::unordered_map<std::string, int> arm_lookup_;
  std::vector<std::unordered_map<std::string, int>> category_lookup_;
  std::vector<std::vector<std::string>> category_labels_;
  std::vector<int> raw_codes_;
  std::vector<int> arm_;
  std::vector<std::vector<double>> outcomes_;
  std::optional<std::vector<double>> propensities_;
  std::map<std::string, double> propensity_labels_;
};

// Column roles for CSV ingestion.
struct CsvRoles {
  std::string arm_column;
  std::vector<std::string> outcome_columns;
  // Empty means every column that is neither arm nor outcome.
  std::vector<std::string> covariate_columns;
  std::vector<std::string> arm_order;
  std::map<std::string, double> propensities;
};

CsvRoles ParseCsvRoles(std::string_view json_text);
CsvRoles LoadCsvRoles(const std::filesystem::path& path);

ExperimentDataset LoadCsv(const std::filesystem::path& path,
                          const CsvRoles& roles);
ExperimentDataset DatasetFromCsvText(std::string_view text,
                                     const CsvRoles& roles);
void WriteDatasetCsv(const std::filesystem::path& path,
                     const ExperimentDataset& ds);
std::string DatasetToCsvText(const ExperimentDataset& ds);

struct SplitPair {
  ExperimentDataset train;
  ExperimentDataset test;
  double train_fraction = 0.7;
  uint64_t seed = 0;
  std::vector<int64_t> train_arm_counts;
  std::vector<int64_t> test_arm_counts;
};

// Seeded uniform permutation; train size is floor(N * f + 0.5).
SplitPair Split(const ExperimentDataset& ds, double train_fraction,
                uint64_t seed);

// count(arm = w) / N; throws on an empty arm.
std::vector<double> EmpiricalPropensities(const ExperimentDataset& ds);

}  // namespace uplift

#endif  // UPLIFT_DATASET_H_
