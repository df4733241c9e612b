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

#include "uplift/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "uplift/csv.h"
#include "uplift/error.h"
#include "uplift/rng.h"

namespace uplift {

int Schema::VariableIndex(std::string_view name) const {
  auto it = std::lower_bound(variables.begin(), variables.end(), name);
  if (it == variables.end() || *it != name) return -1;
  return static_cast<int>(it - variables.begin());
}

int Schema::CategoryIndex(int variable, std::string_view label) const {
  const auto& cats = categories[variable];
  auto it = std::lower_bound(cats.begin(), cats.end(), label);
  if (it == cats.end() || *it != label) return -1;
  return static_cast<int>(it - cats.begin());
}

CodeTranslator::CodeTranslator(const Schema& from, const Schema& to) {
  identity_ = (from == to);
  if (identity_) return;
  source_variable_.resize(to.variables.size(), -1);
  code_map_.resize(to.variables.size());
  for (int v = 0; v < to.num_variables(); ++v) {
    const int src = from.VariableIndex(to.variables[v]);
    source_variable_[v] = src;
    if (src < 0) continue;
    const auto& src_cats = from.categories[src];
    code_map_[v].resize(src_cats.size());
    for (size_t c = 0; c < src_cats.size(); ++c) {
      code_map_[v][c] = to.CategoryIndex(v, src_cats[c]);
    }
  }
}

void CodeTranslator::Translate(std::span<const int> from_codes,
                               std::span<int> to_codes) const {
  if (identity_) {
    std::copy(from_codes.begin(), from_codes.end(), to_codes.begin());
    return;
  }
  for (size_t v = 0; v < source_variable_.size(); ++v) {
    const int src = source_variable_[v];
    const int code = src < 0 ? -1 : from_codes[src];
    to_codes[v] = code < 0 ? -1 : code_map_[v][code];
  }
}

std::vector<TreatmentArm> ExperimentDataset::arms() const {
  std::vector<TreatmentArm> out;
  for (int w = 0; w < num_arms(); ++w) out.push_back({w, arm_labels_[w]});
  return out;
}

int ExperimentDataset::ArmIndex(std::string_view label) const {
  for (int w = 0; w < num_arms(); ++w) {
    if (arm_labels_[w] == label) return w;
  }
  return -1;
}

int ExperimentDataset::num_cells() const {
  if (!cells_ || cells_->num_variables == 0) return cells_ ? 1 : 0;
  return static_cast<int>(cells_->codes.size() / cells_->num_variables);
}

std::span<const int> ExperimentDataset::cell_codes(int c) const {
  const int v = cells_->num_variables;
  return std::span<const int>(cells_->codes).subspan(
      static_cast<size_t>(c) * v, v);
}

std::string ExperimentDataset::CellSignature(int c) const {
  std::string out;
  auto codes = cell_codes(c);
  for (int v = 0; v < num_variables(); ++v) {
    if (v > 0) out.push_back(';');
    out += schema_->variables[v];
    out.push_back('=');
    out += codes[v] < 0 ? std::string(kUnknownCategory)
                        : schema_->categories[v][codes[v]];
  }
  return out;
}

bool ExperimentDataset::has_outcome(std::string_view name) const {
  return std::find(outcome_names_.begin(), outcome_names_.end(), name) !=
         outcome_names_.end();
}

std::span<const double> ExperimentDataset::outcome(
    std::string_view name) const {
  for (size_t k = 0; k < outcome_names_.size(); ++k) {
    if (outcome_names_[k] == name) return outcomes_[k];
  }
  throw SchemaError("unknown outcome '" + std::string(name) + "'");
}

std::vector<int64_t> ExperimentDataset::ArmCounts() const {
  std::vector<int64_t> counts(num_arms(), 0);
  for (int w : arm_) ++counts[w];
  return counts;
}

std::vector<double> ExperimentDataset::propensities() const {
  if (known_propensities_) return *known_propensities_;
  return EmpiricalPropensities(*this);
}

ExperimentDataset ExperimentDataset::Subset(
    std::span<const int64_t> rows) const {
  ExperimentDataset out;
  out.schema_ = schema_;
  out.cells_ = cells_;
  out.arm_labels_ = arm_labels_;
  out.outcome_names_ = outcome_names_;
  out.known_propensities_ = known_propensities_;
  out.cell_.reserve(rows.size());
  out.arm_.reserve(rows.size());
  out.outcomes_.assign(outcomes_.size(), {});
  for (auto& o : out.outcomes_) o.reserve(rows.size());
  for (int64_t r : rows) {
    out.cell_.push_back(cell_[r]);
    out.arm_.push_back(arm_[r]);
    for (size_t k = 0; k < outcomes_.size(); ++k) {
      out.outcomes_[k].push_back(outcomes_[k][r]);
    }
  }
  return out;
}

ExperimentDataset ExperimentDataset::RestrictToArms(
    std::span<const int> arms) const {
  std::vector<int64_t> rows;
  for (size_t i = 0; i < size(); ++i) {
    if (std::find(arms.begin(), arms.end(), arm_[i]) != arms.end()) {
      rows.push_back(static_cast<int64_t>(i));
    }
  }
  return Subset(rows);
}

ExperimentDataset ExperimentDataset::WithOutcome(
    const std::string& name, std::vector<double> values) const {
  if (values.size() != size()) {
    throw DataError("outcome '" + name + "' has wrong length");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("outcome '" + name + "' not finite");
  }
  ExperimentDataset out = *this;
  for (size_t k = 0; k < outcome_names_.size(); ++k) {
    if (outcome_names_[k] == name) {
      out.outcomes_[k] = std::move(values);
      return out;
    }
  }
  out.outcome_names_.push_back(name);
  out.outcomes_.push_back(std::move(values));
  return out;
}

ExperimentDataset ExperimentDataset::FromColumns(
    std::shared_ptr<const Schema> schema, std::shared_ptr<const CellTable> cells,
    std::vector<std::string> arm_labels, std::vector<int> cell,
    std::vector<int> arm, std::vector<std::string> outcome_names,
    std::vector<std::vector<double>> outcomes,
    std::optional<std::vector<double>> known_propensities) {
  ExperimentDataset ds;
  ds.schema_ = std::move(schema);
  ds.cells_ = std::move(cells);
  ds.arm_labels_ = std::move(arm_labels);
  ds.cell_ = std::move(cell);
  ds.arm_ = std::move(arm);
  ds.outcome_names_ = std::move(outcome_names);
  ds.outcomes_ = std::move(outcomes);
  ds.known_propensities_ = std::move(known_propensities);
  ds.Validate();
  return ds;
}

void ExperimentDataset::Validate() const {
  if (!schema_ || !cells_) throw DataError("dataset without schema");
  if (cells_->num_variables != schema_->num_variables()) {
    throw DataError("cell table does not match schema");
  }
  if (arm_labels_.empty()) throw DataError("dataset declares no arms");
  {
    auto sorted = arm_labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DataError("arm labels must be unique");
    }
  }
  if (cell_.size() != arm_.size()) throw DataError("column length mismatch");
  const int nc = num_cells();
  for (size_t i = 0; i < arm_.size(); ++i) {
    if (arm_[i] < 0 || arm_[i] >= num_arms()) {
      throw DataError("unit " + std::to_string(i) + " has invalid arm index");
    }
    if (cell_[i] < 0 || cell_[i] >= nc) {
      throw DataError("unit " + std::to_string(i) + " has invalid cell");
    }
  }
  if (outcomes_.size() != outcome_names_.size()) {
    throw DataError("outcome name/column mismatch");
  }
  for (size_t k = 0; k < outcomes_.size(); ++k) {
    if (outcomes_[k].size() != arm_.size()) {
      throw DataError("outcome '" + outcome_names_[k] + "' has wrong length");
    }
    for (double v : outcomes_[k]) {
      if (!std::isfinite(v)) {
        throw DataError("outcome '" + outcome_names_[k] + "' is not finite");
      }
    }
  }
  if (known_propensities_) {
    const auto& e = *known_propensities_;
    if (static_cast<int>(e.size()) != num_arms()) {
      throw DataError("propensity vector length differs from arm count");
    }
    double sum = 0.0;
    for (double p : e) {
      if (!(p > 0.0) || p > 1.0) {
        throw DataError("propensities must lie in (0, 1] (positivity)");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DataError("propensities must sum to 1");
    }
  }
}

DatasetBuilder::DatasetBuilder(std::vector<std::string> variables,
                               std::vector<std::string> outcome_names)
    : variables_(std::move(variables)),
      outcome_names_(std::move(outcome_names)),
      category_lookup_(variables_.size()),
      category_labels_(variables_.size()),
      outcomes_(outcome_names_.size()) {
  auto sorted = variables_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw SchemaError("duplicate covariate name");
  }
}

void DatasetBuilder::DeclareArms(std::vector<std::string> labels) {
  arms_declared_ = true;
  arm_labels_ = std::move(labels);
  arm_lookup_.clear();
  for (size_t w = 0; w < arm_labels_.size(); ++w) {
    if (!arm_lookup_.emplace(arm_labels_[w], static_cast<int>(w)).second) {
      throw SchemaError("duplicate arm label '" + arm_labels_[w] + "'");
    }
  }
}

void DatasetBuilder::DeclareCategories(std::string_view variable,
                                       const std::vector<std::string>& labels) {
  auto it = std::find(variables_.begin(), variables_.end(), variable);
  if (it == variables_.end()) {
    throw SchemaError("unknown covariate '" + std::string(variable) + "'");
  }
  const size_t v = it - variables_.begin();
  for (const auto& label : labels) {
    const std::string key = label.empty() ? std::string(kUnknownCategory) : label;
    if (category_lookup_[v].emplace(key, category_labels_[v].size()).second) {
      category_labels_[v].push_back(key);
    }
  }
}

void DatasetBuilder::SetPropensities(std::vector<double> propensities) {
  propensities_ = std::move(propensities);
}

void DatasetBuilder::SetPropensitiesByLabel(
    std::map<std::string, double> propensities) {
  propensity_labels_ = std::move(propensities);
}

void DatasetBuilder::AddUnit(std::span<const std::string> covariates,
                             std::string_view arm,
                             std::span<const double> outcomes) {
  if (covariates.size() != variables_.size() ||
      outcomes.size() != outcome_names_.size()) {
    throw SchemaError("unit record does not match the declared columns");
  }
  const size_t row = arm_.size();
  for (size_t v = 0; v < covariates.size(); ++v) {
    const std::string key =
        covariates[v].empty() ? std::string(kUnknownCategory) : covariates[v];
    auto [it, inserted] =
        category_lookup_[v].emplace(key, category_labels_[v].size());
    if (inserted) category_labels_[v].push_back(key);
    raw_codes_.push_back(it->second);
  }
  auto it = arm_lookup_.find(std::string(arm));
  if (it == arm_lookup_.end()) {
    if (arms_declared_) {
      throw DataError("row " + std::to_string(row + 1) + ": arm label '" +
                      std::string(arm) + "' is not in the declared arm list");
    }
    it = arm_lookup_.emplace(std::string(arm), arm_labels_.size()).first;
    arm_labels_.emplace_back(arm);
  }
  arm_.push_back(it->second);
  for (size_t k = 0; k < outcomes.size(); ++k) {
    if (!std::isfinite(outcomes[k])) {
      throw ParseError("row " + std::to_string(row + 1) + ": outcome '" +
                       outcome_names_[k] + "' is not finite");
    }
    outcomes_[k].push_back(outcomes[k]);
  }
}

ExperimentDataset DatasetBuilder::Build() && {
  const size_t nv = variables_.size();
  // Sorted variable order and per-variable sorted category order.
  std::vector<size_t> var_order(nv);
  std::iota(var_order.begin(), var_order.end(), 0);
  std::sort(var_order.begin(), var_order.end(),
            [&](size_t a, size_t b) { return variables_[a] < variables_[b]; });
  auto schema = std::make_shared<Schema>();
  std::vector<std::vector<int>> recode(nv);
  for (size_t v : var_order) {
    schema->variables.push_back(variables_[v]);
    auto labels = category_labels_[v];
    std::sort(labels.begin(), labels.end());
    recode[v].resize(category_labels_[v].size());
    for (size_t c = 0; c < category_labels_[v].size(); ++c) {
      recode[v][c] = static_cast<int>(
          std::lower_bound(labels.begin(), labels.end(),
                           category_labels_[v][c]) -
          labels.begin());
    }
    schema->categories.push_back(std::move(labels));
  }

  auto cells = std::make_shared<ExperimentDataset::CellTable>();
  cells->num_variables = static_cast<int>(nv);
  std::vector<int> cell(arm_.size());
  std::unordered_map<std::string, int> cell_lookup;
  std::vector<int> codes(nv);
  for (size_t i = 0; i < arm_.size(); ++i) {
    for (size_t k = 0; k < nv; ++k) {
      const size_t v = var_order[k];
      codes[k] = recode[v][raw_codes_[i * nv + v]];
    }
    std::string key(reinterpret_cast<const char*>(codes.data()),
                    codes.size() * sizeof(int));
    auto [it, inserted] = cell_lookup.emplace(
        std::move(key), static_cast<int>(cell_lookup.size()));
    if (inserted) cells->codes.insert(cells->codes.end(), codes.begin(), codes.end());
    cell[i] = it->second;
  }
  if (!propensity_labels_.empty()) {
    std::vector<double> e(arm_labels_.size(), 0.0);
    for (const auto& [label, p] : propensity_labels_) {
      auto it = arm_lookup_.find(label);
      if (it == arm_lookup_.end()) {
        throw DataError("propensity given for unknown arm '" + label + "'");
      }
      e[it->second] = p;
    }
    propensities_ = std::move(e);
  }
  return ExperimentDataset::FromColumns(
      std::move(schema), std::move(cells), std::move(arm_labels_),
      std::move(cell), std::move(arm_), std::move(outcome_names_),
      std::move(outcomes_), std::move(propensities_));
}

CsvRoles ParseCsvRoles(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid schema JSON: ") + e.what());
  }
  CsvRoles roles;
  try {
    roles.arm_column = j.at("arm").get<std::string>();
    const auto& outcomes = j.at("outcomes");
    if (outcomes.is_string()) {
      roles.outcome_columns.push_back(outcomes.get<std::string>());
    } else {
      roles.outcome_columns = outcomes.get<std::vector<std::string>>();
    }
    if (j.contains("covariates")) {
      roles.covariate_columns = j["covariates"].get<std::vector<std::string>>();
    }
    if (j.contains("arm_order")) {
      roles.arm_order = j["arm_order"].get<std::vector<std::string>>();
    }
    if (j.contains("propensities")) {
      roles.propensities = j["propensities"].get<std::map<std::string, double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid schema JSON: ") + e.what());
  }
  return roles;
}

CsvRoles LoadCsvRoles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsvRoles(buffer.str());
}

namespace {

ExperimentDataset DatasetFromTable(const CsvTable& table,
                                   const CsvRoles& roles) {
  if (roles.arm_column.empty()) throw SchemaError("schema names no arm column");
  if (roles.outcome_columns.empty()) {
    throw SchemaError("schema names no outcome column");
  }
  auto require = [&](const std::string& name) {
    const int idx = table.ColumnIndex(name);
    if (idx < 0) throw SchemaError("missing column '" + name + "'");
    return idx;
  };
  const int arm_idx = require(roles.arm_column);
  std::vector<int> outcome_idx;
  for (const auto& name : roles.outcome_columns) {
    outcome_idx.push_back(require(name));
  }
  std::vector<std::string> covariates = roles.covariate_columns;
  if (covariates.empty()) {
    for (const auto& name : table.header) {
      if (name == roles.arm_column) continue;
      if (std::find(roles.outcome_columns.begin(), roles.outcome_columns.end(),
                    name) != roles.outcome_columns.end()) {
        continue;
      }
      covariates.push_back(name);
    }
  }
  if (covariates.empty()) throw SchemaError("schema names no covariate column");
  std::vector<int> covariate_idx;
  for (const auto& name : covariates) covariate_idx.push_back(require(name));

  DatasetBuilder builder(covariates, roles.outcome_columns);
  if (!roles.arm_order.empty()) builder.DeclareArms(roles.arm_order);
  std::vector<std::string> cov(covariates.size());
  std::vector<double> out(outcome_idx.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (size_t k = 0; k < covariate_idx.size(); ++k) {
      cov[k] = row[covariate_idx[k]];
    }
    for (size_t k = 0; k < outcome_idx.size(); ++k) {
      auto v = ParseFiniteDouble(row[outcome_idx[k]]);
      if (!v) {
        throw ParseError("row " + std::to_string(r + 1) + ": outcome '" +
                         roles.outcome_columns[k] + "' value '" +
                         row[outcome_idx[k]] + "' is not a finite number");
      }
      out[k] = *v;
    }
    builder.AddUnit(cov, row[arm_idx], out);
  }
  if (!roles.propensities.empty()) {
    builder.SetPropensitiesByLabel(roles.propensities);
  }
  return std::move(builder).Build();
}

}  // namespace

ExperimentDataset LoadCsv(const std::filesystem::path& path,
                          const CsvRoles& roles) {
  return DatasetFromTable(ReadCsv(path), roles);
}

ExperimentDataset DatasetFromCsvText(std::string_view text,
                                     const CsvRoles& roles) {
  return DatasetFromTable(ParseCsv(text), roles);
}

std::string DatasetToCsvText(const ExperimentDataset& ds) {
  std::string out;
  std::vector<std::string> header = ds.schema().variables;
  header.push_back("arm");
  for (const auto& name : ds.outcome_names()) header.push_back(name);
  out += FormatCsvRow(header);
  out.push_back('\n');
  std::vector<std::span<const double>> outcomes;
  for (const auto& name : ds.outcome_names()) {
    outcomes.push_back(ds.outcome(name));
  }
  std::vector<std::string> row;
  for (size_t i = 0; i < ds.size(); ++i) {
    row.clear();
    auto codes = ds.codes(i);
    for (int v = 0; v < ds.num_variables(); ++v) {
      row.push_back(ds.schema().categories[v][codes[v]]);
    }
    row.push_back(ds.arm_labels()[ds.arm(i)]);
    for (const auto& col : outcomes) row.push_back(FormatDouble(col[i]));
    out += FormatCsvRow(row);
    out.push_back('\n');
  }
  return out;
}

void WriteDatasetCsv(const std::filesystem::path& path,
                     const ExperimentDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << DatasetToCsvText(ds);
}

SplitPair Split(const ExperimentDataset& ds, double train_fraction,
                uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split fraction out of (0,1)");
  }
  const size_t n = ds.size();
  std::vector<int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<int64_t>(perm));
  const size_t n_train = static_cast<size_t>(
      std::floor(static_cast<double>(n) * train_fraction + 0.5));
  std::vector<int64_t> train(perm.begin(), perm.begin() + n_train);
  std::vector<int64_t> test(perm.begin() + n_train, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  SplitPair out;
  out.train = ds.Subset(train);
  out.test = ds.Subset(test);
  out.train_fraction = train_fraction;
  out.seed = seed;
  out.train_arm_counts = out.train.ArmCounts();
  out.test_arm_counts = out.test.ArmCounts();
  return out;
}

std::vector<double> EmpiricalPropensities(const ExperimentDataset& ds) {
  if (ds.empty()) throw DataError("empirical propensities of an empty dataset");
  auto counts = ds.ArmCounts();
  std::vector<double> e(counts.size());
  for (size_t w = 0; w < counts.size(); ++w) {
    if (counts[w] == 0) {
      throw DataError("arm '" + ds.arm_labels()[w] +
                      "' has no units (positivity violated)");
    }
    e[w] = static_cast<double>(counts[w]) / static_cast<double>(ds.size());
  }
  return e;
}

}  // namespace uplift
