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

#include "uplift/encoder.h"

#include <algorithm>

#include "uplift/error.h"

namespace uplift {

Encoder::Encoder(std::shared_ptr<const Schema> schema,
                 std::vector<std::string> arms, Interactions interactions)
    : schema_(std::move(schema)),
      arms_(std::move(arms)),
      interactions_(interactions) {
  Layout();
}

void Encoder::Layout() {
  columns_.clear();
  variable_offset_.clear();
  const Schema& s = *schema_;
  for (int v = 0; v < s.num_variables(); ++v) {
    variable_offset_.push_back(static_cast<int>(columns_.size()));
    for (int c = 0; c < static_cast<int>(s.categories[v].size()); ++c) {
      columns_.push_back({ColumnDescriptor::Kind::kCovariate, v, c, -1,
                          s.variables[v] + "=" + s.categories[v][c]});
    }
  }
  num_covariate_columns_ = static_cast<int>(columns_.size());
  for (int w = 0; w < num_arms(); ++w) {
    columns_.push_back(
        {ColumnDescriptor::Kind::kArm, -1, -1, w, "arm=" + arms_[w]});
  }
  if (interactions_ == Interactions::kNone) return;
  const int first = interactions_ == Interactions::kNonBaseline ? 1 : 0;
  for (int w = first; w < num_arms(); ++w) {
    for (int j = 0; j < num_covariate_columns_; ++j) {
      const auto& base = columns_[j];
      columns_.push_back({ColumnDescriptor::Kind::kInteraction, base.variable,
                          base.category, w, base.name + ":arm=" + arms_[w]});
    }
  }
}

void Encoder::CovariateColumns(std::span<const int> codes,
                               std::vector<int>* active) const {
  active->clear();
  for (size_t v = 0; v < codes.size(); ++v) {
    if (codes[v] >= 0) active->push_back(variable_offset_[v] + codes[v]);
  }
}

void Encoder::ActiveColumns(std::span<const int> codes, int arm,
                            std::vector<int>* active) const {
  CovariateColumns(codes, active);
  const size_t n_cov = active->size();
  active->push_back(num_covariate_columns_ + arm);
  if (interactions_ == Interactions::kNone) return;
  const int first = interactions_ == Interactions::kNonBaseline ? 1 : 0;
  if (arm < first) return;
  const int block = num_covariate_columns_ + num_arms() +
                    (arm - first) * num_covariate_columns_;
  for (size_t k = 0; k < n_cov; ++k) active->push_back(block + (*active)[k]);
}

nlohmann::json Encoder::ToJson() const {
  nlohmann::json j;
  j["variables"] = schema_->variables;
  j["categories"] = schema_->categories;
  j["arms"] = arms_;
  j["interactions"] = interactions_ == Interactions::kNone ? "none"
                      : interactions_ == Interactions::kNonBaseline
                          ? "non_baseline"
                          : "all_arms";
  return j;
}

Encoder Encoder::FromJson(const nlohmann::json& j) {
  auto schema = std::make_shared<Schema>();
  schema->variables = j.at("variables").get<std::vector<std::string>>();
  schema->categories =
      j.at("categories").get<std::vector<std::vector<std::string>>>();
  if (schema->categories.size() != schema->variables.size()) {
    throw ParseError("encoder: variables/categories length mismatch");
  }
  const std::string mode = j.at("interactions").get<std::string>();
  Interactions inter = Interactions::kNone;
  if (mode == "non_baseline") {
    inter = Interactions::kNonBaseline;
  } else if (mode == "all_arms") {
    inter = Interactions::kAllArms;
  } else if (mode != "none") {
    throw ParseError("encoder: unknown interaction mode '" + mode + "'");
  }
  return Encoder(std::move(schema), j.at("arms").get<std::vector<std::string>>(),
                 inter);
}

Eigen::MatrixXd EncodedMatrix::ToDense() const {
  Eigen::MatrixXd x(rows, columns.size());
  for (int64_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) x(r, c) = at(r, c);
  }
  return x;
}

EncodedMatrix Encode(const ExperimentDataset& ds, Interactions interactions) {
  if (ds.empty()) throw DataError("cannot encode an empty dataset");
  Encoder enc(ds.schema_ptr(), ds.arm_labels(), interactions);
  EncodedMatrix m;
  m.columns = enc.columns();
  m.rows = static_cast<int64_t>(ds.size());
  m.num_covariate_columns = enc.num_covariate_columns();
  m.num_arm_columns = ds.num_arms();
  m.num_interaction_columns =
      enc.num_columns() - m.num_covariate_columns - m.num_arm_columns;
  m.values.assign(static_cast<size_t>(m.rows) * m.columns.size(), 0);
  std::vector<int> active;
  for (int64_t i = 0; i < m.rows; ++i) {
    enc.ActiveColumns(ds.codes(i), ds.arm(i), &active);
    for (int c : active) m.values[i * m.columns.size() + c] = 1;
  }
  return m;
}

std::vector<int> TranslateCells(const ExperimentDataset& ds,
                                const Schema& target) {
  const int nv = target.num_variables();
  std::vector<int> out(static_cast<size_t>(ds.num_cells()) * nv);
  CodeTranslator tr(ds.schema(), target);
  for (int c = 0; c < ds.num_cells(); ++c) {
    tr.Translate(ds.cell_codes(c),
                 std::span<int>(out).subspan(static_cast<size_t>(c) * nv, nv));
  }
  return out;
}

}  // namespace uplift
