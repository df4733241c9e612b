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

#ifndef UPLIFT_ENCODER_H_
#define UPLIFT_ENCODER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "uplift/dataset.h"

namespace uplift {

enum class Interactions {
  kNone,
  // Covariate dummies times arm dummies for arms 1..W-1 (arm 0 is baseline).
  kNonBaseline,
  // Covariate dummies times every arm dummy.
  kAllArms,
};

struct ColumnDescriptor {
  enum class Kind { kCovariate, kArm, kInteraction };
  Kind kind = Kind::kCovariate;
  int variable = -1;
  int category = -1;
  int arm = -1;
  std::string name;
};

// Column layout: covariate dummies (schema order), then arm dummies, then
// interactions grouped by arm. A category the schema has never seen
// encodes to an all-zero block for its variable.
class Encoder {
 public:
  Encoder() = default;
  Encoder(std::shared_ptr<const Schema> schema, std::vector<std::string> arms,
          Interactions interactions);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  const std::vector<std::string>& arm_labels() const { return arms_; }
  int num_arms() const { return static_cast<int>(arms_.size()); }
  Interactions interactions() const { return interactions_; }

  int num_covariate_columns() const { return num_covariate_columns_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  const std::vector<ColumnDescriptor>& columns() const { return columns_; }

  // Codes are in this encoder's schema (-1 = unseen). Output is sorted.
  void CovariateColumns(std::span<const int> codes,
                        std::vector<int>* active) const;
  void ActiveColumns(std::span<const int> codes, int arm,
                     std::vector<int>* active) const;

  nlohmann::json ToJson() const;
  static Encoder FromJson(const nlohmann::json& j);

 private:
  void Layout();

  std::shared_ptr<const Schema> schema_;
  std::vector<std::string> arms_;
  Interactions interactions_ = Interactions::kNone;
  std::vector<int> variable_offset_;
  int num_covariate_columns_ = 0;
  std::vector<ColumnDescriptor> columns_;
};

// Dense 0/1 design matrix.
struct EncodedMatrix {
  std::vector<ColumnDescriptor> columns;
  int64_t rows = 0;
  int num_covariate_columns = 0;
  int num_arm_columns = 0;
  int num_interaction_columns = 0;
  std::vector<uint8_t> values;  // row-major

  uint8_t at(int64_t r, int c) const {
    return values[r * static_cast<int64_t>(columns.size()) + c];
  }
  Eigen::MatrixXd ToDense() const;
};

EncodedMatrix Encode(const ExperimentDataset& ds, Interactions interactions);

// Per-cell covariate codes of `ds` expressed in `target` schema.
std::vector<int> TranslateCells(const ExperimentDataset& ds,
                                const Schema& target);

}  // namespace uplift

#endif  // UPLIFT_ENCODER_H_
