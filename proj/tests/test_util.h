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

#ifndef UPLIFT_TESTS_TEST_UTIL_H_
#define UPLIFT_TESTS_TEST_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

#include "uplift/dataset.h"
#include "uplift/synth.h"

namespace uplift::testing {

// Dataset from CSV text with columns arm, y and every other column a
// covariate.
inline ExperimentDataset FromText(std::string_view csv,
                                  std::vector<std::string> arm_order = {}) {
  CsvRoles roles;
  roles.arm_column = "arm";
  roles.outcome_columns = {"y"};
  roles.arm_order = std::move(arm_order);
  return DatasetFromCsvText(csv, roles);
}

// Bernoulli DGP on one variable "g" with the given per-cell arm means.
inline SyntheticDgp TableDgp(const std::vector<std::vector<double>>& means,
                             std::vector<double> propensities) {
  SyntheticDgp dgp;
  dgp.variables = {"g"};
  dgp.domains.emplace_back();
  const int w = static_cast<int>(propensities.size());
  for (int a = 0; a < w; ++a) dgp.arms.push_back("a" + std::to_string(a));
  dgp.propensities = std::move(propensities);
  for (size_t c = 0; c < means.size(); ++c) {
    const std::string label = "c" + std::to_string(c);
    dgp.domains[0].push_back(label);
    dgp.cells.push_back({{label}, 1.0 / static_cast<double>(means.size()),
                         means[c], {}});
  }
  return dgp;
}

}  // namespace uplift::testing

#endif  // UPLIFT_TESTS_TEST_UTIL_H_
