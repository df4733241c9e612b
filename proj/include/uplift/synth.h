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

#ifndef UPLIFT_SYNTH_H_
#define UPLIFT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.h"

namespace uplift {

enum class OutcomeFamily { kBernoulli, kGaussian };

struct SyntheticCell {
  std::vector<std::string> labels;  // one per variable, in declaration order
  double mass = 0.0;
  std::vector<double> mean;  // per arm; success probability when Bernoulli
  std::vector<double> sd;    // per arm; Gaussian only
};

// Second outcome that is zero unless the primary Bernoulli outcome is 1, in
// which case it is max(0, mean[arm] + sd * N(0, 1)).
struct ConditionalOutcome {
  std::string name;
  std::vector<double> mean;
  double sd = 0.0;
};

// Randomized experiment with a known response table. Arms are assigned
// independently of the cell, so assignment is unconfounded by construction.
struct SyntheticDgp {
  std::vector<std::string> variables;
  std::vector<std::vector<std::string>> domains;
  std::vector<std::string> arms;
  std::vector<double> propensities;
  OutcomeFamily family = OutcomeFamily::kBernoulli;
  std::string outcome_name = "y";
  std::vector<SyntheticCell> cells;
  std::optional<ConditionalOutcome> conditional;
  uint64_t seed = 0;

  int num_arms() const { return static_cast<int>(arms.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }

  // Throws ConfigError on the first violated invariant.
  void Validate() const;

  // Sorted schema of the declared domains, and each cell's codes in it
  // (num_cells x num_variables in schema variable order).
  std::shared_ptr<const Schema> MakeSchema() const;
  std::vector<int> CellCodes(const Schema& schema) const;

  nlohmann::json ToJson() const;
  static SyntheticDgp FromJson(const nlohmann::json& j);
  static SyntheticDgp Load(const std::filesystem::path& path);
};

// Units per independently seeded shard of a draw.
inline constexpr int64_t kDrawShardSize = 65536;

// n i.i.d. units: cell by mass, arm by propensity, outcome from the response
// table. Shard s uses seed stream s, so the result is the same for every
// `jobs`. Known propensities are attached to the dataset.
ExperimentDataset Draw(const SyntheticDgp& dgp, int64_t n, uint64_t seed,
                       int jobs = 1);
inline ExperimentDataset Draw(const SyntheticDgp& dgp, int64_t n) {
  return Draw(dgp, n, dgp.seed);
}

// Exact value sum_c mass(c) * mean(c, arm_of_cell[c]).
double TruePolicyValue(const SyntheticDgp& dgp,
                       std::span<const int> arm_of_cell);

struct OracleAnswers {
  std::vector<int> optimal_arm;  // per cell
  double optimal_value = 0.0;
};

// Per-cell argmax of the response, ties toward the lower arm index.
OracleAnswers EnumerateOptimal(const SyntheticDgp& dgp);

struct RandomDgpOptions {
  int num_cells = 8;
  int num_arms = 3;
  // Best arm beats every other arm by at least this much in each cell.
  double min_gap = 0.05;
  std::vector<double> propensities;  // empty = equal shares
  double base_low = 0.1;
  double base_high = 0.6;
};

// Bernoulli DGP on a single variable "segment" whose categories are the
// cells. The best arm of each cell is drawn uniformly.
SyntheticDgp RandomDgp(const RandomDgpOptions& options, uint64_t seed);

}  // namespace uplift

#endif  // UPLIFT_SYNTH_H_
