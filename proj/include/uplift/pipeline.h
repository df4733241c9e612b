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

#ifndef UPLIFT_PIPELINE_H_
#define UPLIFT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.h"
#include "uplift/policy.h"
#include "uplift/synth.h"
#include "uplift/tuning.h"

namespace uplift {

inline constexpr std::string_view kVersion = "1.0.0";

// End-to-end run description, usually read from a JSON file. Relative paths
// resolve against the directory of that file.
struct PipelineConfig {
  // Exactly one data source: a CSV with column roles, or a synthetic DGP.
  std::filesystem::path csv;
  std::optional<CsvRoles> roles;
  std::optional<SyntheticDgp> dgp;
  int64_t draw_size = 0;

  double train_fraction = 0.7;
  std::string outcome;
  std::vector<std::string> long_run_outcomes;
  // Optional E[y|W] = Pr(s=1|W) E[y|W,s=1] check on the test split.
  std::optional<std::pair<std::string, std::string>> decomposition;

  std::string baseline_arm;
  std::string fallback_arm;  // defaults to the baseline arm
  bool uniform_policies = true;
  std::vector<SearchSpec> estimators;
  std::vector<std::string> segment_variables;  // empty = all

  int bootstrap_replicates = 1000;
  int jobs = 1;
  std::filesystem::path output_dir = "out";

  // Master seed; a stage seed left unset is derived from it.
  uint64_t seed = 0;
  std::optional<uint64_t> draw_seed;
  std::optional<uint64_t> split_seed;
  std::optional<uint64_t> bootstrap_seed;

  uint64_t DrawSeed() const;
  uint64_t SplitSeed() const;
  uint64_t BootstrapSeed() const;
  // Seed of the hyper-parameter search of estimator k when its spec does
  // not pin one.
  uint64_t SearchSeed(size_t k) const;

  // Throws ConfigError (or SchemaError for roles) on malformed input.
  static PipelineConfig FromJson(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir = {});
  static PipelineConfig Load(const std::filesystem::path& path);
  nlohmann::json ToJson() const;
};

// Human-readable problems; empty when the config can run. Reads the CSV
// header and arm column when arm labels are not declared up front.
std::vector<std::string> ValidateConfig(const PipelineConfig& config);
// Parses and validates raw JSON, reporting parse failures as diagnostics.
std::vector<std::string> ValidateConfigJson(
    const nlohmann::json& j, const std::filesystem::path& base_dir = {});

struct RewardRow {
  std::string policy;
  std::string outcome;
  double value = 0.0;        // empirical-propensity IPS on the test split
  double ips = 0.0;          // IPS with the dataset's propensities
  double improvement = 0.0;  // value minus the logged mean outcome
  double pct_gain = 0.0;     // against the baseline uniform policy
  std::optional<double> true_value;
};

std::string RewardsCsv(const std::vector<RewardRow>& rows);

struct PipelineResult {
  std::filesystem::path output_dir;
  std::vector<Policy> policies;
  std::vector<RewardRow> rewards;
  nlohmann::json manifest;
};

// Runs every stage and writes the report bundle. A failing stage rethrows
// its error prefixed with the stage name after the manifest has been
// written with status "incomplete".
PipelineResult RunPipeline(const PipelineConfig& config);

// Evaluates one saved policy on a dataset and writes rewards, allocation
// and congruency tables into `out_dir` (skipped when empty).
std::vector<RewardRow> EvaluatePolicy(const Policy& policy,
                                      const ExperimentDataset& ds,
                                      const std::vector<std::string>& outcomes,
                                      const std::string& baseline_arm,
                                      const std::filesystem::path& out_dir);

// Draws n units and writes them as CSV plus a column-roles file next to it
// ("<stem>.roles.json").
void SynthesizeCsv(const SyntheticDgp& dgp, int64_t n, uint64_t seed, int jobs,
                   const std::filesystem::path& csv_path);

// Roles matching the columns written by WriteDatasetCsv for ds.
nlohmann::json RolesJson(const ExperimentDataset& ds);

}  // namespace uplift

#endif  // UPLIFT_PIPELINE_H_
