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

#ifndef UPLIFT_EVALUATION_H_
#define UPLIFT_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.h"
#include "uplift/policy.h"

namespace uplift {

enum class IpsMode { kTheoretical, kEmpirical };

struct IpsEstimate {
  std::string policy;
  std::string outcome;
  double value = 0.0;
  IpsMode mode = IpsMode::kTheoretical;
  std::vector<std::string> warnings;
};

// (1/N) sum_i 1[W_i = pi_i] Y_i / e(W_i). Throws DataError when a
// propensity is not strictly positive.
double IpsValue(std::span<const int> prescribed, std::span<const int> actual,
                std::span<const double> y, std::span<const double> propensities);

// Empirical-propensity IPS with e_hat(W_i) = n(W = W_i, pi = pi_i) /
// n(pi = pi_i), computed unit by unit. A prescribed arm with no congruent
// unit contributes 0 and adds a warning.
double IpsEmpiricalValue(std::span<const int> prescribed,
                         std::span<const int> actual, std::span<const double> y,
                         int num_arms,
                         std::vector<std::string>* warnings = nullptr);

// Propensities default to the dataset's known propensities, else the
// empirical arm shares.
IpsEstimate Ips(const Policy& policy, const ExperimentDataset& ds,
                std::string_view outcome,
                std::span<const double> propensities = {});
IpsEstimate IpsEmpirical(const Policy& policy, const ExperimentDataset& ds,
                         std::string_view outcome);

// Prescribed arm x actual arm grid.
struct CongruencyTable {
  std::vector<std::string> arm_labels;
  std::vector<int64_t> prescribed_counts;
  std::vector<double> upsilon;    // share of units prescribed each arm
  std::vector<int64_t> counts;    // W x W
  std::vector<double> sums;       // W x W outcome sums
  std::vector<double> means;      // W x W; NaN where the stratum is empty
  int64_t total = 0;

  int num_arms() const { return static_cast<int>(arm_labels.size()); }
  bool present(int w, int w2) const { return counts[w * num_arms() + w2] > 0; }
  double mean(int w, int w2) const { return means[w * num_arms() + w2]; }
  // Mean outcome among congruent units, sum_w upsilon_w * Ybar[pi=W=w].
  double CongruentValue() const;
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

CongruencyTable CongruencyFromAssignments(std::span<const int> prescribed,
                                          std::span<const int> actual,
                                          std::span<const double> y,
                                          std::vector<std::string> arm_labels);
CongruencyTable Congruency(const Policy& policy, const ExperimentDataset& ds,
                           std::string_view outcome);

// Inputs of the expanded improvement formula
//   sum_w upsilon_w sum_w' e_{w,w'} (Ybar[pi=W=w] - Ybar[pi=w, W=w'])
// where e_{w,w'} is the share of arm w' among units prescribed w.
struct UpsilonTerms {
  int num_arms = 0;
  std::vector<double> upsilon;  // W
  std::vector<double> shares;   // W x W, row = prescribed arm
  std::vector<double> diffs;    // W x W
};

double UpsilonExpanded(const UpsilonTerms& terms);
UpsilonTerms UpsilonTermsFrom(const CongruencyTable& table);

struct UpsilonResult {
  double direct = 0.0;    // IPS_empirical - mean(Y)
  double expanded = 0.0;  // double-sum form
  double ips_empirical = 0.0;
  double mean_outcome = 0.0;
  std::vector<std::string> warnings;
};

UpsilonResult Upsilon(const Policy& policy, const ExperimentDataset& ds,
                      std::string_view outcome);
UpsilonResult UpsilonFromAssignments(std::span<const int> prescribed,
                                     std::span<const int> actual,
                                     std::span<const double> y, int num_arms);

struct AteRow {
  std::string arm;
  int64_t n = 0;
  double mean = 0.0;
  double diff = 0.0;       // mean - control mean
  double t = 0.0;          // Welch
  double p_value = 1.0;
  double pct_gain = 0.0;   // 100 * diff / control mean
  bool control = false;
};

struct AteTable {
  std::string outcome;
  int control = 0;
  std::vector<AteRow> rows;

  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

AteTable ComputeAteTable(const ExperimentDataset& ds, std::string_view outcome,
                         int control);

struct BootstrapComparison {
  std::vector<std::string> policies;
  int replicates = 0;
  uint64_t seed = 0;
  std::vector<std::vector<double>> values;  // policy x replicate
  std::vector<double> mean_value;
  // P x P, entry (a, b) compares policy a against policy b.
  std::vector<double> mean_diff;
  std::vector<double> std_error;
  std::vector<double> t;
  std::vector<double> p_value;

  size_t num_policies() const { return policies.size(); }
  std::string MatrixCsv() const;
  std::string ReplicatesCsv() const;
  nlohmann::json ToJson() const;
};

// Replicate b resamples N units with replacement from seed stream b; every
// policy is scored on the same resample. Results do not depend on `jobs`.
BootstrapComparison BootstrapCompareAssignments(
    std::vector<std::string> names,
    const std::vector<std::vector<int>>& prescribed,
    const std::vector<std::span<const double>>& outcomes,
    std::span<const int> actual, int num_arms, int replicates, uint64_t seed,
    int jobs = 1);

BootstrapComparison BootstrapCompare(const std::vector<Policy>& policies,
                                     const ExperimentDataset& ds,
                                     std::string_view outcome, int replicates,
                                     uint64_t seed, int jobs = 1);

// Resample indices of replicate b.
std::vector<int64_t> BootstrapIndices(uint64_t seed, int64_t b, int64_t n);

struct SegmentProfile {
  struct VariableShares {
    std::string variable;
    std::vector<std::string> categories;
    std::vector<std::vector<double>> share;  // prescribed arm x category
    std::vector<double> population;          // category shares of all units
  };

  std::vector<std::string> arm_labels;
  std::vector<int64_t> prescribed_counts;
  std::vector<VariableShares> variables;
  std::vector<std::string> outcomes;
  std::vector<std::vector<double>> outcome_means;  // outcome x arm (NaN empty)
  std::vector<double> population_means;            // per outcome

  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

// Empty selections mean every variable / every outcome.
SegmentProfile ProfileSegments(const Policy& policy, const ExperimentDataset& ds,
                               const std::vector<std::string>& variables = {},
                               const std::vector<std::string>& outcomes = {});

struct DecompositionRow {
  std::string arm;
  int64_t n = 0;
  double pr_success = 0.0;  // Pr(s = 1 | W)
  double cond_mean = 0.0;   // E[y | W, s = 1]
  double product = 0.0;
  double mean = 0.0;        // E[y | W]
  double residual = 0.0;    // mean - product
};

struct OutcomeDecomposition {
  std::string success;
  std::string value;
  bool precondition_holds = true;  // y == 0 whenever s == 0
  std::vector<DecompositionRow> rows;

  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

// E[y | W] = Pr(s = 1 | W) E[y | W, s = 1]; s must be 0/1.
OutcomeDecomposition DecomposeOutcome(const ExperimentDataset& ds,
                                      std::string_view success,
                                      std::string_view value);

}  // namespace uplift

#endif  // UPLIFT_EVALUATION_H_
