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

#ifndef UPLIFT_REFERENCE_H_
#define UPLIFT_REFERENCE_H_

// Serial, unit-by-unit versions of the grouped and parallel kernels. They
// are slow on purpose and exist to cross-check the production code in tests
// and benchmarks.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "uplift/tree.h"

namespace uplift::reference {

// Dense 0/1 design, one row per unit.
using DenseRows = std::vector<std::vector<uint8_t>>;

struct TreeOptions {
  double min_leaf = 1.0;
  double min_split = 2.0;
  double min_reduction = 0.0;
  int max_depth = std::numeric_limits<int>::max();
  int mtry = 0;  // 0 means every column
  uint64_t seed = 0;
};

// CART by exhaustive search over units. `multiplicity` weights each unit
// (bootstrap counts); empty means 1 for every unit.
BinaryTree RegressionTree(const DenseRows& x, std::span<const double> y,
                          std::span<const double> multiplicity,
                          const TreeOptions& options);

// Forest grown one tree after another with materialized bootstrap counts.
std::vector<BinaryTree> Forest(const DenseRows& x, std::span<const double> y,
                               int num_trees, bool bootstrap, uint64_t seed,
                               const TreeOptions& options);

double PredictTree(const BinaryTree& tree, std::span<const uint8_t> row);

// (1/N) sum 1[W = pi] Y / e_W with e_w = n(W = w, pi = w) / n(pi = w).
double IpsEmpirical(std::span<const int> prescribed, std::span<const int> actual,
                    std::span<const double> y);

// Bootstrap replicate values of IpsEmpirical, resampling units explicitly.
std::vector<double> BootstrapIps(std::span<const int> prescribed,
                                 std::span<const int> actual,
                                 std::span<const double> y, int replicates,
                                 uint64_t seed);

}  // namespace uplift::reference

#endif  // UPLIFT_REFERENCE_H_
