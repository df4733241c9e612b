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

#include "uplift/reference.h"

#include <cmath>

#include <gtest/gtest.h>

#include "uplift/evaluation.h"
#include "uplift/outcome_models.h"
#include "uplift/synth.h"

namespace uplift {
namespace {

struct Grouped {
  OutcomeDesign design;
  std::vector<double> y;
  reference::DenseRows dense;
};

Grouped MakeInput(int64_t n, uint64_t seed) {
  RandomDgpOptions o;
  o.num_cells = 10;
  const auto ds = Draw(RandomDgp(o, seed), n, seed);
  Grouped g{BuildOutcomeDesign(ds, "y", Interactions::kNonBaseline), {}, {}};
  const auto y = ds.outcome("y");
  g.y.assign(y.begin(), y.end());
  const int p = g.design.rows.num_columns();
  for (size_t i = 0; i < ds.size(); ++i) {
    std::vector<uint8_t> row(p, 0);
    for (int c : g.design.rows.row(g.design.unit_row[i])) row[c] = 1;
    g.dense.push_back(std::move(row));
  }
  return g;
}

double RootSse(const std::vector<double>& y) {
  double m = 0;
  for (double v : y) m += v;
  m /= static_cast<double>(y.size());
  double s = 0;
  for (double v : y) s += (v - m) * (v - m);
  return s;
}

void ExpectSameTree(const BinaryTree& a, const BinaryTree& b) {
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (size_t k = 0; k < a.nodes.size(); ++k) {
    EXPECT_EQ(a.nodes[k].column, b.nodes[k].column) << k;
    EXPECT_EQ(a.nodes[k].left, b.nodes[k].left) << k;
    EXPECT_EQ(a.nodes[k].weight, b.nodes[k].weight) << k;
    EXPECT_NEAR(a.nodes[k].value, b.nodes[k].value, 1e-12) << k;
  }
}

TEST(ReferenceTest, GroupedTreeEqualsUnitTree) {
  Grouped g = MakeInput(3000, 1);
  std::vector<RegressionStats> stats(g.design.rows.size());
  for (size_t i = 0; i < g.y.size(); ++i) {
    stats[g.design.unit_row[i]].weight += 1;
    stats[g.design.unit_row[i]].sum += g.y[i];
  }
  RegressionCriterion crit;
  crit.min_leaf_weight = 20;
  crit.min_split_weight = 40;
  crit.min_reduction = ReductionFloor(RootSse(g.y), 3000);
  GrowOptions opt;
  opt.max_depth = 6;
  BinaryTree grouped = FitRegressionTree(g.design.rows, stats, crit, opt);
  reference::TreeOptions ro;
  ro.min_leaf = 20;
  ro.min_split = 40;
  ro.min_reduction = crit.min_reduction;
  ro.max_depth = 6;
  BinaryTree unit = reference::RegressionTree(g.dense, g.y, {}, ro);
  EXPECT_GT(grouped.nodes.size(), 1u);
  ExpectSameTree(grouped, unit);
}

TEST(ReferenceTest, GroupedForestEqualsUnitForest) {
  Grouped g = MakeInput(2000, 2);
  ForestParams fp;
  fp.num_trees = 6;
  fp.max_features = MaxFeatures::kSqrt;
  fp.min_split = 20;
  fp.min_leaf = 10;
  fp.seed = 77;
  fp.jobs = 3;
  auto grouped = FitForestTrees(g.design.rows, g.design.unit_row, g.y, fp);
  reference::TreeOptions ro;
  ro.min_leaf = 10;
  ro.min_split = 20;
  ro.min_reduction = ReductionFloor(RootSse(g.y), 2000);
  ro.mtry = ForestMtry(MaxFeatures::kSqrt, g.design.rows.num_columns());
  auto unit = reference::Forest(g.dense, g.y, 6, true, 77, ro);
  ASSERT_EQ(grouped.size(), unit.size());
  for (size_t b = 0; b < unit.size(); ++b) ExpectSameTree(grouped[b], unit[b]);
}

struct EvalInput {
  std::vector<int> prescribed, actual;
  std::vector<double> y;
};

EvalInput MakeEval(int64_t n, uint64_t seed) {
  RandomDgpOptions o;
  const auto ds = Draw(RandomDgp(o, seed), n, seed);
  EvalInput in;
  for (size_t i = 0; i < ds.size(); ++i) {
    in.prescribed.push_back((ds.cell(i) * 5 + 1) % 3);
    in.actual.push_back(ds.arm(i));
    in.y.push_back(ds.outcome("y")[i]);
  }
  return in;
}

TEST(ReferenceTest, IpsEmpiricalMatchesProduction) {
  EvalInput in = MakeEval(5000, 3);
  EXPECT_NEAR(reference::IpsEmpirical(in.prescribed, in.actual, in.y),
              IpsEmpiricalValue(in.prescribed, in.actual, in.y, 3), 1e-12);
}

TEST(ReferenceTest, BootstrapMatchesParallel) {
  EvalInput in = MakeEval(3000, 4);
  auto ref = reference::BootstrapIps(in.prescribed, in.actual, in.y, 40, 9);
  BootstrapComparison par = BootstrapCompareAssignments(
      {"p"}, {in.prescribed}, {in.y}, in.actual, 3, 40, 9, 4);
  ASSERT_EQ(par.values[0].size(), ref.size());
  for (size_t b = 0; b < ref.size(); ++b) {
    EXPECT_NEAR(par.values[0][b], ref[b], 1e-12) << b;
  }
}

TEST(ReferenceTest, MultiplicityActsAsRepetition) {
  // Weight 2 on a unit equals listing it twice.
  reference::DenseRows x = {{1, 0}, {0, 1}, {1, 1}};
  std::vector<double> y = {1.0, 4.0, 2.0};
  std::vector<double> mult = {2.0, 1.0, 1.0};
  reference::DenseRows x2 = {{1, 0}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<double> y2 = {1.0, 1.0, 4.0, 2.0};
  BinaryTree a = reference::RegressionTree(x, y, mult, {});
  BinaryTree b = reference::RegressionTree(x2, y2, {}, {});
  ExpectSameTree(a, b);
}

}  // namespace
}  // namespace uplift
