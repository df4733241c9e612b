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

#include "uplift/evaluation.h"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.h"
#include "uplift/csv.h"
#include "uplift/error.h"
#include "uplift/stats.h"
#include "uplift/synth.h"

namespace uplift {
namespace {

TEST(EvaluationTest, IpsValueByHand) {
  const int prescribed[] = {0, 1, 0, 1};
  const int actual[] = {0, 0, 0, 1};
  const double y[] = {1, 2, 3, 4};
  const double e[] = {0.5, 0.5};
  // Congruent units 0, 2, 3: (1 + 3 + 4) / 0.5 / 4.
  EXPECT_DOUBLE_EQ(IpsValue(prescribed, actual, y, e), 4.0);
  const double bad[] = {0.0, 1.0};
  EXPECT_THROW(IpsValue(prescribed, actual, y, bad), Error);
}

TEST(EvaluationTest, EmpiricalIpsByHand) {
  const int prescribed[] = {0, 0, 1, 1, 1};
  const int actual[] = {0, 1, 1, 1, 0};
  const double y[] = {1, 5, 2, 4, 7};
  // e_hat(0) = 1/2 and e_hat(1) = 2/3:
  // (1/5) (1 / (1/2) + 2 / (2/3) + 4 / (2/3)) = 2.2.
  EXPECT_NEAR(IpsEmpiricalValue(prescribed, actual, y, 2), 2.2, 1e-15);
  UpsilonResult u = UpsilonFromAssignments(prescribed, actual, y, 2);
  EXPECT_NEAR(u.ips_empirical, 2.2, 1e-15);
  EXPECT_NEAR(u.mean_outcome, 19.0 / 5.0, 1e-15);
  EXPECT_NEAR(u.direct, 2.2 - 3.8, 1e-15);
  EXPECT_NEAR(u.expanded, u.direct, 1e-12);
}

TEST(EvaluationTest, MissingCongruentArmWarns) {
  const int prescribed[] = {0, 0, 1};
  const int actual[] = {1, 1, 1};
  const double y[] = {1, 1, 3};
  std::vector<std::string> warnings;
  // Only arm 1 has congruent units: (1/3) * 3 / 1.
  EXPECT_NEAR(IpsEmpiricalValue(prescribed, actual, y, 2, &warnings), 1.0,
              1e-15);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(EvaluationTest, CongruencyTableByHand) {
  const int prescribed[] = {0, 0, 1, 1, 1};
  const int actual[] = {0, 1, 1, 1, 0};
  const double y[] = {1, 5, 2, 4, 7};
  CongruencyTable t =
      CongruencyFromAssignments(prescribed, actual, y, {"a", "b"});
  EXPECT_EQ(t.total, 5);
  EXPECT_EQ(t.prescribed_counts, (std::vector<int64_t>{2, 3}));
  EXPECT_EQ(t.counts, (std::vector<int64_t>{1, 1, 1, 2}));
  EXPECT_DOUBLE_EQ(t.mean(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(t.mean(1, 0), 7.0);
  EXPECT_NEAR(t.upsilon[0], 0.4, 1e-15);
  EXPECT_NEAR(t.CongruentValue(), 0.4 * 1 + 0.6 * 3, 1e-15);
  UpsilonTerms terms = UpsilonTermsFrom(t);
  // Row b: shares (1/3, 2/3), diffs (3 - 7, 0).
  EXPECT_NEAR(terms.shares[2], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(terms.diffs[2], -4.0, 1e-15);
  EXPECT_EQ(ParseCsv(t.ToCsv()).rows.size(), 2u);  // one per prescribed arm
}

TEST(EvaluationTest, UpsilonFormsAgreeOnRandomData) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int w = 2 + rep % 3;
    std::vector<int> pre(300), act(300);
    std::vector<double> y(300);
    for (int i = 0; i < 300; ++i) {
      pre[i] = static_cast<int>(rng.UniformIndex(w));
      act[i] = static_cast<int>(rng.UniformIndex(w));
      y[i] = rng.Normal();
    }
    UpsilonResult u = UpsilonFromAssignments(pre, act, y, w);
    EXPECT_NEAR(u.direct, u.expanded, 1e-10);
  }
}

TEST(EvaluationTest, AteTableUsesWelch) {
  ExperimentDataset ds = testing::FromText(
      "g,arm,y\na,c,1\na,c,2\na,c,3\na,c,4\na,t,2\na,t,4\na,t,6\n", {"c", "t"});
  AteTable t = ComputeAteTable(ds, "y", 0);
  ASSERT_EQ(t.rows.size(), 2u);
  const AteRow& treated = t.rows[1];
  const std::vector<double> a = {2, 4, 6}, b = {1, 2, 3, 4};
  TTestResult w = WelchTTest(a, b);
  EXPECT_EQ(treated.n, 3);
  EXPECT_DOUBLE_EQ(treated.diff, 1.5);
  EXPECT_NEAR(treated.t, w.t, 1e-12);
  EXPECT_NEAR(treated.p_value, w.p_value, 1e-12);
  EXPECT_NEAR(treated.pct_gain, 100.0 * 1.5 / 2.5, 1e-12);
  EXPECT_TRUE(t.rows[0].control);
}

TEST(EvaluationTest, BootstrapIdenticalPoliciesHaveZeroDifference) {
  ExperimentDataset ds = Draw(testing::TableDgp({{0.2, 0.4}, {0.5, 0.3}},
                                                {0.5, 0.5}), 3000, 1);
  std::vector<int> pre(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) pre[i] = ds.cell(i) % 2;
  auto y = ds.outcome("y");
  BootstrapComparison b = BootstrapCompareAssignments(
      {"p", "q"}, {pre, pre}, {y, y}, ds.arm_column(), 2, 100, 3);
  EXPECT_EQ(b.mean_diff[1], 0.0);
  EXPECT_EQ(b.std_error[1], 0.0);
  EXPECT_EQ(b.p_value[1], 1.0);
}

TEST(EvaluationTest, BootstrapDetectsConstantShift) {
  ExperimentDataset ds = Draw(testing::TableDgp({{0.2, 0.4}, {0.5, 0.3}},
                                                {0.5, 0.5}), 3000, 2);
  std::vector<int> pre(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) pre[i] = ds.cell(i) % 2;
  auto y = ds.outcome("y");
  std::vector<double> shifted(y.begin(), y.end());
  for (double& v : shifted) v += 0.25;
  BootstrapComparison b = BootstrapCompareAssignments(
      {"base", "shifted"}, {pre, pre}, {y, shifted}, ds.arm_column(), 2, 50, 4);
  // Entry (shifted, base).
  EXPECT_NEAR(b.mean_diff[1 * 2 + 0], 0.25, 1e-12);
  EXPECT_NEAR(b.mean_diff[0 * 2 + 1], -0.25, 1e-12);
  EXPECT_LT(b.p_value[2], 1e-6);
  EXPECT_NEAR(b.mean_value[1] - b.mean_value[0], 0.25, 1e-12);
}

TEST(EvaluationTest, BootstrapIsIndependentOfJobs) {
  ExperimentDataset ds = Draw(testing::TableDgp({{0.2, 0.4}, {0.5, 0.3}},
                                                {0.5, 0.5}), 2000, 3);
  std::vector<int> p0(ds.size(), 0), p1(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) p1[i] = ds.cell(i) % 2;
  auto y = ds.outcome("y");
  auto one = BootstrapCompareAssignments({"a", "b"}, {p0, p1}, {y, y},
                                         ds.arm_column(), 2, 64, 8, 1);
  auto many = BootstrapCompareAssignments({"a", "b"}, {p0, p1}, {y, y},
                                          ds.arm_column(), 2, 64, 8, 4);
  EXPECT_EQ(one.values, many.values);
  EXPECT_EQ(one.MatrixCsv(), many.MatrixCsv());
}

TEST(EvaluationTest, BootstrapIndicesAreDeterministic) {
  auto a = BootstrapIndices(7, 3, 1000);
  EXPECT_EQ(a, BootstrapIndices(7, 3, 1000));
  EXPECT_NE(a, BootstrapIndices(7, 4, 1000));
  for (int64_t i : a) {
    EXPECT_GE(i, 0);
    EXPECT_LT(i, 1000);
  }
}

TEST(EvaluationTest, DecompositionByHand) {
  CsvRoles roles;
  roles.arm_column = "arm";
  roles.outcome_columns = {"s", "y"};
  ExperimentDataset ds = DatasetFromCsvText(
      "g,arm,s,y\na,c,1,4\na,c,0,0\na,c,1,2\na,t,0,0\na,t,1,9\n", roles);
  OutcomeDecomposition d = DecomposeOutcome(ds, "s", "y");
  EXPECT_TRUE(d.precondition_holds);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_NEAR(d.rows[0].pr_success, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.rows[0].cond_mean, 3.0, 1e-15);
  EXPECT_NEAR(d.rows[0].mean, 2.0, 1e-15);
  EXPECT_NEAR(d.rows[0].residual, 0.0, 1e-15);
  EXPECT_NEAR(d.rows[1].product, 4.5, 1e-15);

  ExperimentDataset broken = DatasetFromCsvText(
      "g,arm,s,y\na,c,0,3\na,t,1,1\n", roles);
  EXPECT_FALSE(DecomposeOutcome(broken, "s", "y").precondition_holds);
  EXPECT_THROW(DecomposeOutcome(ds, "y", "s"), Error);
}

TEST(EvaluationTest, SegmentProfileShares) {
  ExperimentDataset ds = testing::FromText(
      "g,arm,y\na,c,1\na,t,0\nb,c,1\nb,t,1\nb,c,0\n", {"c", "t"});
  Policy p = Policy::Table(ds.schema_ptr(), {"c", "t"}, {{"g=b", 1}}, 0);
  SegmentProfile s = ProfileSegments(p, ds);
  EXPECT_EQ(s.prescribed_counts, (std::vector<int64_t>{2, 3}));
  ASSERT_EQ(s.variables.size(), 1u);
  const auto& v = s.variables[0];
  const int a = ds.schema().CategoryIndex(0, "a");
  EXPECT_DOUBLE_EQ(v.share[0][a], 1.0);
  EXPECT_DOUBLE_EQ(v.share[1][a], 0.0);
  EXPECT_DOUBLE_EQ(v.population[a], 0.4);
  EXPECT_NEAR(s.outcome_means[0][1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.population_means[0], 0.6, 1e-15);
}

}  // namespace
}  // namespace uplift
