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

#include "uplift/synth.h"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.h"
#include "uplift/error.h"

namespace uplift {
namespace {

using testing::TableDgp;

TEST(SynthTest, DrawDoesNotDependOnJobs) {
  SyntheticDgp dgp = TableDgp({{0.1, 0.2}, {0.5, 0.4}, {0.9, 0.3}}, {0.3, 0.7});
  const int64_t n = 2 * kDrawShardSize + 123;
  ExperimentDataset one = Draw(dgp, n, 5, 1);
  ExperimentDataset four = Draw(dgp, n, 5, 4);
  ASSERT_EQ(one.size(), four.size());
  for (size_t i = 0; i < one.size(); ++i) {
    ASSERT_EQ(one.arm(i), four.arm(i));
    ASSERT_EQ(one.CellSignature(one.cell(i)), four.CellSignature(four.cell(i)));
    ASSERT_EQ(one.outcome("y")[i], four.outcome("y")[i]);
  }
  ExperimentDataset other = Draw(dgp, 1000, 6, 1);
  int same = 0;
  for (size_t i = 0; i < 1000; ++i) same += other.arm(i) == one.arm(i);
  EXPECT_LT(same, 1000);
}

TEST(SynthTest, DrawMatchesDgpFrequencies) {
  SyntheticDgp dgp = TableDgp({{0.2, 0.6}, {0.7, 0.1}}, {0.25, 0.75});
  const int64_t n = 200000;
  ExperimentDataset ds = Draw(dgp, n, 11, 2);
  ASSERT_TRUE(ds.known_propensities());
  EXPECT_EQ(*ds.known_propensities(), dgp.propensities);
  auto counts = ds.ArmCounts();
  EXPECT_NEAR(counts[0] / double(n), 0.25, 0.005);
  // Per (cell, arm) success rate within 5 standard errors.
  const Schema& s = ds.schema();
  for (int c = 0; c < 2; ++c) {
    for (int w = 0; w < 2; ++w) {
      double k = 0, m = 0;
      for (size_t i = 0; i < ds.size(); ++i) {
        if (ds.arm(i) != w) continue;
        if (s.categories[0][ds.codes(i)[0]] != "c" + std::to_string(c)) continue;
        ++m;
        k += ds.outcome("y")[i];
      }
      const double p = dgp.cells[c].mean[w];
      EXPECT_NEAR(k / m, p, 5 * std::sqrt(p * (1 - p) / m));
    }
  }
}

TEST(SynthTest, TrueValueAndOracle) {
  SyntheticDgp dgp = TableDgp({{0.1, 0.3}, {0.5, 0.5}, {0.8, 0.2}}, {0.5, 0.5});
  const int always0[] = {0, 0, 0};
  EXPECT_NEAR(TruePolicyValue(dgp, always0), (0.1 + 0.5 + 0.8) / 3, 1e-15);
  const int mixed[] = {1, 0, 0};
  EXPECT_NEAR(TruePolicyValue(dgp, mixed), (0.3 + 0.5 + 0.8) / 3, 1e-15);
  OracleAnswers o = EnumerateOptimal(dgp);
  // The tie in cell 1 goes to the lower arm.
  EXPECT_EQ(o.optimal_arm, (std::vector<int>{1, 0, 0}));
  EXPECT_NEAR(o.optimal_value, (0.3 + 0.5 + 0.8) / 3, 1e-15);
}

TEST(SynthTest, ValidateRejectsBadTables) {
  SyntheticDgp ok = TableDgp({{0.1, 0.3}}, {0.5, 0.5});
  EXPECT_NO_THROW(ok.Validate());
  SyntheticDgp bad_p = ok;
  bad_p.propensities = {0.5, 0.6};
  EXPECT_THROW(bad_p.Validate(), Error);
  SyntheticDgp zero_p = ok;
  zero_p.propensities = {1.0, 0.0};
  EXPECT_THROW(zero_p.Validate(), Error);
  SyntheticDgp bad_mean = ok;
  bad_mean.cells[0].mean = {1.5, 0.2};
  EXPECT_THROW(bad_mean.Validate(), Error);
  SyntheticDgp short_mean = ok;
  short_mean.cells[0].mean = {0.5};
  EXPECT_THROW(short_mean.Validate(), Error);
}

TEST(SynthTest, JsonRoundTrip) {
  SyntheticDgp dgp = TableDgp({{0.1, 0.3}, {0.4, 0.2}}, {0.4, 0.6});
  dgp.conditional = ConditionalOutcome{"rev", {10.0, 20.0}, 1.0};
  dgp.seed = 9;
  SyntheticDgp back = SyntheticDgp::FromJson(dgp.ToJson());
  EXPECT_EQ(back.ToJson(), dgp.ToJson());
  ExperimentDataset a = Draw(dgp, 500, 3);
  ExperimentDataset b = Draw(back, 500, 3);
  for (size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(a.outcome("rev")[i], b.outcome("rev")[i]);
  }
}

TEST(SynthTest, ConditionalOutcomeIsZeroWithoutSuccess) {
  SyntheticDgp dgp = TableDgp({{0.3, 0.6}}, {0.5, 0.5});
  dgp.conditional = ConditionalOutcome{"rev", {5.0, 8.0}, 0.5};
  ExperimentDataset ds = Draw(dgp, 20000, 1);
  double sum1 = 0, n1 = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const double s = ds.outcome("y")[i];
    const double r = ds.outcome("rev")[i];
    if (s == 0) {
      EXPECT_EQ(r, 0.0);
    } else {
      EXPECT_GE(r, 0.0);
      if (ds.arm(i) == 1) {
        sum1 += r;
        ++n1;
      }
    }
  }
  EXPECT_NEAR(sum1 / n1, 8.0, 0.05);
}

TEST(SynthTest, RandomDgpHasGap) {
  RandomDgpOptions opt;
  SyntheticDgp dgp = RandomDgp(opt, 42);
  EXPECT_NO_THROW(dgp.Validate());
  EXPECT_EQ(dgp.num_cells(), 8);
  EXPECT_EQ(dgp.num_arms(), 3);
  for (const auto& cell : dgp.cells) {
    double best = -1, second = -1;
    for (double m : cell.mean) {
      if (m > best) {
        second = best;
        best = m;
      } else if (m > second) {
        second = m;
      }
    }
    EXPECT_GE(best - second, opt.min_gap - 1e-12);
  }
  EXPECT_EQ(RandomDgp(opt, 42).ToJson(), dgp.ToJson());
}

}  // namespace
}  // namespace uplift
