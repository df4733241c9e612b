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

#include "uplift/dataset.h"

#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"
#include "uplift/error.h"

namespace uplift {
namespace {

using testing::FromText;

constexpr char kSmall[] =
    "device,age,arm,y\n"
    "ios,young,t,1\n"
    "android,old,c,0\n"
    "ios,old,t,0\n"
    ",young,c,1\n"
    "ios,young,c,0.5\n";

TEST(DatasetTest, LoadsColumnsAndCells) {
  ExperimentDataset ds = FromText(kSmall, {"c", "t"});
  EXPECT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds.arm_labels(), (std::vector<std::string>{"c", "t"}));
  EXPECT_EQ(ds.arm(0), 1);
  EXPECT_EQ(ds.arm(1), 0);
  // Units 0 and 4 share a covariate cell.
  EXPECT_EQ(ds.cell(0), ds.cell(4));
  EXPECT_EQ(ds.num_cells(), 4);
  EXPECT_EQ(ds.outcome("y")[4], 0.5);
  EXPECT_EQ(ds.ArmCounts(), (std::vector<int64_t>{3, 2}));
  // Empty labels become the "unknown" category.
  const Schema& s = ds.schema();
  const int device = s.VariableIndex("device");
  EXPECT_GE(s.CategoryIndex(device, kUnknownCategory), 0);
  EXPECT_EQ(ds.codes(3)[device], s.CategoryIndex(device, kUnknownCategory));
}

TEST(DatasetTest, EmpiricalPropensitiesAreArmShares) {
  ExperimentDataset ds = FromText(kSmall, {"c", "t"});
  auto e = EmpiricalPropensities(ds);
  EXPECT_DOUBLE_EQ(e[0], 0.6);
  EXPECT_DOUBLE_EQ(e[1], 0.4);
  EXPECT_EQ(ds.propensities(), e);
}

TEST(DatasetTest, DeclaredPropensitiesAreKept) {
  CsvRoles roles;
  roles.arm_column = "arm";
  roles.outcome_columns = {"y"};
  roles.propensities = {{"c", 0.5}, {"t", 0.5}};
  ExperimentDataset ds = DatasetFromCsvText(kSmall, roles);
  ASSERT_TRUE(ds.known_propensities());
  EXPECT_EQ(ds.propensities(), (std::vector<double>{0.5, 0.5}));
  roles.propensities = {{"c", 0.5}, {"t", 0.0}};
  EXPECT_THROW(DatasetFromCsvText(kSmall, roles), Error);
}

TEST(DatasetTest, SchemaErrors) {
  CsvRoles roles;
  roles.arm_column = "treatment";
  roles.outcome_columns = {"y"};
  try {
    DatasetFromCsvText(kSmall, roles);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
  }
  EXPECT_THROW(FromText("g,arm,y\na,t,notanumber\n"), Error);
  EXPECT_THROW(FromText("g,arm,y\na,x,1\n", {"c", "t"}), Error);
}

TEST(DatasetTest, SplitPartitionsUnits) {
  std::string text = "g,arm,y\n";
  for (int i = 0; i < 101; ++i) {
    text += "v" + std::to_string(i % 3) + "," + (i % 2 ? "t" : "c") + "," +
            std::to_string(i) + "\n";
  }
  ExperimentDataset ds = FromText(text);
  SplitPair sp = Split(ds, 0.7, 17);
  EXPECT_EQ(sp.train.size(), 71u);
  EXPECT_EQ(sp.test.size(), 30u);
  std::multiset<double> all;
  for (double y : sp.train.outcome("y")) all.insert(y);
  for (double y : sp.test.outcome("y")) all.insert(y);
  std::multiset<double> expected;
  for (int i = 0; i < 101; ++i) expected.insert(i);
  EXPECT_EQ(all, expected);
  SplitPair again = Split(ds, 0.7, 17);
  EXPECT_TRUE(std::equal(again.test.outcome("y").begin(),
                         again.test.outcome("y").end(),
                         sp.test.outcome("y").begin()));
  EXPECT_THROW(Split(ds, 1.0, 1), Error);
  EXPECT_THROW(Split(ds, 0.0, 1), Error);
}

TEST(DatasetTest, RestrictToArmsKeepsIndices) {
  ExperimentDataset ds =
      FromText("g,arm,y\na,x,1\nb,y,2\na,z,3\nb,x,4\n", {"x", "y", "z"});
  const int arms[] = {0, 2};
  ExperimentDataset r = ds.RestrictToArms(arms);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r.num_arms(), 3);
  EXPECT_EQ(r.arm(1), 2);
  EXPECT_EQ(r.outcome("y")[2], 4.0);
  EXPECT_EQ(r.ArmCounts(), (std::vector<int64_t>{2, 0, 1}));
}

TEST(DatasetTest, CsvTextRoundTrip) {
  ExperimentDataset ds = FromText(kSmall, {"c", "t"});
  ExperimentDataset back = FromText(DatasetToCsvText(ds), {"c", "t"});
  ASSERT_EQ(back.size(), ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.arm(i), ds.arm(i));
    EXPECT_EQ(back.outcome("y")[i], ds.outcome("y")[i]);
    EXPECT_EQ(back.CellSignature(back.cell(i)), ds.CellSignature(ds.cell(i)));
  }
}

TEST(DatasetTest, WithOutcomeAddsColumn) {
  ExperimentDataset ds = FromText(kSmall);
  ExperimentDataset d2 = ds.WithOutcome("z", {1, 2, 3, 4, 5});
  EXPECT_TRUE(d2.has_outcome("z"));
  EXPECT_EQ(d2.outcome("z")[2], 3.0);
  EXPECT_THROW(ds.WithOutcome("z", {1}), Error);
}

}  // namespace
}  // namespace uplift
