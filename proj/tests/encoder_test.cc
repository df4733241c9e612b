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

#include "uplift/encoder.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace uplift {
namespace {

constexpr char kData[] =
    "color,size,arm,y\n"
    "red,s,a,1\n"
    "blue,m,b,0\n"
    "green,l,c,1\n"
    "red,m,a,0\n";

TEST(EncoderTest, ColumnCounts) {
  ExperimentDataset ds = testing::FromText(kData, {"a", "b", "c"});
  const int covariates = 3 + 3;
  const int arms = 3;
  EncodedMatrix none = Encode(ds, Interactions::kNone);
  EXPECT_EQ(none.columns.size(), static_cast<size_t>(covariates + arms));
  EncodedMatrix nb = Encode(ds, Interactions::kNonBaseline);
  EXPECT_EQ(nb.num_interaction_columns, covariates * (arms - 1));
  EncodedMatrix all = Encode(ds, Interactions::kAllArms);
  EXPECT_EQ(all.num_interaction_columns, covariates * arms);
  EXPECT_EQ(all.rows, 4);
}

TEST(EncoderTest, RowsAreOneHotWithInteractions) {
  ExperimentDataset ds = testing::FromText(kData, {"a", "b", "c"});
  EncodedMatrix m = Encode(ds, Interactions::kNonBaseline);
  for (int64_t r = 0; r < m.rows; ++r) {
    int cov = 0, arm = 0, inter = 0;
    for (size_t c = 0; c < m.columns.size(); ++c) {
      if (!m.at(r, static_cast<int>(c))) continue;
      switch (m.columns[c].kind) {
        case ColumnDescriptor::Kind::kCovariate: ++cov; break;
        case ColumnDescriptor::Kind::kArm:
          ++arm;
          EXPECT_EQ(m.columns[c].arm, ds.arm(r));
          break;
        case ColumnDescriptor::Kind::kInteraction:
          ++inter;
          EXPECT_EQ(m.columns[c].arm, ds.arm(r));
          break;
      }
    }
    EXPECT_EQ(cov, 2);
    EXPECT_EQ(arm, 1);
    // Baseline-arm units carry no interaction terms.
    EXPECT_EQ(inter, ds.arm(r) == 0 ? 0 : 2);
  }
}

TEST(EncoderTest, ActiveColumnsMatchDenseRow) {
  ExperimentDataset ds = testing::FromText(kData, {"a", "b", "c"});
  Encoder enc(ds.schema_ptr(), ds.arm_labels(), Interactions::kAllArms);
  EncodedMatrix m = Encode(ds, Interactions::kAllArms);
  std::vector<int> active;
  for (size_t i = 0; i < ds.size(); ++i) {
    enc.ActiveColumns(ds.codes(i), ds.arm(i), &active);
    std::vector<int> dense;
    for (int c = 0; c < enc.num_columns(); ++c) {
      if (m.at(static_cast<int64_t>(i), c)) dense.push_back(c);
    }
    EXPECT_EQ(active, dense);
  }
}

TEST(EncoderTest, UnseenCategoryActivatesNothing) {
  ExperimentDataset ds = testing::FromText(kData, {"a", "b", "c"});
  Encoder enc(ds.schema_ptr(), ds.arm_labels(), Interactions::kNone);
  std::vector<int> active;
  const int codes[] = {-1, 0};
  enc.CovariateColumns(codes, &active);
  EXPECT_EQ(active.size(), 1u);
}

TEST(EncoderTest, JsonRoundTrip) {
  ExperimentDataset ds = testing::FromText(kData, {"a", "b", "c"});
  Encoder enc(ds.schema_ptr(), ds.arm_labels(), Interactions::kNonBaseline);
  Encoder back = Encoder::FromJson(enc.ToJson());
  EXPECT_EQ(back.num_columns(), enc.num_columns());
  EXPECT_EQ(back.interactions(), enc.interactions());
  EXPECT_EQ(back.schema(), enc.schema());
  for (int c = 0; c < enc.num_columns(); ++c) {
    EXPECT_EQ(back.columns()[c].name, enc.columns()[c].name);
  }
}

TEST(EncoderTest, TranslateCellsAcrossSchemas) {
  ExperimentDataset a = testing::FromText(kData, {"a", "b", "c"});
  ExperimentDataset b =
      testing::FromText("size,color,arm,y\nm,red,a,1\nxl,blue,b,0\n");
  std::vector<int> t = TranslateCells(b, a.schema());
  const Schema& s = a.schema();
  const int color = s.VariableIndex("color");
  const int size = s.VariableIndex("size");
  const int nv = s.num_variables();
  // Cell of the first unit in b: size=m, color=red.
  const int c0 = b.cell(0);
  EXPECT_EQ(t[c0 * nv + color], s.CategoryIndex(color, "red"));
  EXPECT_EQ(t[c0 * nv + size], s.CategoryIndex(size, "m"));
  EXPECT_EQ(t[b.cell(1) * nv + size], -1);
}

}  // namespace
}  // namespace uplift
