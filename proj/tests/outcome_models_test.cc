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

#include "uplift/outcome_models.h"

#include <cmath>
#include <map>
#include <memory>

#include <gtest/gtest.h>

#include "test_util.h"
#include "uplift/error.h"
#include "uplift/synth.h"

namespace uplift {
namespace {

ExperimentDataset ThreeArmData(int64_t n, uint64_t seed) {
  RandomDgpOptions opt;
  opt.num_cells = 6;
  return Draw(RandomDgp(opt, seed), n, seed + 1);
}

// Mean outcome of every (cell, arm) group; NaN when empty.
std::vector<double> GroupMeans(const ExperimentDataset& ds) {
  const int w = ds.num_arms();
  std::vector<double> sum(ds.num_cells() * w, 0.0), cnt(sum.size(), 0.0);
  for (size_t i = 0; i < ds.size(); ++i) {
    sum[ds.cell(i) * w + ds.arm(i)] += ds.outcome("y")[i];
    cnt[ds.cell(i) * w + ds.arm(i)] += 1;
  }
  for (size_t k = 0; k < sum.size(); ++k) sum[k] = cnt[k] ? sum[k] / cnt[k] : NAN;
  return sum;
}

TEST(OutcomeModelsTest, SaturatedOlsReproducesGroupMeans) {
  // One covariate with arm interactions is a saturated model.
  ExperimentDataset ds = ThreeArmData(5000, 1);
  FittedOutcomeModel ols = FitOls(ds, "y");
  auto pred = ols.PredictCells(ds);
  auto means = GroupMeans(ds);
  for (size_t k = 0; k < pred.size(); ++k) {
    EXPECT_NEAR(pred[k], means[k], 1e-6) << k;
  }
}

TEST(OutcomeModelsTest, LassoZeroMatchesOls) {
  ExperimentDataset ds = ThreeArmData(3000, 2);
  auto ols = FitOls(ds, "y").PredictCells(ds);
  auto lasso = FitLasso(ds, "y", 0.0).PredictCells(ds);
  for (size_t k = 0; k < ols.size(); ++k) EXPECT_NEAR(lasso[k], ols[k], 1e-5);
}

TEST(OutcomeModelsTest, LassoShrinksToMean) {
  ExperimentDataset ds = ThreeArmData(2000, 3);
  auto pred = FitLasso(ds, "y", 1e6).PredictUnits(ds);
  double mean = 0;
  for (double y : ds.outcome("y")) mean += y;
  mean /= static_cast<double>(ds.size());
  for (double p : pred) EXPECT_NEAR(p, mean, 1e-12);
}

TEST(OutcomeModelsTest, FullCartReproducesGroupMeans) {
  ExperimentDataset ds = ThreeArmData(5000, 4);
  FittedOutcomeModel cart = FitCart(ds, "y", CartParams{});
  auto pred = cart.PredictCells(ds);
  auto means = GroupMeans(ds);
  // Groups that can be split apart will be, unless their means coincide.
  for (size_t k = 0; k < pred.size(); ++k) {
    EXPECT_NEAR(pred[k], means[k], 1e-9) << k;
  }
  CartParams stump;
  stump.complexity = std::numeric_limits<double>::infinity();
  EXPECT_EQ(FitCart(ds, "y", stump).trees()[0].nodes.size(), 1u);
}

TEST(OutcomeModelsTest, CartOnHandFixture) {
  // y depends on arm only: the single split separates the arms.
  ExperimentDataset ds = testing::FromText(
      "g,arm,y\na,t,3\nb,t,5\na,c,1\nb,c,1\n", {"c", "t"});
  CartParams p;
  p.min_leaf = 1;
  FittedOutcomeModel m = FitCart(ds, "y", p);
  auto pred = m.PredictUnits(ds);
  // Arm split cuts SSE from 11 to 2; the g split on the treated leaf cuts it
  // from 2 to 0.
  EXPECT_DOUBLE_EQ(pred[0], 3.0);
  EXPECT_DOUBLE_EQ(pred[1], 5.0);
  EXPECT_DOUBLE_EQ(pred[2], 1.0);
  EXPECT_DOUBLE_EQ(Mse(m, ds, "y"), 0.0);
  p.complexity = 0.5;  // needs a cut above 5.5
  auto pruned = FitCart(ds, "y", p).PredictUnits(ds);
  EXPECT_DOUBLE_EQ(pruned[0], 4.0);
  EXPECT_DOUBLE_EQ(pruned[2], 1.0);
}

TEST(OutcomeModelsTest, ForestWithoutBootstrapEqualsCart) {
  ExperimentDataset ds = ThreeArmData(3000, 5);
  ForestParams fp;
  fp.num_trees = 3;
  fp.bootstrap = false;
  fp.min_split = 2;
  fp.min_leaf = 1;
  auto forest = FitRandomForest(ds, "y", fp).PredictCells(ds);
  auto cart = FitCart(ds, "y", CartParams{}).PredictCells(ds);
  for (size_t k = 0; k < cart.size(); ++k) EXPECT_NEAR(forest[k], cart[k], 1e-12);
}

TEST(OutcomeModelsTest, ForestIsIndependentOfJobs) {
  ExperimentDataset ds = ThreeArmData(4000, 6);
  ForestParams fp;
  fp.num_trees = 12;
  fp.max_features = MaxFeatures::kSqrt;
  fp.seed = 9;
  auto one = FitRandomForest(ds, "y", fp);
  fp.jobs = 4;
  auto four = FitRandomForest(ds, "y", fp);
  EXPECT_EQ(one.ToJson(), four.ToJson());
}

TEST(OutcomeModelsTest, BoostingTrainingLossNeverIncreases) {
  ExperimentDataset ds = ThreeArmData(4000, 7);
  BoostParams bp;
  bp.rounds = 30;
  bp.max_depth = 3;
  bp.learning_rate = 0.3;
  std::vector<double> mse;
  FittedOutcomeModel m = FitBoosted(ds, "y", bp, &mse);
  ASSERT_EQ(mse.size(), 30u);
  for (size_t r = 1; r < mse.size(); ++r) EXPECT_LE(mse[r], mse[r - 1] + 1e-15);
  EXPECT_NEAR(m.training_mse(), Mse(m, ds, "y"), 1e-12);
  bp.l1 = 10.0;  // every leaf value is thresholded to zero
  auto flat = FitBoosted(ds, "y", bp).PredictUnits(ds);
  for (double p : flat) EXPECT_NEAR(p, flat[0], 1e-15);
}

TEST(OutcomeModelsTest, JsonRoundTripPreservesPredictions) {
  ExperimentDataset ds = ThreeArmData(2000, 8);
  ForestParams fp;
  fp.num_trees = 5;
  BoostParams bp;
  bp.rounds = 5;
  std::vector<FittedOutcomeModel> models = {
      FitOls(ds, "y"), FitLasso(ds, "y", 1e-3), FitCart(ds, "y", CartParams{}),
      FitRandomForest(ds, "y", fp), FitBoosted(ds, "y", bp)};
  for (const auto& m : models) {
    FittedOutcomeModel back = FittedOutcomeModel::FromJson(m.ToJson());
    EXPECT_EQ(back.kind(), m.kind());
    EXPECT_EQ(back.PredictCells(ds), m.PredictCells(ds))
        << OutcomeModelKindName(m.kind());
  }
}

TEST(OutcomeModelsTest, PredictByLabels) {
  ExperimentDataset ds = testing::FromText(
      "g,arm,y\na,t,3\nb,t,5\na,c,1\nb,c,1\n", {"c", "t"});
  FittedOutcomeModel m = FitCart(ds, "y", CartParams{});
  EXPECT_DOUBLE_EQ(m.Predict({{"g", "b"}}, 1), 5.0);
  EXPECT_DOUBLE_EQ(m.Predict({{"g", "a"}}, 0), 1.0);
}

TEST(OutcomeModelsTest, MseByHand) {
  ExperimentDataset ds = testing::FromText(
      "g,arm,y\na,t,3\nb,t,5\na,c,1\nb,c,1\n", {"c", "t"});
  CartParams stump;
  stump.complexity = std::numeric_limits<double>::infinity();
  // Prediction 2.5 everywhere: (0.25 + 6.25 + 2.25 + 2.25) / 4.
  EXPECT_DOUBLE_EQ(Mse(FitCart(ds, "y", stump), ds, "y"), 11.0 / 4.0);
}

TEST(OutcomeModelsTest, RejectsBadParameters) {
  ExperimentDataset ds = ThreeArmData(500, 9);
  CartParams cp;
  cp.complexity = -1;
  EXPECT_THROW(FitCart(ds, "y", cp), Error);
  EXPECT_THROW(FitLasso(ds, "y", -1.0), Error);
  EXPECT_THROW(FitOls(ds, "missing"), Error);
}

TEST(OutcomeModelsTest, TuneLassoReportsWholePath) {
  ExperimentDataset ds = ThreeArmData(3000, 10);
  CvReport r = TuneLasso(ds, "y");
  EXPECT_EQ(r.mean_loss.size(), 98u);
  EXPECT_EQ(r.fold_loss.at(0).size(), 5u);
  EXPECT_EQ(r.chosen, CvReport::ArgMin(r.mean_loss));
  // With a real signal the heaviest penalty is not the best.
  EXPECT_LT(r.mean_loss[r.chosen], r.mean_loss.front());
}

}  // namespace
}  // namespace uplift
