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

#include <algorithm>
#include <cmath>
#include <limits>

#include "uplift/error.h"
#include "uplift/linear.h"
#include "uplift/parallel.h"
#include "uplift/rng.h"

namespace uplift {
namespace {

constexpr int kModelFormatVersion = 1;

// Within-row sum of squares of each design row; constant for a dataset.
std::vector<double> WithinSse(const OutcomeDesign& d) {
  std::vector<double> out(d.weight.size(), 0.0);
  for (size_t g = 0; g < out.size(); ++g) {
    if (d.weight[g] <= 0) continue;
    out[g] = std::max(0.0, d.yysum[g] - d.ysum[g] * d.ysum[g] / d.weight[g]);
  }
  return out;
}

// MSE of per-row predictions: within SSE plus w (mean - prediction)^2.
double GroupedMse(const OutcomeDesign& d, std::span<const double> within,
                  std::span<const double> prediction) {
  double sse = 0.0, n = 0.0;
  for (size_t g = 0; g < d.weight.size(); ++g) {
    const double w = d.weight[g];
    if (w <= 0) continue;
    const double diff = d.ysum[g] / w - prediction[g];
    sse += within[g] + w * diff * diff;
    n += w;
  }
  return sse / n;
}

std::vector<RegressionStats> RowStats(const OutcomeDesign& d) {
  std::vector<RegressionStats> s(d.weight.size());
  for (size_t g = 0; g < s.size(); ++g) s[g] = {d.weight[g], d.ysum[g]};
  return s;
}

double RootSse(const OutcomeDesign& d) {
  double n = 0, s = 0, ss = 0;
  for (size_t g = 0; g < d.weight.size(); ++g) {
    n += d.weight[g];
    s += d.ysum[g];
    ss += d.yysum[g];
  }
  return n > 0 ? std::max(0.0, ss - s * s / n) : 0.0;
}

double TotalWeight(const OutcomeDesign& d) {
  double n = 0;
  for (double w : d.weight) n += w;
  return n;
}

double SoftThreshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

std::string InteractionsName(Interactions i) {
  switch (i) {
    case Interactions::kNone:
      return "none";
    case Interactions::kNonBaseline:
      return "non_baseline";
    case Interactions::kAllArms:
      return "all_arms";
  }
  return "none";
}

std::vector<double> LinearRowPredictions(const OutcomeDesign& d,
                                         const LinearFit& fit) {
  std::vector<double> out(d.rows.size());
  for (int g = 0; g < d.rows.size(); ++g) {
    double v = fit.intercept;
    for (int c : d.rows.row(g)) v += fit.coef[c];
    out[g] = v;
  }
  return out;
}

FittedOutcomeModel FitLinear(const ExperimentDataset& ds,
                             std::string_view outcome, bool lasso,
                             double lambda, Interactions interactions) {
  OutcomeDesign d = BuildOutcomeDesign(ds, outcome, interactions);
  const Gram g = ComputeGram(d.rows, d.weight, d.ysum, d.yysum);
  LinearFit fit = lasso ? SolveLasso(g, lambda) : SolveOls(g);
  const auto within = WithinSse(d);
  const double mse = GroupedMse(d, within, LinearRowPredictions(d, fit));
  nlohmann::json hp = {{"interactions", InteractionsName(interactions)}};
  if (lasso) {
    hp["lambda"] = lambda;
    hp["lambda_max"] = LassoLambdaMax(g);
  }
  return FittedOutcomeModel::Linear(
      lasso ? OutcomeModelKind::kLasso : OutcomeModelKind::kOls,
      std::move(d.encoder), fit.intercept, std::move(fit.coef), std::move(hp),
      mse);
}

}  // namespace

std::string_view OutcomeModelKindName(OutcomeModelKind kind) {
  switch (kind) {
    case OutcomeModelKind::kOls:
      return "ols";
    case OutcomeModelKind::kLasso:
      return "lasso";
    case OutcomeModelKind::kCart:
      return "cart";
    case OutcomeModelKind::kRandomForest:
      return "random_forest";
    case OutcomeModelKind::kBoostedTrees:
      return "boosted_trees";
  }
  return "ols";
}

OutcomeModelKind ParseOutcomeModelKind(std::string_view name) {
  for (auto k : {OutcomeModelKind::kOls, OutcomeModelKind::kLasso,
                 OutcomeModelKind::kCart, OutcomeModelKind::kRandomForest,
                 OutcomeModelKind::kBoostedTrees}) {
    if (OutcomeModelKindName(k) == name) return k;
  }
  throw ConfigError("unknown outcome model kind '" + std::string(name) + "'");
}

OutcomeDesign BuildOutcomeDesign(const ExperimentDataset& ds,
                                 std::string_view outcome,
                                 Interactions interactions) {
  if (ds.empty()) throw DataError("cannot fit an outcome model on no data");
  const auto y = ds.outcome(outcome);
  OutcomeDesign d{Encoder(ds.schema_ptr(), ds.arm_labels(), interactions),
                  FeatureRows(0), {}, {}, {}, {}};
  d.rows = FeatureRows(d.encoder.num_columns());
  const int num_arms = ds.num_arms();
  std::vector<int> row_of(static_cast<size_t>(ds.num_cells()) * num_arms, -1);
  std::vector<int> active;
  d.unit_row.resize(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    const size_t key = static_cast<size_t>(ds.cell(i)) * num_arms + ds.arm(i);
    int& g = row_of[key];
    if (g < 0) {
      g = d.rows.size();
      d.encoder.ActiveColumns(ds.codes(i), ds.arm(i), &active);
      d.rows.Add(active);
      d.weight.push_back(0);
      d.ysum.push_back(0);
      d.yysum.push_back(0);
    }
    d.unit_row[i] = g;
    d.weight[g] += 1.0;
    d.ysum[g] += y[i];
    d.yysum[g] += y[i] * y[i];
  }
  return d;
}

FittedOutcomeModel FittedOutcomeModel::Linear(OutcomeModelKind kind,
                                              Encoder encoder, double intercept,
                                              Eigen::VectorXd coef,
                                              nlohmann::json hyperparameters,
                                              double training_mse) {
  if (coef.size() != encoder.num_columns()) {
    throw ParseError("coefficient count does not match encoder columns");
  }
  FittedOutcomeModel m;
  m.fitted_ = true;
  m.kind_ = kind;
  m.encoder_ = std::move(encoder);
  m.intercept_ = intercept;
  m.coef_ = std::move(coef);
  m.hyperparameters_ = std::move(hyperparameters);
  m.training_mse_ = training_mse;
  return m;
}

FittedOutcomeModel FittedOutcomeModel::Trees(OutcomeModelKind kind,
                                             Encoder encoder, double base_score,
                                             std::vector<BinaryTree> trees,
                                             nlohmann::json hyperparameters,
                                             double training_mse) {
  if (trees.empty() && kind != OutcomeModelKind::kBoostedTrees) {
    throw ParseError("tree model without trees");
  }
  FittedOutcomeModel m;
  m.fitted_ = true;
  m.kind_ = kind;
  m.encoder_ = std::move(encoder);
  m.base_score_ = base_score;
  m.trees_ = std::move(trees);
  m.hyperparameters_ = std::move(hyperparameters);
  m.training_mse_ = training_mse;
  return m;
}

void FittedOutcomeModel::RequireFitted() const {
  if (!fitted_) throw RuntimeError("outcome model is not fitted");
}

double FittedOutcomeModel::PredictActive(std::span<const int> active) const {
  switch (kind_) {
    case OutcomeModelKind::kOls:
    case OutcomeModelKind::kLasso: {
      double v = intercept_;
      for (int c : active) v += coef_[c];
      return v;
    }
    case OutcomeModelKind::kCart:
      return trees_[0].Predict(active);
    case OutcomeModelKind::kRandomForest: {
      double s = 0.0;
      for (const auto& t : trees_) s += t.Predict(active);
      return s / static_cast<double>(trees_.size());
    }
    case OutcomeModelKind::kBoostedTrees: {
      double s = base_score_;
      for (const auto& t : trees_) s += t.Predict(active);
      return s;
    }
  }
  return 0.0;
}

double FittedOutcomeModel::Predict(std::span<const int> codes, int arm) const {
  RequireFitted();
  if (arm < 0 || arm >= num_arms()) {
    throw DataError("arm index " + std::to_string(arm) + " out of range");
  }
  if (static_cast<int>(codes.size()) != encoder_.schema().num_variables()) {
    throw DataError("covariate vector has the wrong length");
  }
  std::vector<int> active;
  encoder_.ActiveColumns(codes, arm, &active);
  return PredictActive(active);
}

double FittedOutcomeModel::Predict(
    const std::map<std::string, std::string>& covariates, int arm) const {
  RequireFitted();
  const Schema& s = encoder_.schema();
  std::vector<int> codes(s.num_variables(), -1);
  for (int v = 0; v < s.num_variables(); ++v) {
    auto it = covariates.find(s.variables[v]);
    const std::string label = (it == covariates.end() || it->second.empty())
                                  ? std::string(kUnknownCategory)
                                  : it->second;
    codes[v] = s.CategoryIndex(v, label);
  }
  return Predict(codes, arm);
}

std::vector<double> FittedOutcomeModel::PredictCells(
    const ExperimentDataset& ds) const {
  RequireFitted();
  const int nv = encoder_.schema().num_variables();
  const int w = num_arms();
  const std::vector<int> codes = TranslateCells(ds, encoder_.schema());
  std::vector<double> out(static_cast<size_t>(ds.num_cells()) * w);
  std::vector<int> active;
  for (int c = 0; c < ds.num_cells(); ++c) {
    std::span<const int> cc(codes.data() + static_cast<size_t>(c) * nv, nv);
    for (int a = 0; a < w; ++a) {
      encoder_.ActiveColumns(cc, a, &active);
      out[static_cast<size_t>(c) * w + a] = PredictActive(active);
    }
  }
  return out;
}

std::vector<double> FittedOutcomeModel::PredictUnits(
    const ExperimentDataset& ds) const {
  RequireFitted();
  std::vector<int> arm_map(ds.num_arms());
  for (int a = 0; a < ds.num_arms(); ++a) {
    const auto& labels = encoder_.arm_labels();
    auto it = std::find(labels.begin(), labels.end(), ds.arm_labels()[a]);
    arm_map[a] = it == labels.end() ? -1
                                    : static_cast<int>(it - labels.begin());
  }
  const std::vector<double> cells = PredictCells(ds);
  const int w = num_arms();
  std::vector<double> out(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    const int a = arm_map[ds.arm(i)];
    if (a < 0) {
      throw DataError("arm '" + ds.arm_labels()[ds.arm(i)] +
                      "' is unknown to the model");
    }
    out[i] = cells[static_cast<size_t>(ds.cell(i)) * w + a];
  }
  return out;
}

nlohmann::json FittedOutcomeModel::ToJson() const {
  RequireFitted();
  nlohmann::json j;
  j["format"] = "uplift.outcome_model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(OutcomeModelKindName(kind_));
  j["encoder"] = encoder_.ToJson();
  j["hyperparameters"] = hyperparameters_;
  j["training_mse"] = training_mse_;
  if (kind_ == OutcomeModelKind::kOls || kind_ == OutcomeModelKind::kLasso) {
    j["intercept"] = intercept_;
    j["coefficients"] =
        std::vector<double>(coef_.data(), coef_.data() + coef_.size());
  } else {
    j["base_score"] = base_score_;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.ToJson());
    j["trees"] = std::move(trees);
  }
  return j;
}

FittedOutcomeModel FittedOutcomeModel::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "uplift.outcome_model") {
      throw ParseError("not an outcome model document");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError("unsupported outcome model version");
    }
    const OutcomeModelKind kind =
        ParseOutcomeModelKind(j.at("kind").get<std::string>());
    Encoder enc = Encoder::FromJson(j.at("encoder"));
    if (kind == OutcomeModelKind::kOls || kind == OutcomeModelKind::kLasso) {
      const auto c = j.at("coefficients").get<std::vector<double>>();
      return Linear(kind, std::move(enc), j.at("intercept").get<double>(),
                    Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()),
                    j.at("hyperparameters"), j.at("training_mse").get<double>());
    }
    std::vector<BinaryTree> trees;
    for (const auto& t : j.at("trees")) {
      trees.push_back(BinaryTree::FromJson(t));
      for (const auto& n : trees.back().nodes) {
        if (n.column >= enc.num_columns()) {
          throw ParseError("tree splits on an unknown column");
        }
      }
    }
    return Trees(kind, std::move(enc), j.at("base_score").get<double>(),
                 std::move(trees), j.at("hyperparameters"),
                 j.at("training_mse").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed outcome model: ") + e.what());
  }
}

FittedOutcomeModel FitOls(const ExperimentDataset& ds, std::string_view outcome,
                          Interactions interactions) {
  return FitLinear(ds, outcome, false, 0.0, interactions);
}

FittedOutcomeModel FitLasso(const ExperimentDataset& ds,
                            std::string_view outcome, double lambda,
                            Interactions interactions) {
  if (!(lambda >= 0.0)) throw ConfigError("lasso penalty must be >= 0");
  return FitLinear(ds, outcome, true, lambda, interactions);
}

BinaryTree FitRegressionTree(const FeatureRows& rows,
                             std::span<const RegressionStats> stats,
                             const RegressionCriterion& criterion,
                             const GrowOptions& options) {
  return GrowTree(rows, stats, criterion, options).tree;
}

int ForestMtry(MaxFeatures max_features, int num_columns) {
  if (max_features == MaxFeatures::kAll) return 0;
  return std::max(1, static_cast<int>(std::floor(std::sqrt(
                         static_cast<double>(num_columns)))));
}

std::vector<BinaryTree> FitForestTrees(const FeatureRows& rows,
                                       std::span<const int> unit_row,
                                       std::span<const double> y,
                                       const ForestParams& params) {
  if (params.num_trees < 1) throw ConfigError("forest needs n_tree >= 1");
  if (!(params.min_leaf >= 1.0)) throw ConfigError("min_leaf must be >= 1");
  const size_t n = unit_row.size();
  double s = 0, ss = 0;
  for (size_t i = 0; i < n; ++i) {
    s += y[i];
    ss += y[i] * y[i];
  }
  const double root_sse =
      n > 0 ? std::max(0.0, ss - s * s / static_cast<double>(n)) : 0.0;
  RegressionCriterion crit;
  crit.min_leaf_weight = params.min_leaf;
  crit.min_split_weight = std::max(params.min_split, 2.0 * params.min_leaf);
  crit.min_reduction = ReductionFloor(root_sse, static_cast<double>(n));
  const int mtry = ForestMtry(params.max_features, rows.num_columns());

  std::vector<BinaryTree> trees(params.num_trees);
  ParallelFor(params.num_trees, params.jobs, [&](int64_t b) {
    std::vector<RegressionStats> stats(rows.size());
    if (params.bootstrap) {
      Rng rng(DeriveSeed(params.seed, 2 * b));
      for (size_t k = 0; k < n; ++k) {
        const size_t i = rng.UniformIndex(n);
        stats[unit_row[i]] += RegressionStats{1.0, y[i]};
      }
    } else {
      for (size_t i = 0; i < n; ++i) {
        stats[unit_row[i]] += RegressionStats{1.0, y[i]};
      }
    }
    GrowOptions opt;
    opt.max_depth = params.max_depth;
    opt.mtry = mtry;
    opt.seed = DeriveSeed(params.seed, 2 * b + 1);
    trees[b] = FitRegressionTree(rows, stats, crit, opt);
  });
  return trees;
}

FittedOutcomeModel FitCart(const ExperimentDataset& ds, std::string_view outcome,
                           const CartParams& params) {
  if (!(params.complexity >= 0.0)) {
    throw ConfigError("complexity parameter must be >= 0");
  }
  if (!(params.min_leaf >= 1.0)) throw ConfigError("min_leaf must be >= 1");
  OutcomeDesign d = BuildOutcomeDesign(ds, outcome, Interactions::kNone);
  const double root_sse = RootSse(d);
  RegressionCriterion crit;
  crit.min_leaf_weight = params.min_leaf;
  crit.min_split_weight = 2.0 * params.min_leaf;
  const double floor = ReductionFloor(root_sse, TotalWeight(d));
  crit.min_reduction =
      std::isinf(params.complexity)
          ? std::numeric_limits<double>::infinity()
          : std::max(params.complexity * root_sse, floor);
  GrowOptions opt;
  opt.max_depth = params.max_depth;
  const auto stats = RowStats(d);
  BinaryTree tree = FitRegressionTree(d.rows, stats, crit, opt);

  std::vector<double> pred(d.rows.size());
  for (int g = 0; g < d.rows.size(); ++g) pred[g] = tree.Predict(d.rows.row(g));
  const double mse = GroupedMse(d, WithinSse(d), pred);
  nlohmann::json hp = {{"complexity", std::isinf(params.complexity)
                                          ? nlohmann::json("inf")
                                          : nlohmann::json(params.complexity)},
                       {"min_leaf", params.min_leaf}};
  if (params.max_depth != std::numeric_limits<int>::max()) {
    hp["max_depth"] = params.max_depth;
  }
  std::vector<BinaryTree> trees;
  trees.push_back(std::move(tree));
  return FittedOutcomeModel::Trees(OutcomeModelKind::kCart, std::move(d.encoder),
                                   0.0, std::move(trees), std::move(hp), mse);
}

FittedOutcomeModel FitRandomForest(const ExperimentDataset& ds,
                                   std::string_view outcome,
                                   const ForestParams& params) {
  OutcomeDesign d = BuildOutcomeDesign(ds, outcome, Interactions::kNone);
  const auto y = ds.outcome(outcome);
  std::vector<BinaryTree> trees = FitForestTrees(d.rows, d.unit_row, y, params);

  std::vector<double> pred(d.rows.size(), 0.0);
  for (int g = 0; g < d.rows.size(); ++g) {
    double s = 0.0;
    for (const auto& t : trees) s += t.Predict(d.rows.row(g));
    pred[g] = s / static_cast<double>(trees.size());
  }
  const double mse = GroupedMse(d, WithinSse(d), pred);
  nlohmann::json hp = {
      {"num_trees", params.num_trees},
      {"max_features",
       params.max_features == MaxFeatures::kAll ? "all" : "sqrt"},
      {"min_split", params.min_split},
      {"min_leaf", params.min_leaf},
      {"bootstrap", params.bootstrap},
      {"seed", params.seed}};
  if (params.max_depth != std::numeric_limits<int>::max()) {
    hp["max_depth"] = params.max_depth;
  }
  return FittedOutcomeModel::Trees(OutcomeModelKind::kRandomForest,
                                   std::move(d.encoder), 0.0, std::move(trees),
                                   std::move(hp), mse);
}

FittedOutcomeModel FitBoosted(const ExperimentDataset& ds,
                              std::string_view outcome, const BoostParams& params,
                              std::vector<double>* round_mse) {
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw ConfigError("learning rate must lie in (0, 1]");
  }
  if (params.max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (params.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (!(params.l1 >= 0.0)) throw ConfigError("L1 penalty must be >= 0");
  OutcomeDesign d = BuildOutcomeDesign(ds, outcome, Interactions::kNone);
  const double n = TotalWeight(d);
  double total = 0.0;
  for (double s : d.ysum) total += s;
  const double base = total / n;
  const auto within = WithinSse(d);

  RegressionCriterion crit;
  crit.min_leaf_weight = params.min_leaf;
  crit.min_split_weight = 2.0 * params.min_leaf;
  crit.min_reduction = ReductionFloor(RootSse(d), n);
  GrowOptions opt;
  opt.max_depth = params.max_depth;

  std::vector<double> f(d.rows.size(), base);
  std::vector<RegressionStats> resid(d.rows.size());
  std::vector<BinaryTree> trees;
  if (round_mse) round_mse->clear();
  for (int t = 0; t < params.rounds; ++t) {
    for (int g = 0; g < d.rows.size(); ++g) {
      resid[g] = {d.weight[g], d.ysum[g] - d.weight[g] * f[g]};
    }
    BinaryTree tree = FitRegressionTree(d.rows, resid, crit, opt);
    for (auto& node : tree.nodes) {
      node.value = params.learning_rate * SoftThreshold(node.value, params.l1);
    }
    for (int g = 0; g < d.rows.size(); ++g) f[g] += tree.Predict(d.rows.row(g));
    trees.push_back(std::move(tree));
    if (round_mse) round_mse->push_back(GroupedMse(d, within, f));
  }
  const double mse = GroupedMse(d, within, f);
  nlohmann::json hp = {{"learning_rate", params.learning_rate},
                       {"max_depth", params.max_depth},
                       {"l1", params.l1},
                       {"rounds", params.rounds},
                       {"min_leaf", params.min_leaf}};
  return FittedOutcomeModel::Trees(OutcomeModelKind::kBoostedTrees,
                                   std::move(d.encoder), base, std::move(trees),
                                   std::move(hp), mse);
}

double Mse(const FittedOutcomeModel& model, const ExperimentDataset& ds,
           std::string_view outcome) {
  if (ds.empty()) throw DataError("MSE of an empty dataset");
  const auto y = ds.outcome(outcome);
  const auto pred = model.PredictUnits(ds);
  double s = 0.0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const double e = pred[i] - y[i];
    s += e * e;
  }
  return s / static_cast<double>(ds.size());
}

CvReport TuneLasso(const ExperimentDataset& ds, std::string_view outcome,
                   std::vector<double> lambdas, int folds, uint64_t seed,
                   Interactions interactions) {
  const OutcomeDesign d = BuildOutcomeDesign(ds, outcome, interactions);
  const auto y = ds.outcome(outcome);
  if (lambdas.empty()) {
    const Gram full = ComputeGram(d.rows, d.weight, d.ysum, d.yysum);
    lambdas = LassoLambdaPath(LassoLambdaMax(full));
  }
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lasso penalty must be >= 0");
  }
  const FoldAssignment fa = MakeFolds(ds, folds, seed);

  CvReport report;
  report.estimator = "lasso";
  report.folds = folds;
  report.seed = fa.seed;
  for (double l : lambdas) report.grid.push_back({{"lambda", l}});
  report.fold_loss.assign(lambdas.size(), std::vector<double>(folds, 0.0));

  const size_t rows = d.weight.size();
  for (int k = 0; k < folds; ++k) {
    std::vector<double> tw(rows, 0), ts(rows, 0), tss(rows, 0);
    std::vector<double> vw(rows, 0), vs(rows, 0), vss(rows, 0);
    for (size_t i = 0; i < ds.size(); ++i) {
      const int g = d.unit_row[i];
      const bool valid = fa.fold_of[i] == k;
      (valid ? vw : tw)[g] += 1.0;
      (valid ? vs : ts)[g] += y[i];
      (valid ? vss : tss)[g] += y[i] * y[i];
    }
    const Gram g = ComputeGram(d.rows, tw, ts, tss);
    double vn = 0;
    double within = 0;
    for (size_t r = 0; r < rows; ++r) {
      vn += vw[r];
      if (vw[r] > 0) within += std::max(0.0, vss[r] - vs[r] * vs[r] / vw[r]);
    }
    LinearFit warm;
    bool have_warm = false;
    for (size_t l = 0; l < lambdas.size(); ++l) {
      LinearFit fit = SolveLasso(g, lambdas[l], 1e-7, have_warm ? &warm : nullptr);
      double sse = within;
      for (size_t r = 0; r < rows; ++r) {
        if (vw[r] <= 0) continue;
        double pred = fit.intercept;
        for (int c : d.rows.row(static_cast<int>(r))) pred += fit.coef[c];
        const double diff = vs[r] / vw[r] - pred;
        sse += vw[r] * diff * diff;
      }
      report.fold_loss[l][k] = sse / vn;
      warm = std::move(fit);
      have_warm = true;
    }
  }
  for (const auto& row : report.fold_loss) {
    double s = 0;
    for (double v : row) s += v;
    report.mean_loss.push_back(s / folds);
  }
  report.chosen = CvReport::ArgMin(report.mean_loss);
  return report;
}

}  // namespace uplift
