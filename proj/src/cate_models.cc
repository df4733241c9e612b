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

#include "uplift/cate_models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uplift/csv.h"
#include "uplift/error.h"
#include "uplift/parallel.h"
#include "uplift/rng.h"
#include "uplift/tuning.h"

namespace uplift {
namespace {

constexpr int kCateFormatVersion = 1;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct CausalTreeCriterion {
  using Stats = CausalStats;
  double q = 1;
  double min_gain = 0;

  bool Splittable(const Stats& s, int) const {
    return s.nt >= 2 * q && s.nc >= 2 * q;
  }
  double Gain(const Stats& p, const Stats& l, const Stats& r) const {
    if (l.nt < q || l.nc < q || r.nt < q || r.nc < q) return kNegInf;
    return CausalTreeGain(p, l, r);
  }
  bool Accept(double gain) const { return gain > min_gain; }
  void Fill(BinaryTree::Node* node, const Stats& s) const {
    node->value = s.Tau();
    node->weight = s.n();
  }
};

struct CausalForestCriterion {
  using Stats = ResidualStats;
  double q = 1;
  double alpha = 0;

  bool Splittable(const Stats& s, int) const {
    return s.nt >= 2 * q && s.nc >= 2 * q;
  }
  double Gain(const Stats& p, const Stats& l, const Stats& r) const {
    if (l.nt < q || l.nc < q || r.nt < q || r.nc < q) return kNegInf;
    if (l.n < alpha * p.n || r.n < alpha * p.n) return kNegInf;
    return CausalForestGain(p, l, r);
  }
  bool Accept(double gain) const { return gain > 0.0; }
  void Fill(BinaryTree::Node* node, const Stats& s) const {
    node->value = s.Tau();
    node->weight = s.n;
  }
};

// Distinct covariate vectors of a dataset as encoded rows.
struct CellRows {
  FeatureRows rows{0};
  std::vector<int> unit_row;
};

CellRows BuildCellRows(const ExperimentDataset& ds, const Encoder& enc) {
  CellRows out;
  out.rows = FeatureRows(enc.num_covariate_columns());
  std::vector<int> row_of(ds.num_cells(), -1);
  std::vector<int> active;
  out.unit_row.resize(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    int& r = row_of[ds.cell(i)];
    if (r < 0) {
      r = out.rows.size();
      enc.CovariateColumns(ds.codes(i), &active);
      out.rows.Add(active);
    }
    out.unit_row[i] = r;
  }
  return out;
}

void CheckPair(const ExperimentDataset& ds, int treated, int control) {
  if (treated < 0 || control < 0 || treated >= ds.num_arms() ||
      control >= ds.num_arms() || treated == control) {
    throw ConfigError("invalid arm pair (" + std::to_string(treated) + ", " +
                      std::to_string(control) + ")");
  }
}

nlohmann::json ComplexityJson(double c) {
  return std::isinf(c) ? nlohmann::json("inf") : nlohmann::json(c);
}

// Treated share of the pair: known propensities when declared, else the
// empirical share.
double PairTreatedShare(const ExperimentDataset& pair_ds, int treated,
                        int control) {
  if (pair_ds.known_propensities()) {
    const auto& p = *pair_ds.known_propensities();
    return p[treated] / (p[treated] + p[control]);
  }
  double nt = 0, n = 0;
  for (size_t i = 0; i < pair_ds.size(); ++i) {
    n += 1;
    nt += pair_ds.arm(i) == treated;
  }
  if (n == 0) throw DataError("pair has no units");
  return nt / n;
}

std::vector<int64_t> DrawSubsample(uint64_t seed, int64_t n, int64_t m) {
  std::vector<int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int64_t k = 0; k < m; ++k) {
    const int64_t j = k + static_cast<int64_t>(rng.UniformIndex(n - k));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Out-of-fold forest predictions of `target` from covariates.
std::vector<double> OutOfFold(const ExperimentDataset& ds,
                              const CellRows& cells,
                              std::span<const double> target, int folds,
                              const ForestParams& base, uint64_t seed) {
  const FoldAssignment fa = MakeFolds(ds, folds, seed, false);
  std::vector<double> out(ds.size(), 0.0);
  for (int k = 0; k < folds; ++k) {
    std::vector<int> unit_row;
    std::vector<double> y;
    for (size_t i = 0; i < ds.size(); ++i) {
      if (fa.fold_of[i] == k) continue;
      unit_row.push_back(cells.unit_row[i]);
      y.push_back(target[i]);
    }
    ForestParams p = base;
    p.seed = DeriveSeed(seed, 100 + k);
    const auto trees = FitForestTrees(cells.rows, unit_row, y, p);
    std::vector<double> pred(cells.rows.size(), 0.0);
    for (int r = 0; r < cells.rows.size(); ++r) {
      double s = 0;
      for (const auto& t : trees) s += t.Predict(cells.rows.row(r));
      pred[r] = s / static_cast<double>(trees.size());
    }
    for (size_t i = 0; i < ds.size(); ++i) {
      if (fa.fold_of[i] == k) out[i] = pred[cells.unit_row[i]];
    }
  }
  return out;
}

nlohmann::json ForestParamsJson(const ForestParams& p) {
  return {{"num_trees", p.num_trees},
          {"max_features", p.max_features == MaxFeatures::kAll ? "all" : "sqrt"},
          {"min_split", p.min_split},
          {"min_leaf", p.min_leaf}};
}

}  // namespace

std::string_view CateModelKindName(CateModelKind kind) {
  return kind == CateModelKind::kCausalTree ? "causal_tree" : "causal_forest";
}

CateModelKind ParseCateModelKind(std::string_view name) {
  if (name == "causal_tree") return CateModelKind::kCausalTree;
  if (name == "causal_forest") return CateModelKind::kCausalForest;
  throw ConfigError("unknown CATE model kind '" + std::string(name) + "'");
}

double CausalStats::TauVariance() const {
  auto var = [](double n, double s, double ss) {
    if (n < 2) return 0.0;
    return std::max(0.0, (ss - s * s / n) / (n - 1));
  };
  double v = 0;
  if (nt > 0) v += var(nt, st, sst) / nt;
  if (nc > 0) v += var(nc, sc, ssc) / nc;
  return v;
}

CausalStats& CausalStats::operator+=(const CausalStats& o) {
  nt += o.nt;
  st += o.st;
  sst += o.sst;
  nc += o.nc;
  sc += o.sc;
  ssc += o.ssc;
  return *this;
}

CausalStats operator-(CausalStats a, const CausalStats& b) {
  a.nt -= b.nt;
  a.st -= b.st;
  a.sst -= b.sst;
  a.nc -= b.nc;
  a.sc -= b.sc;
  a.ssc -= b.ssc;
  return a;
}

double CausalTreeGain(const CausalStats& parent, const CausalStats& left,
                      const CausalStats& right) {
  const double tl = left.Tau(), tr = right.Tau(), tp = parent.Tau();
  return left.n() * tl * tl + right.n() * tr * tr - parent.n() * tp * tp;
}

ResidualStats& ResidualStats::operator+=(const ResidualStats& o) {
  n += o.n;
  nt += o.nt;
  nc += o.nc;
  swy += o.swy;
  sww += o.sww;
  return *this;
}

ResidualStats operator-(ResidualStats a, const ResidualStats& b) {
  a.n -= b.n;
  a.nt -= b.nt;
  a.nc -= b.nc;
  a.swy -= b.swy;
  a.sww -= b.sww;
  return a;
}

double CausalForestGain(const ResidualStats& parent, const ResidualStats& left,
                        const ResidualStats& right) {
  const double d = left.Tau() - right.Tau();
  return left.n * right.n / (parent.n * parent.n) * d * d;
}

void PairwiseCateModel::RequireFitted() const {
  if (!fitted_) throw RuntimeError("CATE model is not fitted");
}

double PairwiseCateModel::EstimateActive(std::span<const int> active) const {
  if (kind_ == CateModelKind::kCausalTree) return trees_[0].Predict(active);
  double num = 0, den = 0;
  for (size_t b = 0; b < trees_.size(); ++b) {
    const ResidualStats& s = forest_stats_[b][trees_[b].Leaf(active)];
    num += s.swy / s.n;
    den += s.sww / s.n;
  }
  return den > 0 ? num / den : 0.0;
}

double PairwiseCateModel::Estimate(std::span<const int> codes) const {
  RequireFitted();
  if (static_cast<int>(codes.size()) != encoder_.schema().num_variables()) {
    throw DataError("covariate vector has the wrong length");
  }
  std::vector<int> active;
  encoder_.CovariateColumns(codes, &active);
  return EstimateActive(active);
}

std::vector<double> PairwiseCateModel::EstimateCells(
    const ExperimentDataset& ds) const {
  RequireFitted();
  const int nv = encoder_.schema().num_variables();
  const std::vector<int> codes = TranslateCells(ds, encoder_.schema());
  std::vector<double> out(ds.num_cells());
  std::vector<int> active;
  for (int c = 0; c < ds.num_cells(); ++c) {
    encoder_.CovariateColumns(
        std::span<const int>(codes.data() + static_cast<size_t>(c) * nv, nv),
        &active);
    out[c] = EstimateActive(active);
  }
  return out;
}

std::vector<double> PairwiseCateModel::EstimateUnits(
    const ExperimentDataset& ds) const {
  const auto cells = EstimateCells(ds);
  std::vector<double> out(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) out[i] = cells[ds.cell(i)];
  return out;
}

std::vector<double> PairwiseCateModel::KernelWeights(
    std::span<const int> codes) const {
  RequireFitted();
  if (kind_ != CateModelKind::kCausalForest) {
    throw ConfigError("kernel weights exist only for causal forests");
  }
  if (!training_) {
    throw RuntimeError("kernel weights need the in-memory training data");
  }
  const ForestTrainingData& td = *training_;
  std::vector<int> active;
  encoder_.CovariateColumns(codes, &active);
  const int64_t n = static_cast<int64_t>(td.unit_cell.size());
  std::vector<double> alpha(n, 0.0);
  const double inv_b = 1.0 / static_cast<double>(trees_.size());
  std::vector<int> cell_leaf(td.cells.size());
  for (size_t b = 0; b < trees_.size(); ++b) {
    const int leaf = trees_[b].Leaf(active);
    for (int r = 0; r < td.cells.size(); ++r) {
      cell_leaf[r] = trees_[b].Leaf(td.cells.row(r));
    }
    const auto members = DrawSubsample(td.tree_seeds[b], n, td.subsample_size);
    int64_t count = 0;
    for (int64_t i : members) count += cell_leaf[td.unit_cell[i]] == leaf;
    if (count == 0) continue;
    for (int64_t i : members) {
      if (cell_leaf[td.unit_cell[i]] == leaf) {
        alpha[i] += inv_b / static_cast<double>(count);
      }
    }
  }
  return alpha;
}

PairwiseCateModel FitCausalTree(const ExperimentDataset& ds,
                                std::string_view outcome, int treated,
                                int control, const CausalTreeParams& params) {
  CheckPair(ds, treated, control);
  if (!(params.complexity >= 0.0)) {
    throw ConfigError("complexity parameter must be >= 0");
  }
  if (params.min_arm_count < 1) throw ConfigError("min_arm_count must be >= 1");
  const int pair[] = {treated, control};
  const ExperimentDataset pds = ds.RestrictToArms(pair);
  const auto y = pds.outcome(outcome);
  PairwiseCateModel m;
  m.kind_ = CateModelKind::kCausalTree;
  m.treated_ = treated;
  m.control_ = control;
  m.encoder_ = Encoder(ds.schema_ptr(), ds.arm_labels(), Interactions::kNone);
  const CellRows cells = BuildCellRows(pds, m.encoder_);

  std::vector<CausalStats> stats(cells.rows.size());
  CausalStats root;
  for (size_t i = 0; i < pds.size(); ++i) {
    CausalStats& s = stats[cells.unit_row[i]];
    if (pds.arm(i) == treated) {
      s.nt += 1;
      s.st += y[i];
      s.sst += y[i] * y[i];
    } else {
      s.nc += 1;
      s.sc += y[i];
      s.ssc += y[i] * y[i];
    }
  }
  for (const auto& s : stats) root += s;
  if (root.nt < params.min_arm_count || root.nc < params.min_arm_count) {
    throw ConfigError(
        "min_arm_count " + std::to_string(params.min_arm_count) +
        " exceeds the arm counts of the pair (" +
        std::to_string(static_cast<int64_t>(root.nt)) + " treated, " +
        std::to_string(static_cast<int64_t>(root.nc)) + " control)");
  }
  CausalTreeCriterion crit;
  crit.q = params.min_arm_count;
  const double scale = root.n() * (std::pow(root.st / root.nt, 2) +
                                   std::pow(root.sc / root.nc, 2) + 1e-300);
  crit.min_gain = std::isinf(params.complexity)
                      ? std::numeric_limits<double>::infinity()
                      : std::max(params.complexity * root.n(), 1e-12 * scale);
  GrowOptions opt;
  opt.max_depth = params.max_depth;
  auto grown = GrowTree(cells.rows, std::span<const CausalStats>(stats), crit,
                        opt);
  m.trees_.push_back(std::move(grown.tree));
  m.tree_stats_ = std::move(grown.node_stats);
  m.hyperparameters_ = {{"complexity", ComplexityJson(params.complexity)},
                        {"min_arm_count", params.min_arm_count}};
  if (params.max_depth != std::numeric_limits<int>::max()) {
    m.hyperparameters_["max_depth"] = params.max_depth;
  }
  m.fitted_ = true;
  return m;
}

PairwiseCateModel FitCausalForest(const ExperimentDataset& ds,
                                  std::string_view outcome, int treated,
                                  int control,
                                  const CausalForestParams& params) {
  CheckPair(ds, treated, control);
  if (params.num_trees < 1) throw ConfigError("causal forest needs n_tree >= 1");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) {
    throw ConfigError("subsample fraction must lie in (0, 1]");
  }
  if (params.min_arm_count < 1) throw ConfigError("min_arm_count must be >= 1");
  if (!(params.max_imbalance >= 0.0 && params.max_imbalance < 0.5)) {
    throw ConfigError("max_imbalance must lie in [0, 0.5)");
  }
  if (params.mtry < 0) throw ConfigError("mtry must be >= 0");
  if (params.residual_folds < 2) throw ConfigError("residual folds must be >= 2");
  const int pair[] = {treated, control};
  const ExperimentDataset pds = ds.RestrictToArms(pair);
  const auto y = pds.outcome(outcome);
  const int64_t n = static_cast<int64_t>(pds.size());

  PairwiseCateModel m;
  m.kind_ = CateModelKind::kCausalForest;
  m.treated_ = treated;
  m.control_ = control;
  m.encoder_ = Encoder(ds.schema_ptr(), ds.arm_labels(), Interactions::kNone);
  auto td = std::make_shared<ForestTrainingData>();
  CellRows cells = BuildCellRows(pds, m.encoder_);

  std::vector<double> t(n);
  double nt = 0;
  for (int64_t i = 0; i < n; ++i) {
    t[i] = pds.arm(i) == treated ? 1.0 : 0.0;
    nt += t[i];
  }
  if (nt < params.min_arm_count || n - nt < params.min_arm_count) {
    throw ConfigError("min_arm_count exceeds the arm counts of the pair");
  }

  const std::vector<double> m_hat =
      OutOfFold(pds, cells, y, params.residual_folds, params.residual_forest,
                DeriveSeed(params.seed, 0x6d));
  std::vector<double> e_hat;
  if (params.estimate_propensity) {
    e_hat = OutOfFold(pds, cells, t, params.residual_folds,
                      params.residual_forest, DeriveSeed(params.seed, 0x65));
  } else {
    e_hat.assign(n, PairTreatedShare(pds, treated, control));
  }
  td->residual_y.resize(n);
  td->residual_w.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    td->residual_y[i] = y[i] - m_hat[i];
    td->residual_w[i] = t[i] - e_hat[i];
  }
  td->subsample_size = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(params.subsample * n)));

  CausalForestCriterion crit;
  crit.q = params.min_arm_count;
  crit.alpha = params.max_imbalance;
  const int mtry = params.mtry >= cells.rows.num_columns() ? 0 : params.mtry;

  struct Grown {
    bool valid = false;
    BinaryTree tree;
    std::vector<ResidualStats> stats;
  };
  std::vector<Grown> grown(params.num_trees);
  ParallelFor(params.num_trees, params.jobs, [&](int64_t b) {
    const uint64_t seed = DeriveSeed(params.seed, b);
    const auto members = DrawSubsample(seed, n, td->subsample_size);
    std::vector<ResidualStats> stats(cells.rows.size());
    for (int64_t i : members) {
      ResidualStats& s = stats[cells.unit_row[i]];
      s.n += 1;
      s.nt += t[i];
      s.nc += 1 - t[i];
      s.swy += td->residual_w[i] * td->residual_y[i];
      s.sww += td->residual_w[i] * td->residual_w[i];
    }
    ResidualStats root;
    for (const auto& s : stats) root += s;
    if (root.nt < params.min_arm_count || root.nc < params.min_arm_count ||
        root.sww <= 0) {
      return;
    }
    GrowOptions opt;
    opt.max_depth = params.max_depth;
    opt.mtry = mtry;
    opt.seed = DeriveSeed(seed, 1);
    auto g = GrowTree(cells.rows, std::span<const ResidualStats>(stats), crit,
                      opt);
    grown[b].valid = true;
    grown[b].tree = std::move(g.tree);
    grown[b].stats = std::move(g.node_stats);
  });
  for (int b = 0; b < params.num_trees; ++b) {
    if (!grown[b].valid) continue;
    m.trees_.push_back(std::move(grown[b].tree));
    m.forest_stats_.push_back(std::move(grown[b].stats));
    td->tree_seeds.push_back(DeriveSeed(params.seed, b));
  }
  if (m.trees_.empty()) {
    throw RuntimeError("causal forest grew no valid tree; every subsample "
                       "lacked min_arm_count units of an arm");
  }
  td->cells = std::move(cells.rows);
  td->unit_cell = std::move(cells.unit_row);
  m.training_ = std::move(td);
  m.hyperparameters_ = {{"num_trees", params.num_trees},
                        {"valid_trees", m.trees_.size()},
                        {"subsample", params.subsample},
                        {"mtry", params.mtry},
                        {"min_arm_count", params.min_arm_count},
                        {"max_imbalance", params.max_imbalance},
                        {"seed", params.seed},
                        {"estimate_propensity", params.estimate_propensity},
                        {"residual_folds", params.residual_folds},
                        {"residual_forest", ForestParamsJson(params.residual_forest)}};
  if (params.max_depth != std::numeric_limits<int>::max()) {
    m.hyperparameters_["max_depth"] = params.max_depth;
  }
  m.fitted_ = true;
  return m;
}

PairwiseCateModel FitCate(const ExperimentDataset& ds, std::string_view outcome,
                          int treated, int control, const CateParams& params) {
  if (params.kind == CateModelKind::kCausalTree) {
    return FitCausalTree(ds, outcome, treated, control, params.tree);
  }
  return FitCausalForest(ds, outcome, treated, control, params.forest);
}

nlohmann::json PairwiseCateModel::ToJson() const {
  RequireFitted();
  nlohmann::json j;
  j["format"] = "uplift.cate_model";
  j["version"] = kCateFormatVersion;
  j["kind"] = std::string(CateModelKindName(kind_));
  j["treated"] = treated_;
  j["control"] = control_;
  j["treated_label"] = encoder_.arm_labels()[treated_];
  j["control_label"] = encoder_.arm_labels()[control_];
  j["encoder"] = encoder_.ToJson();
  j["hyperparameters"] = hyperparameters_;
  nlohmann::json trees = nlohmann::json::array();
  for (size_t b = 0; b < trees_.size(); ++b) {
    nlohmann::json t = trees_[b].ToJson();
    nlohmann::json st = nlohmann::json::array();
    if (kind_ == CateModelKind::kCausalTree) {
      for (const auto& s : tree_stats_) {
        st.push_back({s.nt, s.st, s.sst, s.nc, s.sc, s.ssc});
      }
    } else {
      for (const auto& s : forest_stats_[b]) {
        st.push_back({s.n, s.nt, s.nc, s.swy, s.sww});
      }
    }
    trees.push_back({{"tree", t}, {"node_stats", st}});
  }
  j["trees"] = std::move(trees);
  return j;
}

PairwiseCateModel PairwiseCateModel::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "uplift.cate_model") {
      throw ParseError("not a CATE model document");
    }
    if (j.at("version").get<int>() != kCateFormatVersion) {
      throw ParseError("unsupported CATE model version");
    }
    PairwiseCateModel m;
    m.kind_ = ParseCateModelKind(j.at("kind").get<std::string>());
    m.encoder_ = Encoder::FromJson(j.at("encoder"));
    m.treated_ = j.at("treated").get<int>();
    m.control_ = j.at("control").get<int>();
    const int w = m.encoder_.num_arms();
    if (m.treated_ < 0 || m.treated_ >= w || m.control_ < 0 ||
        m.control_ >= w || m.treated_ == m.control_) {
      throw ParseError("CATE model has an invalid arm pair");
    }
    m.hyperparameters_ = j.at("hyperparameters");
    for (const auto& t : j.at("trees")) {
      BinaryTree tree = BinaryTree::FromJson(t.at("tree"));
      const auto& st = t.at("node_stats");
      if (st.size() != tree.nodes.size()) {
        throw ParseError("node statistics do not match the tree");
      }
      for (const auto& node : tree.nodes) {
        if (node.column >= m.encoder_.num_covariate_columns()) {
          throw ParseError("tree splits on an unknown column");
        }
      }
      if (m.kind_ == CateModelKind::kCausalTree) {
        for (const auto& s : st) {
          auto v = s.get<std::vector<double>>();
          if (v.size() != 6) throw ParseError("bad causal tree node statistics");
          m.tree_stats_.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
        }
      } else {
        std::vector<ResidualStats> rs;
        for (const auto& s : st) {
          auto v = s.get<std::vector<double>>();
          if (v.size() != 5 || !(v[0] > 0)) {
            throw ParseError("bad causal forest node statistics");
          }
          rs.push_back({v[0], v[1], v[2], v[3], v[4]});
        }
        m.forest_stats_.push_back(std::move(rs));
      }
      m.trees_.push_back(std::move(tree));
    }
    if (m.trees_.empty() ||
        (m.kind_ == CateModelKind::kCausalTree && m.trees_.size() != 1)) {
      throw ParseError("CATE model has the wrong number of trees");
    }
    m.fitted_ = true;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed CATE model: ") + e.what());
  }
}

void PairwiseCates::Add(PairwiseCateModel model) {
  const int a = std::min(model.treated(), model.control());
  const int b = std::max(model.treated(), model.control());
  if (b >= num_arms_) throw ConfigError("CATE model arm outside the arm set");
  models_[{a, b}] = std::move(model);
}

bool PairwiseCates::Has(int a, int b) const {
  return models_.count({std::min(a, b), std::max(a, b)}) > 0;
}

const PairwiseCateModel& PairwiseCates::Get(int a, int b) const {
  auto it = models_.find({std::min(a, b), std::max(a, b)});
  if (it == models_.end()) {
    throw ConfigError("no CATE model for arm pair (" + std::to_string(a) + ", " +
                      std::to_string(b) + ")");
  }
  return it->second;
}

std::vector<double> PairwiseCates::CellEffects(
    const ExperimentDataset& ds) const {
  const int w = num_arms_;
  const size_t cells = ds.num_cells();
  std::vector<double> out(cells * w * w, 0.0);
  for (int a = 0; a < w; ++a) {
    for (int b = a + 1; b < w; ++b) {
      const PairwiseCateModel& m = Get(a, b);
      const auto est = m.EstimateCells(ds);
      const double sign = m.treated() == a ? 1.0 : -1.0;
      for (size_t c = 0; c < cells; ++c) {
        out[(c * w + a) * w + b] = sign * est[c];
        out[(c * w + b) * w + a] = -sign * est[c];
      }
    }
  }
  return out;
}

nlohmann::json PairwiseCates::ToJson() const {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [key, m] : models_) models.push_back(m.ToJson());
  return {{"format", "uplift.pairwise_cates"},
          {"version", kCateFormatVersion},
          {"num_arms", num_arms_},
          {"models", models}};
}

PairwiseCates PairwiseCates::FromJson(const nlohmann::json& j) {
  try {
    PairwiseCates out(j.at("num_arms").get<int>());
    for (const auto& m : j.at("models")) out.Add(PairwiseCateModel::FromJson(m));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed CATE model set: ") + e.what());
  }
}

PairwiseCates FitAllPairs(const ExperimentDataset& ds, std::string_view outcome,
                          const CateParams& params) {
  const int w = ds.num_arms();
  if (w < 2) throw ConfigError("pairwise CATE models need at least two arms");
  PairwiseCates out(w);
  for (int a = 0; a < w; ++a) {
    for (int b = a + 1; b < w; ++b) {
      CateParams p = params;
      p.forest.seed = DeriveSeed(params.forest.seed, a * w + b);
      try {
        out.Add(FitCate(ds, outcome, a, b, p));
      } catch (const Error& e) {
        throw Error(e.kind(), "pair (" + ds.arm_labels()[a] + ", " +
                                  ds.arm_labels()[b] + "): " + e.what());
      }
    }
  }
  return out;
}

std::vector<CateCdfRow> CateCdfExport(const PairwiseCates& cates,
                                      const ExperimentDataset& ds) {
  std::vector<CateCdfRow> rows;
  const double n = static_cast<double>(ds.size());
  for (const auto& [key, m] : cates.models()) {
    const std::string pair =
        m.arm_labels()[m.treated()] + "_vs_" + m.arm_labels()[m.control()];
    const auto tau = m.EstimateUnits(ds);
    std::vector<int64_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return tau[a] < tau[b]; });
    for (size_t r = 0; r < order.size(); ++r) {
      rows.push_back({pair, order[r], tau[order[r]],
                      static_cast<double>(r + 1) / n});
    }
  }
  return rows;
}

std::string CateCdfCsv(const std::vector<CateCdfRow>& rows) {
  std::string out = CsvLine({"pair", "unit", "tau", "cdf"});
  for (const auto& r : rows) {
    out += CsvLine({r.pair, std::to_string(r.unit), FormatDouble(r.tau),
                         FormatDouble(r.cdf)});
  }
  return out;
}

double CausalTreeValidationScore(const PairwiseCateModel& model,
                                 const ExperimentDataset& validation,
                                 std::string_view outcome) {
  if (model.kind() != CateModelKind::kCausalTree) {
    throw ConfigError("validation score needs a causal tree");
  }
  const BinaryTree& tree = model.trees()[0];
  const auto& train = model.node_stats();
  const std::vector<int> leaf_of_cell = [&] {
    const int nv = model.encoder().schema().num_variables();
    const auto codes = TranslateCells(validation, model.encoder().schema());
    std::vector<int> out(validation.num_cells());
    std::vector<int> active;
    for (int c = 0; c < validation.num_cells(); ++c) {
      model.encoder().CovariateColumns(
          std::span<const int>(codes.data() + static_cast<size_t>(c) * nv, nv),
          &active);
      out[c] = tree.Leaf(active);
    }
    return out;
  }();
  const auto y = validation.outcome(outcome);
  std::vector<CausalStats> held(tree.nodes.size());
  for (size_t i = 0; i < validation.size(); ++i) {
    const int a = validation.arm(i);
    if (a != model.treated() && a != model.control()) continue;
    CausalStats& s = held[leaf_of_cell[validation.cell(i)]];
    if (a == model.treated()) {
      s.nt += 1;
      s.st += y[i];
      s.sst += y[i] * y[i];
    } else {
      s.nc += 1;
      s.sc += y[i];
      s.ssc += y[i] * y[i];
    }
  }
  double score = 0;
  for (size_t node = 0; node < tree.nodes.size(); ++node) {
    const CausalStats& v = held[node];
    if (!tree.is_leaf(static_cast<int>(node)) || v.nt <= 0 || v.nc <= 0) {
      continue;
    }
    const double tau = train[node].Tau();
    score += v.n() * (2 * tau * v.Tau() - tau * tau) -
             v.n() * (train[node].TauVariance() + v.TauVariance());
  }
  return score;
}

double TransformedOutcomeScore(const PairwiseCateModel& model,
                               const ExperimentDataset& validation,
                               std::string_view outcome) {
  const int pair[] = {model.treated(), model.control()};
  const ExperimentDataset pds = validation.RestrictToArms(pair);
  if (pds.empty()) return 0.0;
  const double e = PairTreatedShare(pds, model.treated(), model.control());
  if (!(e > 0 && e < 1)) return 0.0;
  const auto y = pds.outcome(outcome);
  const auto tau = model.EstimateCells(pds);
  double score = 0;
  for (size_t i = 0; i < pds.size(); ++i) {
    const double t = pds.arm(i) == model.treated() ? 1.0 : 0.0;
    const double z = y[i] * (t - e) / (e * (1 - e));
    const double f = tau[pds.cell(i)];
    score += 2 * f * z - f * f;
  }
  return score;
}

}  // namespace uplift
