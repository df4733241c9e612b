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

#include "uplift/tuning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "uplift/error.h"
#include "uplift/estimators.h"
#include "uplift/outcome_models.h"
#include "uplift/parallel.h"
#include "uplift/rng.h"

namespace uplift {
namespace {

constexpr int kMaxFoldRedraws = 5;

using nlohmann::json;

std::string CsvValue(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(10);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

std::string CsvNumber(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Expands {"min", "max", "step"} into an inclusive list of values. Integral
// bounds and step produce integers.
std::vector<json> ExpandRange(const std::string& name, const json& r) {
  for (const char* k : {"min", "max", "step"}) {
    if (!r.contains(k) || !r.at(k).is_number()) {
      throw ConfigError("range for '" + name + "' needs numeric min, max, step");
    }
  }
  const double lo = r.at("min").get<double>();
  const double hi = r.at("max").get<double>();
  const double step = r.at("step").get<double>();
  if (!(step > 0) || hi < lo) {
    throw ConfigError("range for '" + name + "' must have step > 0, max >= min");
  }
  const bool integral = r.at("min").is_number_integer() &&
                        r.at("max").is_number_integer() &&
                        r.at("step").is_number_integer();
  std::vector<json> out;
  const int64_t n = static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9));
  if (n > 100000) throw ConfigError("range for '" + name + "' is too long");
  for (int64_t i = 0; i <= n; ++i) {
    if (integral) {
      out.push_back(r.at("min").get<int64_t>() + i * r.at("step").get<int64_t>());
    } else {
      out.push_back(lo + static_cast<double>(i) * step);
    }
  }
  return out;
}

ParamRange Values(std::string name, std::vector<json> values) {
  return ParamRange{std::move(name), std::move(values)};
}

std::vector<json> IntRange(int lo, int hi, int step) {
  std::vector<json> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

// Number of units in the validation set that belong to the scored arms.
double ScoredUnits(const ExperimentDataset& ds, const SearchTarget& t) {
  double n = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    n += ds.arm(i) == t.treated || ds.arm(i) == t.control;
  }
  return n;
}

json MergeSetting(const json& fixed, const json& candidate) {
  json s = fixed;
  for (const auto& [k, v] : candidate.items()) s[k] = v;
  return s;
}

}  // namespace

std::vector<int64_t> FoldAssignment::TrainRows(int k) const {
  std::vector<int64_t> rows;
  for (size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != k) rows.push_back(static_cast<int64_t>(i));
  }
  return rows;
}

std::vector<int64_t> FoldAssignment::ValidationRows(int k) const {
  std::vector<int64_t> rows;
  for (size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == k) rows.push_back(static_cast<int64_t>(i));
  }
  return rows;
}

FoldAssignment MakeFolds(const ExperimentDataset& ds, int folds, uint64_t seed,
                         bool require_arms) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  const size_t n = ds.size();
  if (n < static_cast<size_t>(folds)) {
    throw DataError("fewer units than cross-validation folds");
  }
  const int arms = ds.num_arms();
  const std::vector<int64_t> counts = ds.ArmCounts();
  std::vector<char> present(arms);
  for (int w = 0; w < arms; ++w) present[w] = counts[w] > 0;
  for (int attempt = 0; attempt <= kMaxFoldRedraws; ++attempt) {
    FoldAssignment fa;
    fa.folds = folds;
    fa.seed = seed + static_cast<uint64_t>(attempt);
    fa.redraws = attempt;
    std::vector<int64_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(fa.seed);
    rng.Shuffle(std::span<int64_t>(perm));
    fa.fold_of.assign(n, 0);
    for (size_t p = 0; p < n; ++p) {
      fa.fold_of[perm[p]] = static_cast<int>(p * folds / n);
    }
    if (!require_arms) return fa;
    std::vector<char> seen(static_cast<size_t>(folds) * arms, 0);
    for (size_t i = 0; i < n; ++i) {
      seen[static_cast<size_t>(fa.fold_of[i]) * arms + ds.arm(i)] = 1;
    }
    bool ok = true;
    for (int k = 0; k < folds && ok; ++k) {
      for (int w = 0; w < arms; ++w) {
        // Arms absent from the data (e.g. after restricting to a pair) are
        // not required.
        if (present[w] && !seen[static_cast<size_t>(k) * arms + w]) ok = false;
      }
    }
    if (ok) return fa;
  }
  throw DataError("could not draw folds containing every arm; data too small");
}

CvResult CrossValidate(const FoldLoss& loss, const ExperimentDataset& ds,
                       const FoldAssignment& folds, int jobs) {
  CvResult r;
  r.fold_loss.assign(folds.folds, 0.0);
  ParallelFor(folds.folds, jobs, [&](int64_t k) {
    const auto train = ds.Subset(folds.TrainRows(static_cast<int>(k)));
    const auto valid = ds.Subset(folds.ValidationRows(static_cast<int>(k)));
    r.fold_loss[k] = loss(train, valid);
  });
  r.mean_loss = std::accumulate(r.fold_loss.begin(), r.fold_loss.end(), 0.0) /
                folds.folds;
  return r;
}

CvResult CrossValidate(const FoldLoss& loss, const ExperimentDataset& ds,
                       int folds, uint64_t seed, int jobs) {
  return CrossValidate(loss, ds, MakeFolds(ds, folds, seed), jobs);
}

size_t CvReport::ArgMin(const std::vector<double>& mean_loss) {
  if (mean_loss.empty()) throw ConfigError("no candidates to choose from");
  size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < mean_loss.size(); ++i) {
    const double l = std::isnan(mean_loss[i])
                         ? std::numeric_limits<double>::infinity()
                         : mean_loss[i];
    if (l < best_loss) {
      best_loss = l;
      best = i;
    }
  }
  return best;
}

std::string CvReport::ToCsv() const {
  std::vector<std::string> params;
  for (const auto& g : grid) {
    for (const auto& [k, v] : g.items()) {
      if (std::find(params.begin(), params.end(), k) == params.end()) {
        params.push_back(k);
      }
    }
  }
  std::ostringstream os;
  os << "candidate";
  for (const auto& p : params) os << ',' << p;
  os << ",mean_loss";
  for (int k = 0; k < folds; ++k) os << ",fold_" << k;
  os << ",chosen\n";
  for (size_t c = 0; c < grid.size(); ++c) {
    os << c;
    for (const auto& p : params) {
      os << ',' << (grid[c].contains(p) ? CsvValue(grid[c].at(p)) : "");
    }
    os << ',' << CsvNumber(mean_loss[c]);
    for (int k = 0; k < folds; ++k) {
      os << ',';
      if (c < fold_loss.size() && static_cast<size_t>(k) < fold_loss[c].size()) {
        os << CsvNumber(fold_loss[c][k]);
      }
    }
    os << ',' << (c == chosen ? 1 : 0) << '\n';
  }
  return os.str();
}

json CvReport::ToJson() const {
  json j;
  j["estimator"] = estimator;
  j["folds"] = folds;
  j["seed"] = seed;
  j["chosen"] = chosen;
  j["chosen_setting"] = grid.empty() ? json::object() : chosen_setting();
  json cands = json::array();
  for (size_t c = 0; c < grid.size(); ++c) {
    json row = {{"setting", grid[c]}};
    row["mean_loss"] = std::isfinite(mean_loss[c]) ? json(mean_loss[c])
                                                   : json("inf");
    json fl = json::array();
    for (double v : fold_loss[c]) {
      fl.push_back(std::isfinite(v) ? json(v) : json("inf"));
    }
    row["fold_loss"] = fl;
    cands.push_back(row);
  }
  j["candidates"] = cands;
  return j;
}

void SearchSpec::Validate() const {
  if (!IsOutcomeEstimator(estimator) && !IsCateEstimator(estimator)) {
    throw ConfigError("unknown estimator '" + estimator + "'");
  }
  if (budget < 1) throw ConfigError("search budget must be >= 1");
  if (folds < 2) throw ConfigError("search needs at least 2 folds");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!fixed.is_object()) throw ConfigError("fixed settings must be an object");
  for (const auto& p : grid) {
    if (p.name.empty()) throw ConfigError("search parameter without a name");
    if (p.values.empty()) {
      throw ConfigError("search parameter '" + p.name + "' has no values");
    }
    if (fixed.contains(p.name)) {
      throw ConfigError("parameter '" + p.name + "' is both fixed and searched");
    }
  }
  json base = fixed;
  for (const auto& p : grid) base[p.name] = p.values.front();
  for (const auto& p : grid) {
    for (const auto& v : p.values) {
      json setting = base;
      setting[p.name] = v;
      CheckSetting(estimator, setting);
    }
  }
  if (grid.empty()) CheckSetting(estimator, base);
}

std::vector<json> SearchSpec::Candidates() const {
  std::vector<const ParamRange*> order;
  for (const auto& p : grid) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const ParamRange* a, const ParamRange* b) {
                     return a->name < b->name;
                   });
  std::vector<json> out = {json::object()};
  for (const ParamRange* pp : order) {
    const ParamRange& p = *pp;
    std::vector<json> next;
    next.reserve(out.size() * p.values.size());
    for (const auto& partial : out) {
      for (const auto& v : p.values) {
        json c = partial;
        c[p.name] = v;
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<json> SearchSpec::SelectCandidates() const {
  std::vector<json> all = Candidates();
  if (all.size() <= static_cast<size_t>(budget)) return all;
  std::vector<size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(DeriveSeed(seed, 0x5eac4));
  // Partial Fisher-Yates: the first `budget` slots become the sample.
  for (int i = 0; i < budget; ++i) {
    const size_t j = i + rng.UniformIndex(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(budget);
  std::sort(idx.begin(), idx.end());
  std::vector<json> out;
  for (size_t i : idx) out.push_back(all[i]);
  return out;
}

SearchSpec SearchSpec::FromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("search spec must be an object");
  if (!j.contains("estimator")) throw ConfigError("search spec needs 'estimator'");
  SearchSpec s;
  s.estimator = j.at("estimator").get<std::string>();
  if (j.contains("grid")) {
    if (!j.at("grid").is_object()) throw ConfigError("'grid' must be an object");
    for (const auto& [name, v] : j.at("grid").items()) {
      if (v.is_array()) {
        s.grid.push_back(Values(name, std::vector<json>(v.begin(), v.end())));
      } else if (v.is_object()) {
        s.grid.push_back(Values(name, ExpandRange(name, v)));
      } else {
        throw ConfigError("grid entry '" + name + "' must be a list or range");
      }
    }
  }
  if (j.contains("fixed")) s.fixed = j.at("fixed");
  if (j.contains("budget")) s.budget = j.at("budget").get<int>();
  if (j.contains("folds")) s.folds = j.at("folds").get<int>();
  if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
  if (j.contains("jobs")) s.jobs = j.at("jobs").get<int>();
  s.Validate();
  return s;
}

json SearchSpec::ToJson() const {
  json g = json::object();
  for (const auto& p : grid) g[p.name] = p.values;
  return {{"estimator", estimator}, {"grid", g},     {"fixed", fixed},
          {"budget", budget},       {"folds", folds}, {"seed", seed},
          {"jobs", jobs}};
}

SearchSpec DefaultSearchSpec(std::string_view estimator) {
  SearchSpec s;
  s.estimator = std::string(estimator);
  if (estimator == "ols") {
    s.budget = 1;
  } else if (estimator == "lasso") {
    // Empty grid: the full-data lambda path is used.
    s.budget = 98;
  } else if (estimator == "cart") {
    s.grid = {Values("complexity", {0.1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4,
                                    3e-5, 1e-5, 0.0})};
    s.budget = 10;
  } else if (estimator == "random_forest") {
    s.grid = {Values("num_trees", IntRange(100, 1200, 100)),
              Values("max_features", {"all", "sqrt"}),
              Values("min_split", {10, 30, 70, 150, 300})};
    s.fixed = {{"bootstrap", true}, {"seed", 0}};
    s.budget = 8;
  } else if (estimator == "boosted_trees") {
    s.grid = {Values("learning_rate", {0.05, 0.1, 0.3, 0.59, 1.0}),
              Values("max_depth", {6, 8, 10, 12}),
              Values("l1", {0.0, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2,
                            1.5e-2, 2e-2, 2.5e-2})};
    s.fixed = {{"rounds", 100}};
    s.budget = 20;
  } else if (estimator == "causal_tree") {
    s.grid = {Values("complexity", {"inf", 1e-3, 1e-4, 1e-5, 0.0}),
              Values("min_arm_count", IntRange(100, 1000, 100))};
    s.budget = 50;
  } else if (estimator == "causal_forest") {
    s.grid = {Values("num_trees", {100, 200, 500}),
              Values("mtry", {0, 1, 2, 4}),
              Values("min_arm_count", {5, 20, 50, 100}),
              Values("max_imbalance", {0.05, 0.11, 0.15, 0.2})};
    s.fixed = {{"subsample", 0.5}, {"seed", 0}};
    s.budget = 6;
  } else {
    throw ConfigError("unknown estimator '" + std::string(estimator) + "'");
  }
  return s;
}

SearchResult Search(const SearchSpec& spec, const ExperimentDataset& ds,
                    const SearchTarget& target) {
  spec.Validate();
  const bool cate = IsCateEstimator(spec.estimator);
  if (cate) {
    if (target.treated < 0 || target.control < 0 ||
        target.treated >= ds.num_arms() || target.control >= ds.num_arms() ||
        target.treated == target.control) {
      throw ConfigError("CATE search needs distinct treated and control arms");
    }
  }
  if (!ds.has_outcome(target.outcome)) {
    throw SchemaError("unknown outcome '" + target.outcome + "'");
  }

  // The lasso path reuses per-fold Gram matrices and warm starts.
  if (spec.estimator == "lasso" &&
      (spec.grid.empty() ||
       (spec.grid.size() == 1 && spec.grid[0].name == "lambda"))) {
    for (const auto& [k, v] : spec.fixed.items()) {
      if (k != "interactions") {
        throw ConfigError("unknown lasso parameter '" + k + "'");
      }
    }
    std::vector<double> lambdas;
    if (!spec.grid.empty()) {
      for (const auto& v : spec.grid[0].values) lambdas.push_back(v.get<double>());
    }
    CvReport r = TuneLasso(ds, target.outcome, lambdas, spec.folds, spec.seed,
                           InteractionsFromJson(spec.fixed));
    for (auto& g : r.grid) g = MergeSetting(spec.fixed, g);
    return r;
  }

  std::vector<json> cands = spec.SelectCandidates();
  for (auto& c : cands) c = MergeSetting(spec.fixed, c);
  const ExperimentDataset pair =
      cate ? ds.RestrictToArms(std::vector<int>{target.treated, target.control})
           : ExperimentDataset();
  const ExperimentDataset& data = cate ? pair : ds;
  const FoldAssignment fa = MakeFolds(data, spec.folds, spec.seed);

  std::vector<ExperimentDataset> train(spec.folds), valid(spec.folds);
  for (int k = 0; k < spec.folds; ++k) {
    train[k] = data.Subset(fa.TrainRows(k));
    valid[k] = data.Subset(fa.ValidationRows(k));
  }

  CvReport report;
  report.estimator = spec.estimator;
  report.folds = spec.folds;
  report.seed = fa.seed;
  report.grid = cands;
  report.fold_loss.assign(cands.size(), std::vector<double>(spec.folds, 0.0));
  std::vector<std::string> rejected(cands.size());

  const int64_t tasks = static_cast<int64_t>(cands.size()) * spec.folds;
  ParallelFor(tasks, spec.jobs, [&](int64_t t) {
    const size_t c = static_cast<size_t>(t / spec.folds);
    const int k = static_cast<int>(t % spec.folds);
    double loss;
    try {
      if (cate) {
        const PairwiseCateModel m =
            FitCateEstimator(spec.estimator, train[k], target.outcome,
                             target.treated, target.control, cands[c]);
        const double score =
            spec.estimator == "causal_tree"
                ? CausalTreeValidationScore(m, valid[k], target.outcome)
                : TransformedOutcomeScore(m, valid[k], target.outcome);
        loss = -score / ScoredUnits(valid[k], target);
      } else {
        const FittedOutcomeModel m = FitOutcomeEstimator(
            spec.estimator, train[k], target.outcome, cands[c]);
        loss = Mse(m, valid[k], target.outcome);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kConfig) throw;
      loss = std::numeric_limits<double>::infinity();
      rejected[c] = e.what();
    }
    report.fold_loss[c][k] = loss;
  });

  for (const auto& row : report.fold_loss) {
    report.mean_loss.push_back(
        std::accumulate(row.begin(), row.end(), 0.0) / spec.folds);
  }
  if (std::none_of(report.mean_loss.begin(), report.mean_loss.end(),
                   [](double v) { return std::isfinite(v); })) {
    std::string why = rejected.empty() ? "" : rejected.front();
    throw ConfigError("every " + spec.estimator +
                      " candidate was rejected: " + why);
  }
  report.chosen = CvReport::ArgMin(report.mean_loss);
  return report;
}

}  // namespace uplift
