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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "uplift/cate_models.h"
#include "uplift/dataset.h"
#include "uplift/estimators.h"
#include "uplift/evaluation.h"
#include "uplift/linear.h"
#include "uplift/outcome_models.h"
#include "uplift/pipeline.h"
#include "uplift/policy.h"
#include "uplift/rng.h"
#include "uplift/synth.h"
#include "uplift/tuning.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double StdDev(const std::vector<double>& v) {
  const double m = Mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Two-arm DGP over the full product of `domains`; arm 0 is treated.
uplift::SyntheticDgp ProductDgp(
    const std::vector<std::string>& variables,
    const std::vector<std::vector<std::string>>& domains,
    const std::function<std::pair<double, double>(const std::vector<int>&)>&
        treated_control) {
  uplift::SyntheticDgp d;
  d.variables = variables;
  d.domains = domains;
  d.arms = {"treated", "control"};
  d.propensities = {0.5, 0.5};
  std::vector<int> idx(variables.size(), 0);
  size_t total = 1;
  for (const auto& dom : domains) total *= dom.size();
  for (size_t c = 0; c < total; ++c) {
    size_t rest = c;
    uplift::SyntheticCell cell;
    for (size_t v = variables.size(); v-- > 0;) {
      idx[v] = static_cast<int>(rest % domains[v].size());
      rest /= domains[v].size();
    }
    for (size_t v = 0; v < variables.size(); ++v) {
      cell.labels.push_back(domains[v][idx[v]]);
    }
    cell.mass = 1.0 / static_cast<double>(total);
    const auto [t, ctl] = treated_control(idx);
    cell.mean = {t, ctl};
    d.cells.push_back(cell);
  }
  d.Validate();
  return d;
}

// 1. Empirical IPS equals sum_w upsilon_w Ybar[pi = W = w]; the direct and
// expanded improvement forms agree.
Verdict IpsIdentity() {
  uplift::Rng rng(20240101);
  double worst_ips = 0, worst_upsilon = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.UniformIndex(50));
    const int w = 2 + static_cast<int>(rng.UniformIndex(3));
    std::vector<int> pi(n), actual(n);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      pi[i] = static_cast<int>(rng.UniformIndex(w));
      actual[i] = static_cast<int>(rng.UniformIndex(w));
      y[i] = rep % 2 ? rng.Uniform() * 10 : (rng.Bernoulli(0.3) ? 1.0 : 0.0);
    }
    std::vector<double> n_pi(w, 0), n_cong(w, 0), s_cong(w, 0);
    for (int i = 0; i < n; ++i) {
      n_pi[pi[i]] += 1;
      if (pi[i] == actual[i]) {
        n_cong[pi[i]] += 1;
        s_cong[pi[i]] += y[i];
      }
    }
    double oracle = 0;
    for (int a = 0; a < w; ++a) {
      if (n_cong[a] > 0) oracle += (n_pi[a] / n) * (s_cong[a] / n_cong[a]);
    }
    const double ips = uplift::IpsEmpiricalValue(pi, actual, y, w);
    worst_ips = std::max(worst_ips, std::abs(ips - oracle));
    const auto u = uplift::UpsilonFromAssignments(pi, actual, y, w);
    worst_upsilon = std::max(worst_upsilon, std::abs(u.direct - u.expanded));
  }
  return {worst_ips <= 1e-12 && worst_upsilon <= 1e-10,
          Fmt("max |ips - oracle| = %.3g (tol 1e-12), max |direct - expanded| "
              "= %.3g (tol 1e-10)",
              worst_ips, worst_upsilon)};
}

// 2. Printed congruency fractions and differences of the lasso policy.
Verdict CongruencyReplay() {
  uplift::UpsilonTerms t;
  t.num_arms = 3;
  t.upsilon = {0.689, 0.232, 0.079};
  t.shares = {0.152, 0.149, 0.699,  //
              0.149, 0.150, 0.700,  //
              0.148, 0.153, 0.698};
  t.diffs = {0.0,    0.797,  0.917,  //
             0.596,  0.0,    1.606,  //
             -0.257, -0.119, 0.0};
  const double v = uplift::UpsilonExpanded(t);
  return {std::abs(v - 0.800) <= 0.001,
          Fmt("upsilon = %.6f (target 0.800 +/- 0.001)", v)};
}

// 3. IPS with known propensities is unbiased for the true policy value.
Verdict IpsUnbiased() {
  uplift::RandomDgpOptions o;
  o.propensities = {0.2, 0.3, 0.5};
  const auto dgp = uplift::RandomDgp(o, 3);
  std::vector<int> arm_of_cell(dgp.num_cells());
  for (int c = 0; c < dgp.num_cells(); ++c) arm_of_cell[c] = (c * 5 + 1) % 3;
  const double truth = uplift::TruePolicyValue(dgp, arm_of_cell);
  std::vector<double> values;
  for (int rep = 0; rep < 500; ++rep) {
    const auto ds = uplift::Draw(dgp, 5000, uplift::DeriveSeed(99, rep));
    std::vector<int> pi(ds.size());
    for (size_t i = 0; i < ds.size(); ++i) pi[i] = arm_of_cell[ds.cell(i)];
    values.push_back(
        uplift::IpsValue(pi, ds.arm_column(), ds.outcome("y"), dgp.propensities));
  }
  const double se = StdDev(values) / std::sqrt(500.0);
  const double gap = std::abs(Mean(values) - truth);
  return {gap <= 3 * se, Fmt("|mean IPS - truth| = %.5f, 3 x SE = %.5f "
                             "(truth %.5f)", gap, 3 * se, truth)};
}

// 4. Every estimator's policy recovers the optimal arm per cell.
Verdict OracleRecovery() {
  const std::vector<std::string> names = {
      "ols", "lasso", "cart", "random_forest", "boosted_trees", "causal_tree",
      "causal_forest"};
  std::map<std::string, int> seeds_ok;
  std::map<std::string, int> min_matches;
  for (const auto& n : names) min_matches[n] = 8;
  const int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    uplift::RandomDgpOptions o;
    o.min_gap = 0.05;
    const auto dgp = uplift::RandomDgp(o, 1000 + seed);
    const auto oracle = uplift::EnumerateOptimal(dgp);
    const auto ds = uplift::Draw(dgp, 100000, uplift::DeriveSeed(seed, 7));

    std::vector<uplift::Policy> policies;
    for (const auto& name : names) {
      uplift::SearchSpec spec = uplift::DefaultSearchSpec(name);
      spec.seed = seed;
      if (name == "random_forest") {
        spec.grid = {{"num_trees", {100}}, {"min_split", {10, 200}}};
      }
      if (uplift::IsOutcomeEstimator(name)) {
        const auto sr = uplift::Search(spec, ds, {"y"});
        auto model = std::make_shared<uplift::FittedOutcomeModel>(
            uplift::FitOutcomeEstimator(name, ds, "y", sr.chosen_setting()));
        policies.push_back(uplift::Policy::FromOutcomeModel(model, name));
      } else {
        auto cates = std::make_shared<uplift::PairwiseCates>(3);
        for (int a = 0; a < 3; ++a) {
          for (int b = a + 1; b < 3; ++b) {
            if (name == "causal_forest") {
              // Forests are fitted with one fixed setting; their residual
              // nuisance fits make a per-pair search the dominant cost.
              const json setting = {{"num_trees", 100}, {"seed", seed}};
              cates->Add(uplift::FitCateEstimator(name, ds, "y", a, b, setting));
              continue;
            }
            const auto sr = uplift::Search(spec, ds, {"y", a, b});
            cates->Add(uplift::FitCateEstimator(name, ds, "y", a, b,
                                                sr.chosen_setting()));
          }
        }
        policies.push_back(uplift::Policy::FromCates(cates, 0, name));
      }
    }
    for (size_t k = 0; k < names.size(); ++k) {
      const auto arms = policies[k].AssignDgp(dgp);
      int match = 0;
      for (int c = 0; c < dgp.num_cells(); ++c) {
        match += arms[c] == oracle.optimal_arm[c];
      }
      const bool exact = names[k] == "ols" || names[k] == "lasso";
      seeds_ok[names[k]] += match >= (exact ? 8 : 7);
      min_matches[names[k]] = std::min(min_matches[names[k]], match);
    }
  }
  bool pass = true;
  std::string detail;
  for (const auto& n : names) {
    pass = pass && seeds_ok[n] >= 19;
    detail += Fmt("%s %d/20 (min %d/8); ", n.c_str(), seeds_ok[n],
                  min_matches[n]);
  }
  return {pass, detail + "need >= 19/20 each"};
}

// 5. Closed-form and hand-computed checks on the learners.
Verdict MicroOracles() {
  std::vector<std::string> failures;
  uplift::Rng rng(5);

  // Lasso at lambda = 0 against OLS on a full-rank design.
  {
    const int n = 200, p = 5;
    Eigen::MatrixXd x(n, p);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double t = 0.5;
      for (int j = 0; j < p; ++j) {
        x(i, j) = rng.Normal();
        t += (j + 1) * 0.3 * x(i, j);
      }
      y[i] = t + 0.1 * rng.Normal();
    }
    const auto ols = uplift::FitOlsDense(x, y);
    const auto lasso = uplift::FitLassoDense(x, y, 0.0);
    const double gap = (ols.coef - lasso.coef).cwiseAbs().maxCoeff();
    if (!(gap <= 1e-5)) failures.push_back(Fmt("lasso0 gap %.3g", gap));
  }
  // Univariate lasso against soft thresholding on the standardized column.
  {
    const int n = 100;
    Eigen::MatrixXd x(n, 1);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 2.0 + 3.0 * rng.Normal();
      y[i] = 1.0 + 0.4 * x(i, 0) + rng.Normal();
    }
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
      mx += x(i, 0) / n;
      my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sxx += (x(i, 0) - mx) * (x(i, 0) - mx) / n;
      sxy += (x(i, 0) - mx) * (y[i] - my) / n;
    }
    const double sd = std::sqrt(sxx);
    const double rho = sxy / sd;
    for (double lambda : {0.0, 0.1, 0.5, 1.0, 5.0}) {
      const double bz = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho);
      const double expected = bz / sd;
      const auto fit = uplift::FitLassoDense(x, y, lambda);
      const double gap = std::abs(fit.coef(0) - expected);
      const double icpt = std::abs(fit.intercept - (my - expected * mx));
      if (!(gap <= 1e-7 && icpt <= 1e-7)) {
        failures.push_back(Fmt("soft-threshold lambda=%g gap %.3g", lambda, gap));
      }
    }
  }
  // CART root split on a 4-row fixture. Columns a, b; rows (a, b, y):
  // (0,0,1) (0,1,2) (1,0,3) (1,1,10). Splitting on a leaves SSE
  // 0.5 + 24.5 = 25; on b leaves 2 + 32 = 34. The root split is a.
  {
    uplift::FeatureRows rows(2);
    const std::vector<std::vector<int>> active = {{}, {1}, {0}, {0, 1}};
    for (const auto& a : active) rows.Add(a);
    const std::vector<uplift::RegressionStats> stats = {
        {1, 1}, {1, 2}, {1, 3}, {1, 10}};
    uplift::RegressionCriterion crit;
    uplift::GrowOptions opt;
    opt.max_depth = 1;
    const auto tree = uplift::FitRegressionTree(rows, stats, crit, opt);
    const double sse_a = 0.5 + 24.5, sse_b = 2.0 + 32.0;
    const int expected = sse_a < sse_b ? 0 : 1;
    if (tree.nodes[0].column != expected ||
        tree.nodes[tree.nodes[0].left].value != 1.5 ||
        tree.nodes[tree.nodes[0].right].value != 6.5) {
      failures.push_back("cart fixture split");
    }
  }
  // Boosting without L1 never increases training MSE.
  {
    const auto dgp = uplift::RandomDgp({}, 11);
    const auto ds = uplift::Draw(dgp, 5000, 12);
    uplift::BoostParams bp;
    bp.l1 = 0.0;
    bp.rounds = 50;
    bp.learning_rate = 0.3;
    bp.max_depth = 3;
    std::vector<double> mse;
    uplift::FitBoosted(ds, "y", bp, &mse);
    for (size_t r = 1; r < mse.size(); ++r) {
      if (mse[r] > mse[r - 1]) {
        failures.push_back(Fmt("boost mse rose at round %zu", r));
        break;
      }
    }
  }
  // Forest prediction is the mean of its members.
  {
    const auto dgp = uplift::RandomDgp({}, 13);
    const auto ds = uplift::Draw(dgp, 5000, 14);
    uplift::ForestParams fp;
    fp.num_trees = 25;
    fp.max_features = uplift::MaxFeatures::kSqrt;
    fp.seed = 3;
    const auto m = uplift::FitRandomForest(ds, "y", fp);
    std::vector<int> active;
    for (int c = 0; c < ds.num_cells(); ++c) {
      for (int a = 0; a < ds.num_arms(); ++a) {
        m.encoder().ActiveColumns(ds.cell_codes(c), a, &active);
        double s = 0;
        for (const auto& t : m.trees()) s += t.Predict(active);
        const double mean = s / static_cast<double>(m.trees().size());
        if (m.Predict(ds.cell_codes(c), a) != mean) {
          failures.push_back("forest mean of trees");
          c = ds.num_cells();
          break;
        }
      }
    }
  }
  std::string detail = "lasso(0)=OLS, soft-threshold, CART fixture, boosting "
                       "monotone, forest mean";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// 6. Causal tree splits first on the effect modifier; causal forest signs.
Verdict StructureRecovery() {
  int first_split_ok = 0;
  const int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto dgp = ProductDgp(
        {"u", "v", "z"},
        {{"u0", "u1", "u2", "u3"}, {"v0", "v1", "v2"}, {"z0", "z1"}},
        [](const std::vector<int>& i) {
          const double base = 0.1 + 0.15 * i[0] + 0.05 * i[2];
          const double tau = -0.1 + 0.1 * i[1];
          return std::make_pair(base + tau + 0.1, base);
        });
    const auto ds = uplift::Draw(dgp, 50000, uplift::DeriveSeed(seed, 61));
    uplift::CausalTreeParams p;
    p.complexity = 0;
    p.min_arm_count = 100;
    const auto m = uplift::FitCausalTree(ds, "y", 0, 1, p);
    const auto& root = m.trees()[0].nodes[0];
    const int v = ds.schema().VariableIndex("v");
    first_split_ok +=
        root.column >= 0 && m.encoder().columns()[root.column].variable == v;
  }

  int64_t correct = 0, total = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto dgp =
        ProductDgp({"g"}, {{"a", "b"}}, [](const std::vector<int>& i) {
          return std::make_pair(i[0] == 0 ? 0.4 : 0.2, 0.3);
        });
    const auto train = uplift::Draw(dgp, 20000, uplift::DeriveSeed(seed, 62));
    const auto test = uplift::Draw(dgp, 5000, uplift::DeriveSeed(seed, 63));
    uplift::CausalForestParams p;
    p.num_trees = 200;
    p.seed = seed;
    const auto m = uplift::FitCausalForest(train, "y", 0, 1, p);
    const auto tau = m.EstimateUnits(test);
    for (size_t i = 0; i < test.size(); ++i) {
      const double truth = test.cell(i) == 0 ? 0.1 : -0.1;
      correct += (tau[i] > 0) == (truth > 0) && tau[i] != 0;
      ++total;
    }
  }
  const double share = static_cast<double>(correct) / total;
  return {first_split_ok >= 19 && share >= 0.95,
          Fmt("causal tree first split on v in %d/20 seeds (need >= 19); "
              "forest sign correct on %.4f of held-out units (need >= 0.95)",
              first_split_ok, share)};
}

// 7. Constant effect: the tuned causal tree keeps a single leaf.
Verdict NullHeterogeneity() {
  int single = 0;
  const int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto dgp = ProductDgp(
        {"a", "b"}, {{"a0", "a1", "a2", "a3"}, {"b0", "b1", "b2"}},
        [](const std::vector<int>& i) {
          const double base = 0.15 + 0.08 * i[0] + 0.05 * i[1];
          return std::make_pair(base + 0.05, base);
        });
    const auto ds = uplift::Draw(dgp, 20000, uplift::DeriveSeed(seed, 71));
    uplift::SearchSpec spec = uplift::DefaultSearchSpec("causal_tree");
    spec.seed = seed;
    const auto sr = uplift::Search(spec, ds, {"y", 0, 1});
    const auto m =
        uplift::FitCateEstimator("causal_tree", ds, "y", 0, 1, sr.chosen_setting());
    single += m.trees()[0].NumLeaves() == 1;
  }
  return {single >= 18,
          Fmt("single-leaf tree in %d/20 seeds (need >= 18)", single)};
}

// 8. Paired bootstrap: no false difference between identical policies;
// power against a 0.01 value gap.
Verdict BootstrapCalibration() {
  const int kSeeds = 20;
  int size_ok = 0, power_ok = 0;
  double worst_identical_p = 1.0, worst_gap_p = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto dgp =
        ProductDgp({"g"}, {{"a", "b"}}, [](const std::vector<int>& i) {
          return i[0] == 0 ? std::make_pair(0.31, 0.30)
                           : std::make_pair(0.31, 0.30);
        });
    const auto ds = uplift::Draw(dgp, 50000, uplift::DeriveSeed(seed, 81));
    // Identical policies.
    {
      const auto p = uplift::Policy::Uniform(ds.arm_labels(), 0, "a");
      const auto q = uplift::Policy::Uniform(ds.arm_labels(), 0, "b");
      const auto bc = uplift::BootstrapCompare({p, q}, ds, "y", 1000, seed);
      const double d = bc.mean_diff[1], se = bc.std_error[1];
      const double pv = bc.p_value[1];
      // Every paired difference is exactly zero, so the standard error is
      // zero as well; |d| <= 2 se is the only meaningful reading.
      size_ok += std::abs(d) <= 2 * se && pv > 0.05;
      worst_identical_p = std::min(worst_identical_p, pv);
    }
    // Treated-for-all (0.31) against control-for-all (0.30).
    {
      const auto p = uplift::Policy::Uniform(ds.arm_labels(), 0, "treat");
      const auto q = uplift::Policy::Uniform(ds.arm_labels(), 1, "control");
      const auto bc = uplift::BootstrapCompare({p, q}, ds, "y", 1000, seed);
      power_ok += bc.p_value[1] < 0.01;
      worst_gap_p = std::max(worst_gap_p, bc.p_value[1]);
    }
  }
  return {size_ok >= 18 && power_ok >= 19,
          Fmt("identical: no difference in %d/20 seeds (need >= 18, min p "
              "%.3g); gap 0.01: p < 0.01 in %d/20 seeds (need >= 19, max p "
              "%.3g)",
              size_ok, worst_identical_p, power_ok, worst_gap_p)};
}

std::map<std::string, std::string> ReadTree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

// 9. Rerunning the pipeline reproduces every output byte for byte.
Verdict Determinism() {
  uplift::RandomDgpOptions o;
  o.propensities = {0.15, 0.15, 0.7};
  const auto dgp = uplift::RandomDgp(o, 17);
  const fs::path dir = fs::temp_directory_path() /
                       ("uplift_acceptance_" + std::to_string(getpid()));
  json cfg = {
      {"data", {{"dgp", dgp.ToJson()}, {"n", 30000}}},
      {"outcome", "y"},
      {"baseline_arm", "arm2"},
      {"estimators",
       {"ols", "lasso", "cart",
        {{"estimator", "random_forest"},
         {"grid", {{"num_trees", {30}}, {"min_split", {20, 100}}}}},
        {{"estimator", "boosted_trees"}, {"budget", 3}},
        {{"estimator", "causal_tree"}, {"budget", 5}},
        {{"estimator", "causal_forest"},
         {"budget", 2},
         {"fixed", {{"num_trees", 40}}}}}},
      {"bootstrap", {{"replicates", 100}}},
      {"seed", 5},
      {"output_dir", dir.string()}};
  const auto config = uplift::PipelineConfig::FromJson(cfg);
  uplift::RunPipeline(config);
  const auto first = ReadTree(dir);
  fs::remove_all(dir);
  uplift::RunPipeline(config);
  const auto second = ReadTree(dir);
  fs::remove_all(dir);
  int differing = 0;
  for (const auto& [name, text] : first) {
    auto it = second.find(name);
    differing += it == second.end() || it->second != text;
  }
  const bool same = first.size() == second.size() && differing == 0;
  return {same && first.size() > 10,
          Fmt("%zu files compared, %d differ", first.size(), differing)};
}

// 10. Table-5 style percentage gain on look-alike Bernoulli data.
Verdict AteReplay() {
  const std::vector<std::string> arms = {"7d", "14d", "30d"};
  const std::vector<int> sizes = {15274, 15139, 70611};
  const std::vector<double> rates = {0.1544, 0.1511, 0.1463};
  std::vector<double> gains;
  for (int rep = 0; rep < 200; ++rep) {
    uplift::Rng rng(uplift::DeriveSeed(2024, rep));
    uplift::DatasetBuilder b({"segment"}, {"subscribed"});
    b.DeclareArms(arms);
    const std::vector<std::string> cov = {"all"};
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < sizes[a]; ++i) {
        const double y = rng.Bernoulli(rates[a]) ? 1.0 : 0.0;
        b.AddUnit(cov, arms[a], std::span<const double>(&y, 1));
      }
    }
    const auto ds = std::move(b).Build();
    const auto table = uplift::ComputeAteTable(ds, "subscribed", 2);
    gains.push_back(table.rows[0].pct_gain);
  }
  const double m = Mean(gains);
  return {std::abs(m - 5.59) <= 0.6,
          Fmt("mean 7-day gain %.3f%% over 200 replications (target 5.59 +/- "
              "0.6)", m)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 = no limit
  Verdict (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "IPS identity suite", 5, IpsIdentity},
      {2, "congruency worked example", 1, CongruencyReplay},
      {3, "IPS unbiasedness", 120, IpsUnbiased},
      {4, "oracle policy recovery", 600, OracleRecovery},
      {5, "estimator micro-oracles", 30, MicroOracles},
      {6, "causal structure recovery", 300, StructureRecovery},
      {7, "null-heterogeneity guard", 180, NullHeterogeneity},
      {8, "bootstrap size and power", 300, BootstrapCalibration},
      {9, "pipeline determinism", 0, Determinism},
      {10, "ATE-scale simulation", 60, AteReplay},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs%s]\n", pass ? "PASS" : "FAIL",
                c.id, c.name, v.detail.c_str(), secs,
                c.limit_seconds > 0
                    ? Fmt(", limit %.0fs", c.limit_seconds).c_str()
                    : "");
    std::fflush(stdout);
  }
  return failed;
}
