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

#include <algorithm>
#include <cmath>
#include <limits>

#include "uplift/csv.h"
#include "uplift/error.h"
#include "uplift/parallel.h"
#include "uplift/rng.h"
#include "uplift/stats.h"

namespace uplift {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckLengths(std::span<const int> prescribed, std::span<const int> actual,
                  std::span<const double> y) {
  if (prescribed.size() != actual.size() || actual.size() != y.size()) {
    throw DataError("policy, arm and outcome columns differ in length");
  }
}

void CheckArms(std::span<const int> arms, int num_arms) {
  for (int a : arms) {
    if (a < 0 || a >= num_arms) {
      throw DataError("arm index " + std::to_string(a) + " out of range");
    }
  }
}

nlohmann::json NumberOrNull(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

double IpsValue(std::span<const int> prescribed, std::span<const int> actual,
                std::span<const double> y,
                std::span<const double> propensities) {
  CheckLengths(prescribed, actual, y);
  for (double e : propensities) {
    if (!(e > 0.0)) {
      throw DataError("IPS needs strictly positive propensities (positivity)");
    }
  }
  CheckArms(actual, static_cast<int>(propensities.size()));
  if (y.empty()) return 0.0;
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (prescribed[i] == actual[i]) s += y[i] / propensities[actual[i]];
  }
  return s / static_cast<double>(y.size());
}

double IpsEmpiricalValue(std::span<const int> prescribed,
                         std::span<const int> actual, std::span<const double> y,
                         int num_arms, std::vector<std::string>* warnings) {
  CheckLengths(prescribed, actual, y);
  CheckArms(prescribed, num_arms);
  CheckArms(actual, num_arms);
  if (y.empty()) return 0.0;
  std::vector<double> n_pi(num_arms, 0.0), n_cong(num_arms, 0.0);
  for (size_t i = 0; i < y.size(); ++i) {
    n_pi[prescribed[i]] += 1;
    if (prescribed[i] == actual[i]) n_cong[actual[i]] += 1;
  }
  for (int w = 0; w < num_arms; ++w) {
    if (n_pi[w] > 0 && n_cong[w] == 0 && warnings) {
      warnings->push_back("no congruent unit for prescribed arm " +
                          std::to_string(w) + "; its stratum contributes 0");
    }
  }
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const int w = prescribed[i];
    if (w != actual[i]) continue;
    // e_hat = n(W = w, pi = w) / n(pi = w)
    s += y[i] * n_pi[w] / n_cong[w];
  }
  return s / static_cast<double>(y.size());
}

IpsEstimate Ips(const Policy& policy, const ExperimentDataset& ds,
                std::string_view outcome, std::span<const double> propensities) {
  IpsEstimate r;
  r.policy = policy.name();
  r.outcome = std::string(outcome);
  r.mode = IpsMode::kTheoretical;
  const std::vector<double> p =
      propensities.empty()
          ? ds.propensities()
          : std::vector<double>(propensities.begin(), propensities.end());
  if (static_cast<int>(p.size()) != ds.num_arms()) {
    throw DataError("need one propensity per arm");
  }
  r.value = IpsValue(policy.AssignUnits(ds), ds.arm_column(),
                     ds.outcome(outcome), p);
  return r;
}

IpsEstimate IpsEmpirical(const Policy& policy, const ExperimentDataset& ds,
                         std::string_view outcome) {
  IpsEstimate r;
  r.policy = policy.name();
  r.outcome = std::string(outcome);
  r.mode = IpsMode::kEmpirical;
  r.value = IpsEmpiricalValue(policy.AssignUnits(ds), ds.arm_column(),
                              ds.outcome(outcome), ds.num_arms(), &r.warnings);
  return r;
}

double CongruencyTable::CongruentValue() const {
  double v = 0;
  for (int w = 0; w < num_arms(); ++w) {
    if (present(w, w)) v += upsilon[w] * mean(w, w);
  }
  return v;
}

std::string CongruencyTable::ToCsv() const {
  std::vector<std::string> header{"prescribed_arm", "upsilon", "n"};
  for (const auto& l : arm_labels) header.push_back("mean_actual_" + l);
  for (const auto& l : arm_labels) header.push_back("n_actual_" + l);
  std::string out = CsvLine(header);
  const int w = num_arms();
  for (int a = 0; a < w; ++a) {
    std::vector<std::string> row{arm_labels[a], FormatDouble(upsilon[a]),
                                 std::to_string(prescribed_counts[a])};
    for (int b = 0; b < w; ++b) row.push_back(FormatDouble(means[a * w + b]));
    for (int b = 0; b < w; ++b) row.push_back(std::to_string(counts[a * w + b]));
    out += CsvLine(row);
  }
  return out;
}

nlohmann::json CongruencyTable::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  const int w = num_arms();
  for (int a = 0; a < w; ++a) {
    nlohmann::json m = nlohmann::json::array(), n = nlohmann::json::array();
    for (int b = 0; b < w; ++b) {
      m.push_back(NumberOrNull(means[a * w + b]));
      n.push_back(counts[a * w + b]);
    }
    rows.push_back({{"prescribed_arm", arm_labels[a]},
                    {"upsilon", upsilon[a]},
                    {"n", prescribed_counts[a]},
                    {"means", m},
                    {"counts", n}});
  }
  return {{"arms", arm_labels}, {"rows", rows}};
}

CongruencyTable CongruencyFromAssignments(std::span<const int> prescribed,
                                          std::span<const int> actual,
                                          std::span<const double> y,
                                          std::vector<std::string> arm_labels) {
  CheckLengths(prescribed, actual, y);
  const int w = static_cast<int>(arm_labels.size());
  CheckArms(prescribed, w);
  CheckArms(actual, w);
  if (y.empty()) throw DataError("congruency table of an empty dataset");
  CongruencyTable t;
  t.arm_labels = std::move(arm_labels);
  t.total = static_cast<int64_t>(y.size());
  t.prescribed_counts.assign(w, 0);
  t.counts.assign(w * w, 0);
  t.sums.assign(w * w, 0.0);
  for (size_t i = 0; i < y.size(); ++i) {
    ++t.prescribed_counts[prescribed[i]];
    ++t.counts[prescribed[i] * w + actual[i]];
    t.sums[prescribed[i] * w + actual[i]] += y[i];
  }
  t.upsilon.resize(w);
  for (int a = 0; a < w; ++a) {
    t.upsilon[a] = static_cast<double>(t.prescribed_counts[a]) /
                   static_cast<double>(t.total);
  }
  t.means.resize(w * w);
  for (int k = 0; k < w * w; ++k) {
    t.means[k] = t.counts[k] > 0 ? t.sums[k] / static_cast<double>(t.counts[k])
                                 : kNaN;
  }
  return t;
}

CongruencyTable Congruency(const Policy& policy, const ExperimentDataset& ds,
                           std::string_view outcome) {
  return CongruencyFromAssignments(policy.AssignUnits(ds), ds.arm_column(),
                                   ds.outcome(outcome), ds.arm_labels());
}

double UpsilonExpanded(const UpsilonTerms& terms) {
  const int w = terms.num_arms;
  if (static_cast<int>(terms.upsilon.size()) != w ||
      static_cast<int>(terms.shares.size()) != w * w ||
      static_cast<int>(terms.diffs.size()) != w * w) {
    throw DataError("improvement terms have inconsistent sizes");
  }
  double v = 0;
  for (int a = 0; a < w; ++a) {
    double inner = 0;
    for (int b = 0; b < w; ++b) {
      if (terms.shares[a * w + b] == 0) continue;
      inner += terms.shares[a * w + b] * terms.diffs[a * w + b];
    }
    v += terms.upsilon[a] * inner;
  }
  return v;
}

UpsilonTerms UpsilonTermsFrom(const CongruencyTable& table) {
  const int w = table.num_arms();
  UpsilonTerms t;
  t.num_arms = w;
  t.upsilon = table.upsilon;
  t.shares.assign(w * w, 0.0);
  t.diffs.assign(w * w, 0.0);
  for (int a = 0; a < w; ++a) {
    if (table.prescribed_counts[a] == 0) continue;
    // An empty congruent stratum counts as mean 0, matching its zero
    // contribution to the empirical IPS.
    const double congruent = table.present(a, a) ? table.mean(a, a) : 0.0;
    for (int b = 0; b < w; ++b) {
      if (!table.present(a, b)) continue;
      t.shares[a * w + b] = static_cast<double>(table.counts[a * w + b]) /
                            static_cast<double>(table.prescribed_counts[a]);
      t.diffs[a * w + b] = congruent - table.mean(a, b);
    }
  }
  return t;
}

UpsilonResult UpsilonFromAssignments(std::span<const int> prescribed,
                                     std::span<const int> actual,
                                     std::span<const double> y, int num_arms) {
  UpsilonResult r;
  std::vector<std::string> labels(num_arms);
  for (int a = 0; a < num_arms; ++a) labels[a] = std::to_string(a);
  const CongruencyTable table =
      CongruencyFromAssignments(prescribed, actual, y, labels);
  r.ips_empirical =
      IpsEmpiricalValue(prescribed, actual, y, num_arms, &r.warnings);
  double s = 0;
  for (double v : y) s += v;
  r.mean_outcome = s / static_cast<double>(y.size());
  r.direct = r.ips_empirical - r.mean_outcome;
  r.expanded = UpsilonExpanded(UpsilonTermsFrom(table));
  return r;
}

UpsilonResult Upsilon(const Policy& policy, const ExperimentDataset& ds,
                      std::string_view outcome) {
  return UpsilonFromAssignments(policy.AssignUnits(ds), ds.arm_column(),
                                ds.outcome(outcome), ds.num_arms());
}

std::string AteTable::ToCsv() const {
  std::string out = CsvLine(
      {"arm", "n", "mean", "diff", "t", "p_value", "pct_gain", "control"});
  for (const auto& r : rows) {
    out += CsvLine({r.arm, std::to_string(r.n), FormatDouble(r.mean),
                         FormatDouble(r.diff), FormatDouble(r.t),
                         FormatDouble(r.p_value), FormatDouble(r.pct_gain),
                         r.control ? "1" : "0"});
  }
  return out;
}

nlohmann::json AteTable::ToJson() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    rs.push_back({{"arm", r.arm},
                  {"n", r.n},
                  {"mean", NumberOrNull(r.mean)},
                  {"diff", NumberOrNull(r.diff)},
                  {"t", NumberOrNull(r.t)},
                  {"p_value", NumberOrNull(r.p_value)},
                  {"pct_gain", NumberOrNull(r.pct_gain)},
                  {"control", r.control}});
  }
  return {{"outcome", outcome}, {"rows", rs}};
}

AteTable ComputeAteTable(const ExperimentDataset& ds, std::string_view outcome,
                         int control) {
  if (control < 0 || control >= ds.num_arms()) {
    throw ConfigError("control arm " + std::to_string(control) +
                      " is not present");
  }
  const auto y = ds.outcome(outcome);
  std::vector<std::vector<double>> by_arm(ds.num_arms());
  for (size_t i = 0; i < ds.size(); ++i) by_arm[ds.arm(i)].push_back(y[i]);
  if (by_arm[control].empty()) {
    throw DataError("control arm '" + ds.arm_labels()[control] +
                    "' has no units");
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  AteTable t;
  t.outcome = std::string(outcome);
  t.control = control;
  const double cm = mean(by_arm[control]);
  for (int a = 0; a < ds.num_arms(); ++a) {
    AteRow r;
    r.arm = ds.arm_labels()[a];
    r.n = static_cast<int64_t>(by_arm[a].size());
    r.mean = mean(by_arm[a]);
    r.control = a == control;
    if (r.control) {
      r.diff = 0;
      r.t = 0;
      r.p_value = 1;
      r.pct_gain = 0;
    } else if (by_arm[a].size() >= 2 && by_arm[control].size() >= 2) {
      const TTestResult tt = WelchTTest(by_arm[a], by_arm[control]);
      r.diff = tt.mean_diff;
      r.t = tt.t;
      r.p_value = tt.p_value;
      r.pct_gain = cm != 0 ? 100.0 * r.diff / cm : kNaN;
    } else {
      r.diff = r.mean - cm;
      r.t = kNaN;
      r.p_value = kNaN;
      r.pct_gain = cm != 0 ? 100.0 * r.diff / cm : kNaN;
    }
    t.rows.push_back(r);
  }
  return t;
}

std::vector<int64_t> BootstrapIndices(uint64_t seed, int64_t b, int64_t n) {
  Rng rng(DeriveSeed(seed, static_cast<uint64_t>(b)));
  std::vector<int64_t> idx(n);
  for (int64_t k = 0; k < n; ++k) {
    idx[k] = static_cast<int64_t>(rng.UniformIndex(static_cast<uint64_t>(n)));
  }
  return idx;
}

BootstrapComparison BootstrapCompareAssignments(
    std::vector<std::string> names,
    const std::vector<std::vector<int>>& prescribed,
    const std::vector<std::span<const double>>& outcomes,
    std::span<const int> actual, int num_arms, int replicates, uint64_t seed,
    int jobs) {
  const size_t p = names.size();
  if (replicates < 2) throw ConfigError("bootstrap needs B_rep >= 2");
  if (p == 0) throw ConfigError("bootstrap needs at least one policy");
  if (prescribed.size() != p || outcomes.size() != p) {
    throw DataError("one assignment and outcome vector per policy");
  }
  const int64_t n = static_cast<int64_t>(actual.size());
  if (n == 0) throw DataError("bootstrap of an empty dataset");
  for (size_t k = 0; k < p; ++k) {
    CheckLengths(prescribed[k], actual, outcomes[k]);
    CheckArms(prescribed[k], num_arms);
  }
  CheckArms(actual, num_arms);

  BootstrapComparison out;
  out.policies = std::move(names);
  out.replicates = replicates;
  out.seed = seed;
  out.values.assign(p, std::vector<double>(replicates, 0.0));
  ParallelFor(replicates, jobs, [&](int64_t b) {
    const auto idx = BootstrapIndices(seed, b, n);
    std::vector<double> n_pi(num_arms), n_cong(num_arms), s_cong(num_arms);
    for (size_t k = 0; k < p; ++k) {
      std::fill(n_pi.begin(), n_pi.end(), 0.0);
      std::fill(n_cong.begin(), n_cong.end(), 0.0);
      std::fill(s_cong.begin(), s_cong.end(), 0.0);
      const auto& pr = prescribed[k];
      const auto y = outcomes[k];
      for (int64_t i : idx) {
        const int w = pr[i];
        n_pi[w] += 1;
        if (w == actual[i]) {
          n_cong[w] += 1;
          s_cong[w] += y[i];
        }
      }
      double v = 0;
      for (int w = 0; w < num_arms; ++w) {
        if (n_cong[w] > 0) v += n_pi[w] * (s_cong[w] / n_cong[w]);
      }
      out.values[k][b] = v / static_cast<double>(n);
    }
  });

  for (size_t k = 0; k < p; ++k) {
    double s = 0;
    for (double v : out.values[k]) s += v;
    out.mean_value.push_back(s / replicates);
  }
  out.mean_diff.assign(p * p, 0.0);
  out.std_error.assign(p * p, 0.0);
  out.t.assign(p * p, 0.0);
  out.p_value.assign(p * p, 1.0);
  for (size_t a = 0; a < p; ++a) {
    for (size_t b = 0; b < p; ++b) {
      const TTestResult r = PairedTTest(out.values[a], out.values[b]);
      out.mean_diff[a * p + b] = r.mean_diff;
      out.std_error[a * p + b] = r.std_error;
      out.t[a * p + b] = r.t;
      out.p_value[a * p + b] = r.p_value;
    }
  }
  return out;
}

BootstrapComparison BootstrapCompare(const std::vector<Policy>& policies,
                                     const ExperimentDataset& ds,
                                     std::string_view outcome, int replicates,
                                     uint64_t seed, int jobs) {
  std::vector<std::string> names;
  std::vector<std::vector<int>> prescribed;
  std::vector<std::span<const double>> outcomes;
  const auto y = ds.outcome(outcome);
  for (const auto& p : policies) {
    names.push_back(p.name());
    prescribed.push_back(p.AssignUnits(ds));
    outcomes.push_back(y);
  }
  return BootstrapCompareAssignments(std::move(names), prescribed, outcomes,
                                     ds.arm_column(), ds.num_arms(), replicates,
                                     seed, jobs);
}

std::string BootstrapComparison::MatrixCsv() const {
  std::string out = CsvLine({"policy_a", "policy_b", "mean_a", "mean_b",
                                  "mean_diff", "std_error", "t", "p_value"});
  const size_t p = num_policies();
  for (size_t a = 0; a < p; ++a) {
    for (size_t b = 0; b < p; ++b) {
      if (a == b) continue;
      out += CsvLine(
          {policies[a], policies[b], FormatDouble(mean_value[a]),
           FormatDouble(mean_value[b]), FormatDouble(mean_diff[a * p + b]),
           FormatDouble(std_error[a * p + b]), FormatDouble(t[a * p + b]),
           FormatDouble(p_value[a * p + b])});
    }
  }
  return out;
}

std::string BootstrapComparison::ReplicatesCsv() const {
  std::vector<std::string> header{"replicate"};
  header.insert(header.end(), policies.begin(), policies.end());
  std::string out = CsvLine(header);
  for (int b = 0; b < replicates; ++b) {
    std::vector<std::string> row{std::to_string(b)};
    for (const auto& v : values) row.push_back(FormatDouble(v[b]));
    out += CsvLine(row);
  }
  return out;
}

nlohmann::json BootstrapComparison::ToJson() const {
  auto clean = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(NumberOrNull(x));
    return a;
  };
  return {{"policies", policies},   {"replicates", replicates},
          {"seed", seed},           {"mean_value", clean(mean_value)},
          {"mean_diff", clean(mean_diff)}, {"std_error", clean(std_error)},
          {"t", clean(t)},          {"p_value", clean(p_value)}};
}

SegmentProfile ProfileSegments(const Policy& policy, const ExperimentDataset& ds,
                               const std::vector<std::string>& variables,
                               const std::vector<std::string>& outcomes) {
  if (ds.empty()) throw DataError("segment profile of an empty dataset");
  const int w = ds.num_arms();
  const auto prescribed = policy.AssignUnits(ds);
  SegmentProfile prof;
  prof.arm_labels = ds.arm_labels();
  prof.prescribed_counts.assign(w, 0);
  for (int a : prescribed) ++prof.prescribed_counts[a];

  std::vector<int> vars;
  if (variables.empty()) {
    for (int v = 0; v < ds.num_variables(); ++v) vars.push_back(v);
  } else {
    for (const auto& name : variables) {
      const int v = ds.schema().VariableIndex(name);
      if (v < 0) throw SchemaError("unknown covariate '" + name + "'");
      vars.push_back(v);
    }
  }
  const double n = static_cast<double>(ds.size());
  for (int v : vars) {
    SegmentProfile::VariableShares vs;
    vs.variable = ds.schema().variables[v];
    vs.categories = ds.schema().categories[v];
    const size_t k = vs.categories.size();
    std::vector<std::vector<double>> counts(w, std::vector<double>(k, 0.0));
    vs.population.assign(k, 0.0);
    for (size_t i = 0; i < ds.size(); ++i) {
      const int c = ds.codes(i)[v];
      counts[prescribed[i]][c] += 1;
      vs.population[c] += 1;
    }
    for (auto& p : vs.population) p /= n;
    vs.share.assign(w, std::vector<double>(k, kNaN));
    for (int a = 0; a < w; ++a) {
      if (prof.prescribed_counts[a] == 0) continue;
      for (size_t c = 0; c < k; ++c) {
        vs.share[a][c] =
            counts[a][c] / static_cast<double>(prof.prescribed_counts[a]);
      }
    }
    prof.variables.push_back(std::move(vs));
  }
  prof.outcomes = outcomes.empty() ? ds.outcome_names() : outcomes;
  for (const auto& name : prof.outcomes) {
    const auto y = ds.outcome(name);
    std::vector<double> sums(w, 0.0);
    double total = 0;
    for (size_t i = 0; i < ds.size(); ++i) {
      sums[prescribed[i]] += y[i];
      total += y[i];
    }
    std::vector<double> means(w, kNaN);
    for (int a = 0; a < w; ++a) {
      if (prof.prescribed_counts[a] > 0) {
        means[a] = sums[a] / static_cast<double>(prof.prescribed_counts[a]);
      }
    }
    prof.outcome_means.push_back(std::move(means));
    prof.population_means.push_back(total / n);
  }
  return prof;
}

std::string SegmentProfile::ToCsv() const {
  std::vector<std::string> header{"section", "variable", "category"};
  for (const auto& l : arm_labels) header.push_back("prescribed_" + l);
  header.push_back("all");
  std::string out = CsvLine(header);
  {
    std::vector<std::string> row{"count", "", ""};
    int64_t total = 0;
    for (int64_t c : prescribed_counts) {
      row.push_back(std::to_string(c));
      total += c;
    }
    row.push_back(std::to_string(total));
    out += CsvLine(row);
  }
  for (const auto& vs : variables) {
    for (size_t c = 0; c < vs.categories.size(); ++c) {
      std::vector<std::string> row{"share", vs.variable, vs.categories[c]};
      for (const auto& s : vs.share) row.push_back(FormatDouble(s[c]));
      row.push_back(FormatDouble(vs.population[c]));
      out += CsvLine(row);
    }
  }
  for (size_t k = 0; k < outcomes.size(); ++k) {
    std::vector<std::string> row{"outcome_mean", outcomes[k], ""};
    for (double m : outcome_means[k]) row.push_back(FormatDouble(m));
    row.push_back(FormatDouble(population_means[k]));
    out += CsvLine(row);
  }
  return out;
}

nlohmann::json SegmentProfile::ToJson() const {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& vs : variables) {
    nlohmann::json shares = nlohmann::json::array();
    for (const auto& s : vs.share) {
      nlohmann::json row = nlohmann::json::array();
      for (double x : s) row.push_back(NumberOrNull(x));
      shares.push_back(row);
    }
    vars.push_back({{"variable", vs.variable},
                    {"categories", vs.categories},
                    {"share", shares},
                    {"population", vs.population}});
  }
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : outcome_means) {
    nlohmann::json row = nlohmann::json::array();
    for (double x : m) row.push_back(NumberOrNull(x));
    means.push_back(row);
  }
  return {{"arms", arm_labels},
          {"prescribed_counts", prescribed_counts},
          {"variables", vars},
          {"outcomes", outcomes},
          {"outcome_means", means},
          {"population_means", population_means}};
}

OutcomeDecomposition DecomposeOutcome(const ExperimentDataset& ds,
                                      std::string_view success,
                                      std::string_view value) {
  const auto s = ds.outcome(success);
  const auto y = ds.outcome(value);
  OutcomeDecomposition d;
  d.success = std::string(success);
  d.value = std::string(value);
  const int w = ds.num_arms();
  std::vector<double> n(w, 0), ns(w, 0), sy(w, 0), sys(w, 0);
  for (size_t i = 0; i < ds.size(); ++i) {
    if (s[i] != 0.0 && s[i] != 1.0) {
      throw DataError("outcome '" + d.success + "' must be 0/1");
    }
    const int a = ds.arm(i);
    n[a] += 1;
    sy[a] += y[i];
    if (s[i] == 1.0) {
      ns[a] += 1;
      sys[a] += y[i];
    } else if (y[i] != 0.0) {
      d.precondition_holds = false;
    }
  }
  for (int a = 0; a < w; ++a) {
    DecompositionRow r;
    r.arm = ds.arm_labels()[a];
    r.n = static_cast<int64_t>(n[a]);
    if (n[a] > 0) {
      r.pr_success = ns[a] / n[a];
      r.cond_mean = ns[a] > 0 ? sys[a] / ns[a] : 0.0;
      r.product = r.pr_success * r.cond_mean;
      r.mean = sy[a] / n[a];
      r.residual = r.mean - r.product;
    } else {
      r.pr_success = r.cond_mean = r.product = r.mean = r.residual = kNaN;
    }
    d.rows.push_back(r);
  }
  return d;
}

std::string OutcomeDecomposition::ToCsv() const {
  std::string out = CsvLine({"arm", "n", "pr_" + success,
                                  "mean_" + value + "_given_" + success,
                                  "product", "mean_" + value, "residual"});
  for (const auto& r : rows) {
    out += CsvLine({r.arm, std::to_string(r.n), FormatDouble(r.pr_success),
                         FormatDouble(r.cond_mean), FormatDouble(r.product),
                         FormatDouble(r.mean), FormatDouble(r.residual)});
  }
  return out;
}

nlohmann::json OutcomeDecomposition::ToJson() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    rs.push_back({{"arm", r.arm},
                  {"n", r.n},
                  {"pr_success", NumberOrNull(r.pr_success)},
                  {"cond_mean", NumberOrNull(r.cond_mean)},
                  {"product", NumberOrNull(r.product)},
                  {"mean", NumberOrNull(r.mean)},
                  {"residual", NumberOrNull(r.residual)}});
  }
  return {{"success", success},
          {"value", value},
          {"precondition_holds", precondition_holds},
          {"rows", rs}};
}

}  // namespace uplift
