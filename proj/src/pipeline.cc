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

#include "uplift/pipeline.h"

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "uplift/cate_models.h"
#include "uplift/csv.h"
#include "uplift/error.h"
#include "uplift/estimators.h"
#include "uplift/evaluation.h"
#include "uplift/outcome_models.h"
#include "uplift/rng.h"

namespace uplift {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Seed streams of the pipeline stages.
enum SeedStream : uint64_t {
  kDrawStream = 1,
  kSplitStream = 2,
  kBootstrapStream = 3,
  kSearchStream = 100,
};

fs::path Resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeError("write failed for " + path.string());
}

void WriteJson(const fs::path& path, const json& j) {
  WriteText(path, j.dump(2) + "\n");
}

std::string FileSafe(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

json RolesToJson(const CsvRoles& r) {
  json j = {{"arm", r.arm_column}, {"outcomes", r.outcome_columns}};
  if (!r.covariate_columns.empty()) j["covariates"] = r.covariate_columns;
  if (!r.arm_order.empty()) j["arm_order"] = r.arm_order;
  if (!r.propensities.empty()) j["propensities"] = r.propensities;
  return j;
}

// Declared arms of the data source, if known without reading the data.
std::optional<std::vector<std::string>> DeclaredArms(const PipelineConfig& c) {
  if (c.dgp) return c.dgp->arms;
  if (c.roles && !c.roles->arm_order.empty()) return c.roles->arm_order;
  return std::nullopt;
}

std::vector<std::string> DeclaredOutcomes(const PipelineConfig& c) {
  if (c.dgp) {
    std::vector<std::string> out{c.dgp->outcome_name};
    if (c.dgp->conditional) out.push_back(c.dgp->conditional->name);
    return out;
  }
  if (c.roles) return c.roles->outcome_columns;
  return {};
}

bool Contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

void CheckArmsAndOutcomes(const PipelineConfig& c,
                          const std::vector<std::string>& arms,
                          const std::vector<std::string>& outcomes,
                          std::vector<std::string>* diag) {
  if (!Contains(arms, c.baseline_arm)) {
    diag->push_back("baseline arm '" + c.baseline_arm +
                    "' is not an arm of the data");
  }
  if (!c.fallback_arm.empty() && !Contains(arms, c.fallback_arm)) {
    diag->push_back("fallback arm '" + c.fallback_arm +
                    "' is not an arm of the data");
  }
  if (arms.size() < 2) diag->push_back("data must have at least two arms");
  std::vector<std::string> wanted{c.outcome};
  wanted.insert(wanted.end(), c.long_run_outcomes.begin(),
                c.long_run_outcomes.end());
  if (c.decomposition) {
    wanted.push_back(c.decomposition->first);
    wanted.push_back(c.decomposition->second);
  }
  for (const auto& o : wanted) {
    if (!Contains(outcomes, o)) {
      diag->push_back("outcome '" + o + "' is not an outcome of the data");
    }
  }
}

std::string StageError(const std::string& stage, const std::exception& e) {
  return stage + ": " + e.what();
}

SearchSpec EstimatorSpec(const json& e) {
  if (e.is_string()) return DefaultSearchSpec(e.get<std::string>());
  if (!e.is_object() || !e.contains("estimator")) {
    throw ConfigError("estimator entries must be a name or an object with "
                      "'estimator'");
  }
  SearchSpec base = DefaultSearchSpec(e.at("estimator").get<std::string>());
  json merged = base.ToJson();
  for (const auto& [k, v] : e.items()) {
    if (k == "fixed") {
      for (const auto& [fk, fv] : v.items()) merged["fixed"][fk] = fv;
    } else if (k == "seed" || k == "estimator" || k == "grid" ||
               k == "budget" || k == "folds" || k == "jobs") {
      merged[k] = v;
    } else {
      throw ConfigError("unknown estimator field '" + k + "'");
    }
  }
  // Fixed values take precedence over a default grid entry of the same name.
  if (!e.contains("grid")) {
    for (const auto& [fk, fv] : merged["fixed"].items()) {
      merged["grid"].erase(fk);
    }
  }
  SearchSpec s = SearchSpec::FromJson(merged);
  if (!e.is_object() || !e.contains("seed")) s.seed = ~uint64_t{0};
  return s;
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key +
                      "' has the wrong type");
  }
}

// Manifest bookkeeping shared by the stages.
class Manifest {
 public:
  explicit Manifest(const PipelineConfig& c) {
    doc_["version"] = kVersion;
    doc_["config"] = c.ToJson();
    doc_["seeds"] = {{"master", c.seed},
                     {"split", c.SplitSeed()},
                     {"bootstrap", c.BootstrapSeed()}};
    if (c.dgp) doc_["seeds"]["draw"] = c.DrawSeed();
    doc_["stages"] = json::array();
    doc_["outputs"] = json::array();
    doc_["estimators"] = json::object();
  }

  json& doc() { return doc_; }
  void Stage(const std::string& name) {
    doc_["stages"].push_back({{"name", name}, {"status", "complete"}});
  }
  void Output(const std::string& file) { doc_["outputs"].push_back(file); }

 private:
  json doc_;
};

}  // namespace

uint64_t PipelineConfig::DrawSeed() const {
  return draw_seed ? *draw_seed : DeriveSeed(seed, kDrawStream);
}
uint64_t PipelineConfig::SplitSeed() const {
  return split_seed ? *split_seed : DeriveSeed(seed, kSplitStream);
}
uint64_t PipelineConfig::BootstrapSeed() const {
  return bootstrap_seed ? *bootstrap_seed : DeriveSeed(seed, kBootstrapStream);
}
uint64_t PipelineConfig::SearchSeed(size_t k) const {
  return DeriveSeed(seed, kSearchStream + k);
}

PipelineConfig PipelineConfig::FromJson(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "data",          "split",      "outcome",        "long_run_outcomes",
      "decomposition", "baseline_arm", "fallback_arm", "uniform_policies",
      "estimators",    "segment_variables", "bootstrap", "jobs",
      "output_dir",    "seed"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ConfigError("unknown config field '" + k + "'");
  }
  PipelineConfig c;
  if (!j.contains("data") || !j.at("data").is_object()) {
    throw ConfigError("config needs a 'data' object");
  }
  const json& d = j.at("data");
  const bool has_csv = d.contains("csv");
  const bool has_dgp = d.contains("dgp");
  if (has_csv == has_dgp) {
    throw ConfigError("data needs exactly one of 'csv' or 'dgp'");
  }
  if (has_csv) {
    c.csv = Resolve(base, d.at("csv").get<std::string>());
    if (!d.contains("roles")) throw ConfigError("csv data needs 'roles'");
    const json& r = d.at("roles");
    if (r.is_string()) {
      const fs::path rp = Resolve(base, r.get<std::string>());
      if (!fs::exists(rp)) {
        throw ConfigError("roles file " + rp.string() + " does not exist");
      }
      c.roles = LoadCsvRoles(rp);
    } else {
      c.roles = ParseCsvRoles(r.dump());
    }
  } else {
    const json& g = d.at("dgp");
    c.dgp = g.is_string()
                ? SyntheticDgp::FromJson(
                      ReadJsonFile(Resolve(base, g.get<std::string>())))
                : SyntheticDgp::FromJson(g);
    c.draw_size = Get<int64_t>(d, "n", 0);
    if (d.contains("seed")) c.draw_seed = d.at("seed").get<uint64_t>();
  }

  if (j.contains("split")) {
    const json& s = j.at("split");
    c.train_fraction = Get<double>(s, "train_fraction", c.train_fraction);
    if (s.contains("seed")) c.split_seed = s.at("seed").get<uint64_t>();
  }
  c.outcome = Get<std::string>(j, "outcome", "");
  c.long_run_outcomes =
      Get<std::vector<std::string>>(j, "long_run_outcomes", {});
  if (j.contains("decomposition")) {
    const json& dc = j.at("decomposition");
    c.decomposition = std::make_pair(Get<std::string>(dc, "success", ""),
                                     Get<std::string>(dc, "value", ""));
  }
  c.baseline_arm = Get<std::string>(j, "baseline_arm", "");
  c.fallback_arm = Get<std::string>(j, "fallback_arm", c.baseline_arm);
  c.uniform_policies = Get<bool>(j, "uniform_policies", true);
  if (j.contains("estimators")) {
    if (!j.at("estimators").is_array()) {
      throw ConfigError("'estimators' must be a list");
    }
    for (const auto& e : j.at("estimators")) {
      c.estimators.push_back(EstimatorSpec(e));
    }
  }
  c.segment_variables =
      Get<std::vector<std::string>>(j, "segment_variables", {});
  if (j.contains("bootstrap")) {
    const json& b = j.at("bootstrap");
    c.bootstrap_replicates = Get<int>(b, "replicates", c.bootstrap_replicates);
    if (b.contains("seed")) c.bootstrap_seed = b.at("seed").get<uint64_t>();
  }
  c.jobs = Get<int>(j, "jobs", 1);
  c.output_dir = Resolve(base, Get<std::string>(j, "output_dir", "out"));
  c.seed = Get<uint64_t>(j, "seed", 0);
  for (size_t k = 0; k < c.estimators.size(); ++k) {
    if (c.estimators[k].seed == ~uint64_t{0}) {
      c.estimators[k].seed = c.SearchSeed(k);
    }
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const fs::path& path) {
  return FromJson(ReadJsonFile(path), path.parent_path());
}

json PipelineConfig::ToJson() const {
  json j;
  if (dgp) {
    j["data"] = {{"dgp", dgp->ToJson()}, {"n", draw_size}, {"seed", DrawSeed()}};
  } else {
    j["data"] = {{"csv", csv.string()},
                 {"roles", roles ? RolesToJson(*roles) : json()}};
  }
  j["split"] = {{"train_fraction", train_fraction}, {"seed", SplitSeed()}};
  j["outcome"] = outcome;
  j["long_run_outcomes"] = long_run_outcomes;
  if (decomposition) {
    j["decomposition"] = {{"success", decomposition->first},
                          {"value", decomposition->second}};
  }
  j["baseline_arm"] = baseline_arm;
  j["fallback_arm"] = fallback_arm;
  j["uniform_policies"] = uniform_policies;
  j["estimators"] = json::array();
  for (const auto& e : estimators) j["estimators"].push_back(e.ToJson());
  j["segment_variables"] = segment_variables;
  j["bootstrap"] = {{"replicates", bootstrap_replicates},
                    {"seed", BootstrapSeed()}};
  j["jobs"] = jobs;
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  return j;
}

std::vector<std::string> ValidateConfig(const PipelineConfig& c) {
  std::vector<std::string> diag;
  if (c.dgp) {
    try {
      c.dgp->Validate();
    } catch (const Error& e) {
      diag.push_back(std::string("dgp: ") + e.what());
    }
    if (c.draw_size < 2) diag.push_back("dgp draw size n must be >= 2");
  } else if (!fs::exists(c.csv)) {
    diag.push_back("data file " + c.csv.string() + " does not exist");
  }
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    diag.push_back("split fraction out of (0,1)");
  }
  if (c.bootstrap_replicates < 2) {
    diag.push_back("bootstrap B_rep must be >= 2");
  }
  if (c.jobs < 1) diag.push_back("jobs must be >= 1");
  if (c.outcome.empty()) diag.push_back("config needs an 'outcome'");
  if (c.baseline_arm.empty()) diag.push_back("config needs a 'baseline_arm'");
  if (c.estimators.empty() && !c.uniform_policies) {
    diag.push_back("no estimator and no uniform policy requested");
  }
  std::set<std::string> seen;
  for (const auto& e : c.estimators) {
    try {
      e.Validate();
    } catch (const Error& err) {
      diag.push_back(e.estimator + ": " + err.what());
    }
    if (!seen.insert(e.estimator).second) {
      diag.push_back("estimator '" + e.estimator + "' listed twice");
    }
  }

  if (auto arms = DeclaredArms(c)) {
    CheckArmsAndOutcomes(c, *arms, DeclaredOutcomes(c), &diag);
  } else if (c.roles && fs::exists(c.csv)) {
    try {
      const ExperimentDataset ds = LoadCsv(c.csv, *c.roles);
      CheckArmsAndOutcomes(c, ds.arm_labels(), ds.outcome_names(), &diag);
    } catch (const Error& e) {
      diag.push_back(std::string("data: ") + e.what());
    }
  }
  return diag;
}

std::vector<std::string> ValidateConfigJson(const json& j,
                                            const fs::path& base_dir) {
  try {
    return ValidateConfig(PipelineConfig::FromJson(j, base_dir));
  } catch (const std::exception& e) {
    return {e.what()};
  }
}

std::string RewardsCsv(const std::vector<RewardRow>& rows) {
  std::string out = CsvLine({"policy", "outcome", "value", "ips", "improvement",
                             "pct_gain", "true_value"});
  for (const auto& r : rows) {
    out += CsvLine({r.policy, r.outcome, FormatDouble(r.value),
                    FormatDouble(r.ips), FormatDouble(r.improvement),
                    FormatDouble(r.pct_gain),
                    r.true_value ? FormatDouble(*r.true_value) : ""});
  }
  return out;
}

namespace {

std::string AllocationCsv(const std::vector<Policy>& policies,
                          const ExperimentDataset& ds) {
  std::string out = CsvLine({"policy", "arm", "count", "fraction"});
  for (const auto& p : policies) {
    const AllocationSummary a = Allocation(p, ds);
    for (size_t w = 0; w < a.arm_labels.size(); ++w) {
      out += CsvLine({p.name(), a.arm_labels[w], std::to_string(a.counts[w]),
                      FormatDouble(a.fractions[w])});
    }
  }
  return out;
}

// Rewards of every policy for every outcome, with the gain measured
// against the uniform policy on `baseline`.
std::vector<RewardRow> Rewards(const std::vector<Policy>& policies,
                               const Policy& baseline,
                               const ExperimentDataset& ds,
                               const std::vector<std::string>& outcomes,
                               const SyntheticDgp* dgp) {
  std::vector<RewardRow> rows;
  for (const auto& o : outcomes) {
    const double base = IpsEmpirical(baseline, ds, o).value;
    for (const auto& p : policies) {
      RewardRow r;
      r.policy = p.name();
      r.outcome = o;
      const UpsilonResult u = Upsilon(p, ds, o);
      r.value = u.ips_empirical;
      r.improvement = u.direct;
      r.ips = Ips(p, ds, o).value;
      r.pct_gain = 100.0 * (r.value - base) / base;
      if (dgp && o == dgp->outcome_name) r.true_value = TruePolicyValue(*dgp, p);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

PipelineResult RunPipeline(const PipelineConfig& config) {
  PipelineResult result;
  result.output_dir = config.output_dir;
  Manifest manifest(config);
  std::string stage = "validation";
  const fs::path out = config.output_dir;

  auto write = [&](const std::string& name, const std::string& text) {
    WriteText(out / name, text);
    manifest.Output(name);
  };

  try {
    // Created first so that a failed validation is still recorded.
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw RuntimeError("cannot create " + out.string());
    const auto diag = ValidateConfig(config);
    if (!diag.empty()) {
      std::string msg = diag.front();
      for (size_t k = 1; k < diag.size(); ++k) msg += "; " + diag[k];
      throw ConfigError(msg);
    }
    manifest.Stage(stage);

    stage = "load";
    const ExperimentDataset data =
        config.dgp ? Draw(*config.dgp, config.draw_size, config.DrawSeed(),
                          config.jobs)
                   : LoadCsv(config.csv, *config.roles);
    manifest.doc()["data"] = {{"units", data.size()},
                              {"arms", data.arm_labels()},
                              {"arm_counts", data.ArmCounts()}};
    manifest.Stage(stage);

    stage = "split";
    const SplitPair split =
        Split(data, config.train_fraction, config.SplitSeed());
    const ExperimentDataset& train = split.train;
    const ExperimentDataset& test = split.test;
    manifest.doc()["data"]["train_arm_counts"] = split.train_arm_counts;
    manifest.doc()["data"]["test_arm_counts"] = split.test_arm_counts;
    manifest.Stage(stage);

    const int baseline = test.ArmIndex(config.baseline_arm);
    const int fallback = train.ArmIndex(config.fallback_arm);
    std::vector<std::string> outcomes{config.outcome};
    for (const auto& o : config.long_run_outcomes) {
      if (!Contains(outcomes, o)) outcomes.push_back(o);
    }

    stage = "ate";
    for (const auto& o : outcomes) {
      write("ate_" + FileSafe(o) + ".csv",
            ComputeAteTable(test, o, baseline).ToCsv());
    }
    manifest.Stage(stage);

    std::vector<Policy> policies;
    for (const auto& spec_in : config.estimators) {
      SearchSpec spec = spec_in;
      spec.jobs = config.jobs;
      const std::string name = spec.estimator;
      json& record = manifest.doc()["estimators"][name];
      record["search_seed"] = spec.seed;
      if (IsOutcomeEstimator(name)) {
        stage = "tune:" + name;
        const SearchResult sr = Search(spec, train, {config.outcome});
        write("cv_" + name + ".csv", sr.ToCsv());
        manifest.Stage(stage);

        stage = "fit:" + name;
        auto model = std::make_shared<FittedOutcomeModel>(FitOutcomeEstimator(
            name, train, config.outcome, sr.chosen_setting(), config.jobs));
        record["chosen"] = sr.chosen_setting();
        record["hyperparameters"] = model->hyperparameters();
        record["training_mse"] = model->training_mse();
        WriteJson(out / ("model_" + name + ".json"), model->ToJson());
        manifest.Output("model_" + name + ".json");
        Policy p = Policy::FromOutcomeModel(model, name);
        WriteJson(out / ("policy_" + name + ".json"),
                  p.ToJson("model_" + name + ".json"));
        manifest.Output("policy_" + name + ".json");
        policies.push_back(std::move(p));
        manifest.Stage(stage);
      } else {
        stage = "fit:" + name;
        const int w = train.num_arms();
        auto cates = std::make_shared<PairwiseCates>(w);
        record["pairs"] = json::object();
        for (int a = 0; a < w; ++a) {
          for (int b = a + 1; b < w; ++b) {
            const std::string pair =
                train.arm_labels()[a] + "_vs_" + train.arm_labels()[b];
            stage = "tune:" + name + ":" + pair;
            const SearchResult sr =
                Search(spec, train, {config.outcome, a, b});
            write("cv_" + name + "_" + FileSafe(pair) + ".csv", sr.ToCsv());
            stage = "fit:" + name + ":" + pair;
            PairwiseCateModel m = FitCateEstimator(
                name, train, config.outcome, a, b, sr.chosen_setting(),
                config.jobs);
            record["pairs"][pair] = {{"chosen", sr.chosen_setting()},
                                     {"hyperparameters", m.hyperparameters()}};
            cates->Add(std::move(m));
          }
        }
        stage = "fit:" + name;
        WriteJson(out / ("model_" + name + ".json"), cates->ToJson());
        manifest.Output("model_" + name + ".json");
        write("cate_cdf_" + name + ".csv",
              CateCdfCsv(CateCdfExport(*cates, test)));
        Policy p = Policy::FromCates(cates, fallback, name);
        WriteJson(out / ("policy_" + name + ".json"),
                  p.ToJson("model_" + name + ".json"));
        manifest.Output("policy_" + name + ".json");
        policies.push_back(std::move(p));
        manifest.Stage(stage);
      }
    }

    stage = "policies";
    const Policy base_policy =
        Policy::Uniform(train.arm_labels(), train.ArmIndex(config.baseline_arm),
                        "uniform_" + config.baseline_arm);
    for (int w = 0; w < train.num_arms(); ++w) {
      const std::string label = train.arm_labels()[w];
      if (config.uniform_policies || label == config.baseline_arm) {
        policies.push_back(
            Policy::Uniform(train.arm_labels(), w, "uniform_" + label));
      }
    }
    for (const auto& p : policies) {
      write("policy_table_" + FileSafe(p.name()) + ".csv",
            PolicyTableCsv(p, test));
    }
    write("allocation.csv", AllocationCsv(policies, test));
    manifest.Stage(stage);

    stage = "evaluation";
    result.rewards = Rewards(policies, base_policy, test, outcomes,
                             config.dgp ? &*config.dgp : nullptr);
    write("rewards.csv", RewardsCsv(result.rewards));
    for (const auto& p : policies) {
      write("congruency_" + FileSafe(p.name()) + ".csv",
            Congruency(p, test, config.outcome).ToCsv());
      write("segments_" + FileSafe(p.name()) + ".csv",
            ProfileSegments(p, test, config.segment_variables, outcomes)
                .ToCsv());
    }
    manifest.Stage(stage);

    stage = "bootstrap";
    const BootstrapComparison bc =
        BootstrapCompare(policies, test, config.outcome,
                         config.bootstrap_replicates, config.BootstrapSeed(),
                         config.jobs);
    write("bootstrap_matrix.csv", bc.MatrixCsv());
    write("bootstrap_replicates.csv", bc.ReplicatesCsv());
    manifest.Stage(stage);

    if (config.decomposition) {
      stage = "decomposition";
      write("decomposition.csv",
            DecomposeOutcome(test, config.decomposition->first,
                             config.decomposition->second)
                .ToCsv());
      manifest.Stage(stage);
    }

    manifest.doc()["status"] = "complete";
    result.policies = std::move(policies);
  } catch (const Error& e) {
    manifest.doc()["status"] = "incomplete";
    manifest.doc()["failed_stage"] = stage;
    manifest.doc()["error"] = e.what();
    if (fs::is_directory(out)) WriteJson(out / "manifest.json", manifest.doc());
    throw Error(e.kind(), StageError(stage, e));
  } catch (const std::exception& e) {
    manifest.doc()["status"] = "incomplete";
    manifest.doc()["failed_stage"] = stage;
    manifest.doc()["error"] = e.what();
    if (fs::is_directory(out)) WriteJson(out / "manifest.json", manifest.doc());
    throw RuntimeError(StageError(stage, e));
  }
  WriteJson(out / "manifest.json", manifest.doc());
  result.manifest = manifest.doc();
  return result;
}

std::vector<RewardRow> EvaluatePolicy(const Policy& policy,
                                      const ExperimentDataset& ds,
                                      const std::vector<std::string>& outcomes,
                                      const std::string& baseline_arm,
                                      const fs::path& out_dir) {
  if (outcomes.empty()) throw ConfigError("no outcome to evaluate");
  const int base = policy.num_arms() > 0
                       ? static_cast<int>(std::find(policy.arm_labels().begin(),
                                                    policy.arm_labels().end(),
                                                    baseline_arm) -
                                          policy.arm_labels().begin())
                       : -1;
  if (base < 0 || base >= policy.num_arms() || ds.ArmIndex(baseline_arm) < 0) {
    throw ConfigError("baseline arm '" + baseline_arm + "' is not a known arm");
  }
  const Policy baseline = Policy::Uniform(policy.arm_labels(), base,
                                          "uniform_" + baseline_arm);
  std::vector<Policy> both{policy, baseline};
  std::vector<RewardRow> rows = Rewards(both, baseline, ds, outcomes, nullptr);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    WriteText(out_dir / "rewards.csv", RewardsCsv(rows));
    WriteText(out_dir / "allocation.csv", AllocationCsv({policy}, ds));
    WriteText(out_dir / ("congruency_" + FileSafe(policy.name()) + ".csv"),
              Congruency(policy, ds, outcomes.front()).ToCsv());
  }
  return rows;
}

json RolesJson(const ExperimentDataset& ds) {
  json j = {{"arm", "arm"},
            {"outcomes", ds.outcome_names()},
            {"covariates", ds.schema().variables},
            {"arm_order", ds.arm_labels()}};
  if (ds.known_propensities()) {
    json p = json::object();
    for (int w = 0; w < ds.num_arms(); ++w) {
      p[ds.arm_labels()[w]] = (*ds.known_propensities())[w];
    }
    j["propensities"] = p;
  }
  return j;
}

void SynthesizeCsv(const SyntheticDgp& dgp, int64_t n, uint64_t seed, int jobs,
                   const fs::path& csv_path) {
  if (n < 1) throw ConfigError("draw size must be >= 1");
  const ExperimentDataset ds = Draw(dgp, n, seed, jobs);
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  WriteDatasetCsv(csv_path, ds);
  fs::path roles = csv_path;
  roles.replace_extension(".roles.json");
  WriteJson(roles, RolesJson(ds));
}

}  // namespace uplift
