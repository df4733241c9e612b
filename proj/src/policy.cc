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

#include "uplift/policy.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uplift/csv.h"
#include "uplift/error.h"

namespace uplift {
namespace {

int LabelIndex(const std::vector<std::string>& labels, const std::string& l) {
  auto it = std::find(labels.begin(), labels.end(), l);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

void CheckArm(int arm, size_t num_arms, const char* what) {
  if (arm < 0 || arm >= static_cast<int>(num_arms)) {
    throw ConfigError(std::string(what) + " arm " + std::to_string(arm) +
                      " is not one of the " + std::to_string(num_arms) +
                      " arms");
  }
}

std::vector<int> Translate(const Schema& from, const Schema& to,
                           std::span<const int> codes) {
  const int nf = from.num_variables();
  const int nt = to.num_variables();
  const size_t cells = nf == 0 ? 1 : codes.size() / nf;
  std::vector<int> out(cells * nt);
  CodeTranslator tr(from, to);
  for (size_t c = 0; c < cells; ++c) {
    tr.Translate(codes.subspan(c * nf, nf),
                 std::span<int>(out).subspan(c * nt, nt));
  }
  return out;
}

nlohmann::json SchemaJson(const Schema& s) {
  return {{"variables", s.variables}, {"categories", s.categories}};
}

}  // namespace

std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kUniform:
      return "uniform";
    case PolicyKind::kOutcomeBased:
      return "outcome_based";
    case PolicyKind::kCateBased:
      return "cate_based";
    case PolicyKind::kTable:
      return "table";
  }
  return "uniform";
}

std::string Signature(const Schema& schema, std::span<const int> codes) {
  std::string s;
  for (int v = 0; v < schema.num_variables(); ++v) {
    if (v > 0) s += ';';
    s += schema.variables[v];
    s += '=';
    s += codes[v] < 0 ? std::string("?") : schema.categories[v][codes[v]];
  }
  return s;
}

int DominantArm(std::span<const double> effects, int num_arms) {
  for (int j = 0; j < num_arms; ++j) {
    bool dominates = true;
    for (int k = 0; k < num_arms && dominates; ++k) {
      if (k != j && !(effects[j * num_arms + k] >= 0.0)) dominates = false;
    }
    if (dominates) return j;
  }
  return -1;
}

Policy Policy::Uniform(std::vector<std::string> arm_labels, int arm,
                       std::string name) {
  CheckArm(arm, arm_labels.size(), "uniform policy");
  Policy p;
  p.kind_ = PolicyKind::kUniform;
  p.arm_labels_ = std::move(arm_labels);
  p.arm_ = arm;
  p.name_ = name.empty() ? "uniform_" + p.arm_labels_[arm] : std::move(name);
  return p;
}

Policy Policy::FromOutcomeModel(std::shared_ptr<const FittedOutcomeModel> model,
                                std::string name) {
  if (!model || !model->fitted()) {
    throw ConfigError("outcome policy needs a fitted model");
  }
  Policy p;
  p.kind_ = PolicyKind::kOutcomeBased;
  p.arm_labels_ = model->encoder().arm_labels();
  p.name_ = name.empty() ? std::string(OutcomeModelKindName(model->kind()))
                         : std::move(name);
  p.model_ = std::move(model);
  return p;
}

Policy Policy::FromCates(std::shared_ptr<const PairwiseCates> cates,
                         int fallback, std::string name) {
  if (!cates || cates->num_arms() < 2) {
    throw ConfigError("CATE policy needs models for at least two arms");
  }
  const int w = cates->num_arms();
  for (int a = 0; a < w; ++a) {
    for (int b = a + 1; b < w; ++b) {
      if (!cates->Has(a, b)) {
        throw ConfigError("CATE policy is missing the model for arm pair (" +
                          std::to_string(a) + ", " + std::to_string(b) + ")");
      }
    }
  }
  const auto& labels = cates->Get(0, 1).arm_labels();
  CheckArm(fallback, labels.size(), "fallback");
  Policy p;
  p.kind_ = PolicyKind::kCateBased;
  p.arm_labels_ = labels;
  p.arm_ = fallback;
  p.name_ = name.empty() ? "cate" : std::move(name);
  p.cates_ = std::move(cates);
  return p;
}

Policy Policy::Table(std::shared_ptr<const Schema> schema,
                     std::vector<std::string> arm_labels,
                     std::map<std::string, int> arm_of_signature,
                     int default_arm, std::string name) {
  if (!schema) throw ConfigError("table policy needs a schema");
  CheckArm(default_arm, arm_labels.size(), "default");
  for (const auto& [sig, arm] : arm_of_signature) {
    CheckArm(arm, arm_labels.size(), ("table entry '" + sig + "'").c_str());
  }
  Policy p;
  p.kind_ = PolicyKind::kTable;
  p.schema_ = std::move(schema);
  p.arm_labels_ = std::move(arm_labels);
  p.table_ = std::move(arm_of_signature);
  p.arm_ = default_arm;
  p.name_ = name.empty() ? "table" : std::move(name);
  return p;
}

Policy Policy::TableFromCells(const ExperimentDataset& ds,
                              std::span<const int> arm_of_cell, int default_arm,
                              std::string name) {
  if (static_cast<int>(arm_of_cell.size()) != ds.num_cells()) {
    throw ConfigError("table policy needs one arm per cell");
  }
  std::map<std::string, int> table;
  for (int c = 0; c < ds.num_cells(); ++c) {
    table[Signature(ds.schema(), ds.cell_codes(c))] = arm_of_cell[c];
  }
  return Table(ds.schema_ptr(), ds.arm_labels(), std::move(table), default_arm,
               std::move(name));
}

std::vector<int> Policy::AssignCodes(const Schema& schema,
                                     std::span<const int> codes) const {
  const int nv = schema.num_variables();
  const size_t cells = nv == 0 ? 1 : codes.size() / nv;
  std::vector<int> out(cells, arm_);
  switch (kind_) {
    case PolicyKind::kUniform:
      break;
    case PolicyKind::kOutcomeBased: {
      const Schema& ms = model_->encoder().schema();
      const auto t = Translate(schema, ms, codes);
      const int mv = ms.num_variables();
      for (size_t c = 0; c < cells; ++c) {
        std::span<const int> cc(t.data() + c * mv, mv);
        int best = 0;
        double best_value = model_->Predict(cc, 0);
        for (int a = 1; a < num_arms(); ++a) {
          const double v = model_->Predict(cc, a);
          if (v > best_value) {
            best_value = v;
            best = a;
          }
        }
        out[c] = best;
      }
      break;
    }
    case PolicyKind::kCateBased: {
      const int w = num_arms();
      std::vector<double> effects(cells * w * w, 0.0);
      for (const auto& [key, m] : cates_->models()) {
        const Schema& ms = m.encoder().schema();
        const auto t = Translate(schema, ms, codes);
        const int mv = ms.num_variables();
        const int a = key.first, b = key.second;
        const double sign = m.treated() == a ? 1.0 : -1.0;
        for (size_t c = 0; c < cells; ++c) {
          const double tau =
              sign * m.Estimate(std::span<const int>(t.data() + c * mv, mv));
          effects[(c * w + a) * w + b] = tau;
          effects[(c * w + b) * w + a] = -tau;
        }
      }
      for (size_t c = 0; c < cells; ++c) {
        const int d = DominantArm(
            std::span<const double>(effects).subspan(c * w * w, w * w), w);
        out[c] = d >= 0 ? d : arm_;
      }
      break;
    }
    case PolicyKind::kTable: {
      const auto t = Translate(schema, *schema_, codes);
      const int tv = schema_->num_variables();
      for (size_t c = 0; c < cells; ++c) {
        auto it = table_.find(
            Signature(*schema_, std::span<const int>(t.data() + c * tv, tv)));
        if (it != table_.end()) out[c] = it->second;
      }
      break;
    }
  }
  return out;
}

int Policy::Assign(const Schema& schema, std::span<const int> codes) const {
  return AssignCodes(schema, codes.first(schema.num_variables()))[0];
}

std::vector<int> Policy::ToDatasetArms(const std::vector<std::string>& labels,
                                       const std::vector<int>& arms) const {
  std::vector<int> map(num_arms());
  for (int a = 0; a < num_arms(); ++a) {
    map[a] = LabelIndex(labels, arm_labels_[a]);
  }
  std::vector<int> out(arms.size());
  for (size_t i = 0; i < arms.size(); ++i) {
    out[i] = map[arms[i]];
    if (out[i] < 0) {
      throw DataError("policy '" + name_ + "' prescribes arm '" +
                      arm_labels_[arms[i]] + "' which the data does not have");
    }
  }
  return out;
}

std::vector<int> Policy::AssignCells(const ExperimentDataset& ds) const {
  std::vector<int> codes;
  codes.reserve(static_cast<size_t>(ds.num_cells()) * ds.num_variables());
  for (int c = 0; c < ds.num_cells(); ++c) {
    auto cc = ds.cell_codes(c);
    codes.insert(codes.end(), cc.begin(), cc.end());
  }
  std::vector<int> arms = AssignCodes(ds.schema(), codes);
  arms.resize(ds.num_cells());
  return ToDatasetArms(ds.arm_labels(), arms);
}

std::vector<int> Policy::AssignUnits(const ExperimentDataset& ds) const {
  const auto cells = AssignCells(ds);
  std::vector<int> out(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) out[i] = cells[ds.cell(i)];
  return out;
}

std::vector<int> Policy::AssignDgp(const SyntheticDgp& dgp) const {
  const auto schema = dgp.MakeSchema();
  std::vector<int> arms = AssignCodes(*schema, dgp.CellCodes(*schema));
  arms.resize(dgp.cells.size());
  return ToDatasetArms(dgp.arms, arms);
}

nlohmann::json Policy::ToJson(const std::string& model_file) const {
  nlohmann::json j = {{"format", "uplift.policy"},
                      {"version", 1},
                      {"kind", std::string(PolicyKindName(kind_))},
                      {"name", name_},
                      {"arms", arm_labels_}};
  switch (kind_) {
    case PolicyKind::kUniform:
      j["arm"] = arm_labels_[arm_];
      break;
    case PolicyKind::kOutcomeBased:
      j["model_file"] = model_file;
      break;
    case PolicyKind::kCateBased:
      j["fallback"] = arm_labels_[arm_];
      j["model_file"] = model_file;
      break;
    case PolicyKind::kTable: {
      j["schema"] = SchemaJson(*schema_);
      j["default_arm"] = arm_labels_[arm_];
      nlohmann::json t = nlohmann::json::object();
      for (const auto& [sig, arm] : table_) t[sig] = arm_labels_[arm];
      j["table"] = t;
      break;
    }
  }
  return j;
}

Policy Policy::FromJson(const nlohmann::json& j,
                        const std::filesystem::path& base_dir) {
  try {
    const auto arms = j.at("arms").get<std::vector<std::string>>();
    const std::string kind = j.at("kind").get<std::string>();
    const std::string name = j.value("name", "");
    auto arm_of = [&](const std::string& key) {
      const int a = LabelIndex(arms, j.at(key).get<std::string>());
      if (a < 0) throw ConfigError("policy field '" + key + "' names no arm");
      return a;
    };
    auto read_model = [&]() {
      const auto path = base_dir / j.at("model_file").get<std::string>();
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open model file " + path.string());
      std::stringstream ss;
      ss << in.rdbuf();
      return nlohmann::json::parse(ss.str());
    };
    if (kind == "uniform") return Uniform(arms, arm_of("arm"), name);
    if (kind == "outcome_based") {
      auto m = std::make_shared<FittedOutcomeModel>(
          FittedOutcomeModel::FromJson(read_model()));
      return FromOutcomeModel(std::move(m), name);
    }
    if (kind == "cate_based") {
      auto c = std::make_shared<PairwiseCates>(
          PairwiseCates::FromJson(read_model()));
      return FromCates(std::move(c), arm_of("fallback"), name);
    }
    if (kind == "table") {
      auto schema = std::make_shared<Schema>();
      schema->variables =
          j.at("schema").at("variables").get<std::vector<std::string>>();
      schema->categories = j.at("schema")
                               .at("categories")
                               .get<std::vector<std::vector<std::string>>>();
      if (schema->categories.size() != schema->variables.size()) {
        throw ConfigError("table policy schema is inconsistent");
      }
      std::map<std::string, int> table;
      for (const auto& [sig, label] : j.at("table").items()) {
        const int a = LabelIndex(arms, label.get<std::string>());
        if (a < 0) throw ConfigError("table entry '" + sig + "' names no arm");
        table[sig] = a;
      }
      return Table(std::move(schema), arms, std::move(table),
                   arm_of("default_arm"), name);
    }
    throw ConfigError("unknown policy kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed policy: ") + e.what());
  }
}

Policy Policy::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open policy file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("policy file " + path.string() + ": " + e.what());
  }
  return FromJson(j, path.parent_path());
}

AllocationSummary Allocation(const Policy& policy,
                             const ExperimentDataset& ds) {
  if (ds.empty()) throw DataError("allocation of an empty dataset");
  AllocationSummary s;
  s.arm_labels = ds.arm_labels();
  s.counts.assign(ds.num_arms(), 0);
  for (int a : policy.AssignUnits(ds)) ++s.counts[a];
  for (int64_t c : s.counts) {
    s.fractions.push_back(static_cast<double>(c) /
                          static_cast<double>(ds.size()));
  }
  return s;
}

std::string PolicyTableCsv(const Policy& policy, const ExperimentDataset& ds) {
  const auto arms = policy.AssignCells(ds);
  std::vector<std::pair<std::string, std::string>> rows;
  for (int c = 0; c < ds.num_cells(); ++c) {
    rows.emplace_back(ds.CellSignature(c), ds.arm_labels()[arms[c]]);
  }
  std::sort(rows.begin(), rows.end());
  std::string out = CsvLine({"cell", "arm"});
  for (const auto& [sig, arm] : rows) out += CsvLine({sig, arm});
  return out;
}

double TruePolicyValue(const SyntheticDgp& dgp, const Policy& policy) {
  return TruePolicyValue(dgp, policy.AssignDgp(dgp));
}

}  // namespace uplift
