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

#include "uplift/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "uplift/error.h"
#include "uplift/parallel.h"
#include "uplift/rng.h"

namespace uplift {
namespace {

bool NearOne(double s) { return std::abs(s - 1.0) <= 1e-9; }

std::vector<double> Cumulative(std::span<const double> p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

}  // namespace

void SyntheticDgp::Validate() const {
  if (arms.empty()) throw ConfigError("DGP declares no arms");
  if (std::set<std::string>(arms.begin(), arms.end()).size() != arms.size()) {
    throw ConfigError("DGP arm labels must be unique");
  }
  if (propensities.size() != arms.size()) {
    throw ConfigError("DGP needs one propensity per arm");
  }
  double ps = 0.0;
  for (double p : propensities) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ConfigError("DGP propensities must lie in (0, 1]");
    }
    ps += p;
  }
  if (!NearOne(ps)) throw ConfigError("DGP propensities must sum to 1");
  if (variables.size() != domains.size()) {
    throw ConfigError("DGP needs one category domain per variable");
  }
  if (std::set<std::string>(variables.begin(), variables.end()).size() !=
      variables.size()) {
    throw ConfigError("DGP variable names must be unique");
  }
  for (size_t v = 0; v < domains.size(); ++v) {
    const auto& d = domains[v];
    if (d.empty() ||
        std::set<std::string>(d.begin(), d.end()).size() != d.size()) {
      throw ConfigError("domain of '" + variables[v] +
                        "' must be nonempty with unique categories");
    }
  }
  if (cells.empty()) throw ConfigError("DGP declares no cells");
  if (variables.empty() && cells.size() != 1) {
    throw ConfigError("a DGP without covariates has exactly one cell");
  }
  std::set<std::vector<std::string>> seen;
  double mass = 0.0;
  for (size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    const std::string where = "DGP cell " + std::to_string(c);
    if (cell.labels.size() != variables.size()) {
      throw ConfigError(where + " has the wrong number of covariates");
    }
    for (size_t v = 0; v < variables.size(); ++v) {
      const auto& d = domains[v];
      if (std::find(d.begin(), d.end(), cell.labels[v]) == d.end()) {
        throw ConfigError(where + " uses category '" + cell.labels[v] +
                          "' outside the domain of '" + variables[v] + "'");
      }
    }
    if (!seen.insert(cell.labels).second) {
      throw ConfigError(where + " duplicates an earlier cell");
    }
    if (!(cell.mass >= 0.0) || !std::isfinite(cell.mass)) {
      throw ConfigError(where + " has a negative mass");
    }
    mass += cell.mass;
    if (cell.mean.size() != arms.size()) {
      throw ConfigError(where + " needs one response per arm");
    }
    for (double m : cell.mean) {
      if (!std::isfinite(m)) throw ConfigError(where + " has a non-finite mean");
      if (family == OutcomeFamily::kBernoulli && !(m >= 0.0 && m <= 1.0)) {
        throw ConfigError(where + " has a success probability outside [0, 1]");
      }
    }
    if (family == OutcomeFamily::kGaussian) {
      if (cell.sd.size() != arms.size()) {
        throw ConfigError(where + " needs one standard deviation per arm");
      }
      for (double s : cell.sd) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
          throw ConfigError(where + " has an invalid standard deviation");
        }
      }
    }
  }
  if (!NearOne(mass)) throw ConfigError("DGP cell masses must sum to 1");
  if (conditional) {
    if (family != OutcomeFamily::kBernoulli) {
      throw ConfigError("conditional outcomes need a Bernoulli primary outcome");
    }
    if (conditional->name.empty() || conditional->name == outcome_name) {
      throw ConfigError("conditional outcome needs a distinct name");
    }
    if (conditional->mean.size() != arms.size() || !(conditional->sd >= 0.0)) {
      throw ConfigError("conditional outcome needs one mean per arm and sd >= 0");
    }
  }
}

std::shared_ptr<const Schema> SyntheticDgp::MakeSchema() const {
  auto schema = std::make_shared<Schema>();
  std::vector<size_t> order(variables.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return variables[a] < variables[b]; });
  for (size_t v : order) {
    schema->variables.push_back(variables[v]);
    auto cats = domains[v];
    std::sort(cats.begin(), cats.end());
    schema->categories.push_back(std::move(cats));
  }
  return schema;
}

std::vector<int> SyntheticDgp::CellCodes(const Schema& schema) const {
  const int nv = schema.num_variables();
  std::vector<int> codes(cells.size() * nv, -1);
  for (size_t c = 0; c < cells.size(); ++c) {
    for (size_t v = 0; v < variables.size(); ++v) {
      const int sv = schema.VariableIndex(variables[v]);
      if (sv < 0) continue;
      codes[c * nv + sv] = schema.CategoryIndex(sv, cells[c].labels[v]);
    }
  }
  return codes;
}

nlohmann::json SyntheticDgp::ToJson() const {
  nlohmann::json j;
  nlohmann::json vars = nlohmann::json::array();
  for (size_t v = 0; v < variables.size(); ++v) {
    vars.push_back({{"name", variables[v]}, {"categories", domains[v]}});
  }
  j["variables"] = vars;
  j["arms"] = arms;
  j["propensities"] = propensities;
  j["family"] = family == OutcomeFamily::kBernoulli ? "bernoulli" : "gaussian";
  j["outcome"] = outcome_name;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cell;
    nlohmann::json cov = nlohmann::json::object();
    for (size_t v = 0; v < variables.size(); ++v) cov[variables[v]] = c.labels[v];
    cell["covariates"] = cov;
    cell["mass"] = c.mass;
    cell["mean"] = c.mean;
    if (family == OutcomeFamily::kGaussian) cell["sd"] = c.sd;
    cs.push_back(cell);
  }
  j["cells"] = cs;
  if (conditional) {
    j["conditional_outcome"] = {{"name", conditional->name},
                                {"mean", conditional->mean},
                                {"sd", conditional->sd}};
  }
  j["seed"] = seed;
  return j;
}

SyntheticDgp SyntheticDgp::FromJson(const nlohmann::json& j) {
  SyntheticDgp d;
  try {
    for (const auto& v : j.at("variables")) {
      d.variables.push_back(v.at("name").get<std::string>());
      d.domains.push_back(v.at("categories").get<std::vector<std::string>>());
    }
    d.arms = j.at("arms").get<std::vector<std::string>>();
    if (j.contains("propensities")) {
      d.propensities = j.at("propensities").get<std::vector<double>>();
    } else {
      d.propensities.assign(d.arms.size(), 1.0 / std::max<size_t>(1, d.arms.size()));
    }
    const std::string fam = j.value("family", "bernoulli");
    if (fam == "bernoulli") {
      d.family = OutcomeFamily::kBernoulli;
    } else if (fam == "gaussian") {
      d.family = OutcomeFamily::kGaussian;
    } else {
      throw ConfigError("unknown outcome family '" + fam + "'");
    }
    d.outcome_name = j.value("outcome", "y");
    for (const auto& c : j.at("cells")) {
      SyntheticCell cell;
      const auto& cov = c.at("covariates");
      for (const auto& name : d.variables) {
        cell.labels.push_back(cov.at(name).get<std::string>());
      }
      cell.mass = c.at("mass").get<double>();
      cell.mean = c.at("mean").get<std::vector<double>>();
      if (c.contains("sd")) cell.sd = c.at("sd").get<std::vector<double>>();
      d.cells.push_back(std::move(cell));
    }
    if (j.contains("conditional_outcome")) {
      const auto& co = j.at("conditional_outcome");
      d.conditional = ConditionalOutcome{co.at("name").get<std::string>(),
                                         co.at("mean").get<std::vector<double>>(),
                                         co.value("sd", 0.0)};
    }
    d.seed = j.value("seed", uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed DGP: ") + e.what());
  }
  d.Validate();
  return d;
}

SyntheticDgp SyntheticDgp::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open DGP file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("DGP file " + path.string() + ": " + e.what());
  }
  return FromJson(j);
}

ExperimentDataset Draw(const SyntheticDgp& dgp, int64_t n, uint64_t seed,
                       int jobs) {
  if (n < 1) throw ConfigError("draw needs n >= 1");
  dgp.Validate();
  auto schema = dgp.MakeSchema();
  auto table = std::make_shared<ExperimentDataset::CellTable>();
  table->num_variables = schema->num_variables();
  table->codes = dgp.CellCodes(*schema);

  std::vector<double> mass(dgp.cells.size());
  for (size_t c = 0; c < mass.size(); ++c) mass[c] = dgp.cells[c].mass;
  const std::vector<double> cell_cdf = Cumulative(mass);
  const std::vector<double> arm_cdf = Cumulative(dgp.propensities);

  std::vector<int> cell(n), arm(n);
  std::vector<double> y(n), y2(dgp.conditional ? n : 0);
  const int64_t shards = (n + kDrawShardSize - 1) / kDrawShardSize;
  ParallelFor(shards, jobs, [&](int64_t s) {
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(s)));
    const int64_t end = std::min(n, (s + 1) * kDrawShardSize);
    for (int64_t i = s * kDrawShardSize; i < end; ++i) {
      const int c = rng.Categorical(cell_cdf);
      const int a = rng.Categorical(arm_cdf);
      cell[i] = c;
      arm[i] = a;
      const SyntheticCell& sc = dgp.cells[c];
      if (dgp.family == OutcomeFamily::kBernoulli) {
        y[i] = rng.Bernoulli(sc.mean[a]) ? 1.0 : 0.0;
        if (dgp.conditional) {
          const auto& co = *dgp.conditional;
          y2[i] = y[i] > 0.0
                      ? std::max(0.0, co.mean[a] + co.sd * rng.Normal())
                      : 0.0;
        }
      } else {
        y[i] = sc.mean[a] + sc.sd[a] * rng.Normal();
      }
    }
  });

  std::vector<std::string> names{dgp.outcome_name};
  std::vector<std::vector<double>> outcomes;
  outcomes.push_back(std::move(y));
  if (dgp.conditional) {
    names.push_back(dgp.conditional->name);
    outcomes.push_back(std::move(y2));
  }
  return ExperimentDataset::FromColumns(std::move(schema), std::move(table),
                                        dgp.arms, std::move(cell),
                                        std::move(arm), std::move(names),
                                        std::move(outcomes), dgp.propensities);
}

double TruePolicyValue(const SyntheticDgp& dgp,
                       std::span<const int> arm_of_cell) {
  if (arm_of_cell.size() != dgp.cells.size()) {
    throw DataError("policy must assign an arm to every DGP cell");
  }
  double v = 0.0;
  for (size_t c = 0; c < dgp.cells.size(); ++c) {
    const int a = arm_of_cell[c];
    if (a < 0 || a >= dgp.num_arms()) {
      throw DataError("policy assigns invalid arm " + std::to_string(a) +
                      " to DGP cell " + std::to_string(c));
    }
    v += dgp.cells[c].mass * dgp.cells[c].mean[a];
  }
  return v;
}

OracleAnswers EnumerateOptimal(const SyntheticDgp& dgp) {
  OracleAnswers out;
  out.optimal_arm.resize(dgp.cells.size());
  for (size_t c = 0; c < dgp.cells.size(); ++c) {
    const auto& m = dgp.cells[c].mean;
    // max_element returns the first maximum, i.e. the lowest arm on ties.
    out.optimal_arm[c] =
        static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin());
  }
  out.optimal_value = TruePolicyValue(dgp, out.optimal_arm);
  return out;
}

SyntheticDgp RandomDgp(const RandomDgpOptions& options, uint64_t seed) {
  if (options.num_cells < 1 || options.num_arms < 1) {
    throw ConfigError("random DGP needs at least one cell and one arm");
  }
  if (!(options.min_gap >= 0.0) ||
      options.base_high - options.min_gap - 0.1 < 0.0 ||
      !(options.base_low <= options.base_high) || options.base_high > 1.0) {
    throw ConfigError("random DGP probability range cannot fit the gap");
  }
  Rng rng(seed);
  SyntheticDgp d;
  d.variables = {"segment"};
  d.domains.emplace_back();
  const int width = static_cast<int>(std::to_string(options.num_cells - 1).size());
  for (int c = 0; c < options.num_cells; ++c) {
    std::string id = std::to_string(c);
    d.domains[0].push_back("s" + std::string(width - id.size(), '0') + id);
  }
  for (int a = 0; a < options.num_arms; ++a) {
    d.arms.push_back("arm" + std::to_string(a));
  }
  d.propensities = options.propensities.empty()
                       ? std::vector<double>(options.num_arms,
                                             1.0 / options.num_arms)
                       : options.propensities;
  double total = 0.0;
  for (int c = 0; c < options.num_cells; ++c) {
    SyntheticCell cell;
    cell.labels = {d.domains[0][c]};
    cell.mass = 0.5 + rng.Uniform();
    total += cell.mass;
    const int best = static_cast<int>(rng.UniformIndex(options.num_arms));
    const double top =
        std::max(options.base_low, options.min_gap + 0.1) +
        rng.Uniform() * (options.base_high -
                         std::max(options.base_low, options.min_gap + 0.1));
    cell.mean.resize(options.num_arms);
    for (int a = 0; a < options.num_arms; ++a) {
      cell.mean[a] =
          a == best ? top : top - options.min_gap - 0.1 * rng.Uniform();
    }
    d.cells.push_back(std::move(cell));
  }
  for (auto& c : d.cells) c.mass /= total;
  d.seed = seed;
  d.Validate();
  return d;
}

}  // namespace uplift
