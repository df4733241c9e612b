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

// Command-line front end: validate, run, synth and eval.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uplift/error.h"
#include "uplift/pipeline.h"
#include "uplift/policy.h"
#include "uplift/synth.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int ExitCode(uplift::ErrorKind kind) {
  switch (kind) {
    case uplift::ErrorKind::kConfig:
      return kExitConfig;
    case uplift::ErrorKind::kSchema:
    case uplift::ErrorKind::kParse:
    case uplift::ErrorKind::kData:
      return kExitData;
    case uplift::ErrorKind::kRuntime:
      return kExitRuntime;
  }
  return kExitRuntime;
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw uplift::ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw uplift::ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

uplift::PipelineConfig LoadConfig(const std::string& path,
                                  std::optional<uint64_t> seed,
                                  std::optional<int> jobs,
                                  const std::string& out) {
  uplift::PipelineConfig c = uplift::PipelineConfig::Load(path);
  if (seed) {
    // A seed on the command line replaces the master seed and every stage
    // seed derived from it.
    nlohmann::json j = ReadJson(path);
    j["seed"] = *seed;
    if (j.contains("split")) j["split"].erase("seed");
    if (j.contains("bootstrap")) j["bootstrap"].erase("seed");
    if (j.contains("data")) j["data"].erase("seed");
    c = uplift::PipelineConfig::FromJson(
        j, std::filesystem::path(path).parent_path());
  }
  if (jobs) c.jobs = *jobs;
  if (!out.empty()) c.output_dir = out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy learning and evaluation for multi-arm experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(uplift::kVersion));

  std::string config_path;
  std::string out;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;

  auto* validate = app.add_subcommand("validate", "Check a pipeline config");
  validate->add_option("--config", config_path, "Pipeline config JSON")
      ->required();

  auto* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--config", config_path, "Pipeline config JSON")->required();
  run->add_option("--out", out, "Output directory (overrides config)");
  run->add_option("--seed", seed, "Master seed (overrides config)");
  run->add_option("--jobs", jobs, "Worker threads");

  int64_t n = 0;
  auto* synth = app.add_subcommand("synth", "Draw a dataset from a DGP");
  synth->add_option("--config", config_path,
                    "DGP JSON, or a pipeline config with a dgp data source")
      ->required();
  synth->add_option("--out", out, "Output CSV path")->required();
  synth->add_option("--n", n, "Number of units (default: config draw size)");
  synth->add_option("--seed", seed, "Draw seed");
  synth->add_option("--jobs", jobs, "Worker threads");

  std::string policy_path, data_path, roles_path, baseline;
  std::vector<std::string> outcomes;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved policy on a CSV");
  eval->add_option("--policy", policy_path, "Policy JSON")->required();
  eval->add_option("--data", data_path, "Dataset CSV")->required();
  eval->add_option("--roles", roles_path, "Column roles JSON")->required();
  eval->add_option("--outcome", outcomes, "Outcome column(s)")->required();
  eval->add_option("--baseline", baseline, "Baseline arm label")->required();
  eval->add_option("--out", out, "Directory for report tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*validate) {
      const auto diag = uplift::ValidateConfigJson(
          ReadJson(config_path),
          std::filesystem::path(config_path).parent_path());
      if (diag.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& d : diag) std::cout << "error: " << d << "\n";
      return kExitConfig;
    }
    if (*run) {
      const auto config = LoadConfig(config_path, seed, jobs, out);
      const auto result = uplift::RunPipeline(config);
      std::cout << uplift::RewardsCsv(result.rewards);
      std::cout << "report written to " << result.output_dir.string() << "\n";
      return 0;
    }
    if (*synth) {
      const nlohmann::json j = ReadJson(config_path);
      uplift::SyntheticDgp dgp;
      int64_t size = n;
      uint64_t draw_seed = 0;
      if (j.contains("data")) {
        const auto c = uplift::PipelineConfig::FromJson(
            j, std::filesystem::path(config_path).parent_path());
        if (!c.dgp) throw uplift::ConfigError("config has no dgp data source");
        dgp = *c.dgp;
        if (size == 0) size = c.draw_size;
        draw_seed = c.DrawSeed();
      } else {
        dgp = uplift::SyntheticDgp::FromJson(j);
        draw_seed = dgp.seed;
      }
      if (seed) draw_seed = *seed;
      uplift::SynthesizeCsv(dgp, size, draw_seed, jobs.value_or(1), out);
      std::cout << "wrote " << size << " units to " << out << "\n";
      return 0;
    }
    if (*eval) {
      const uplift::Policy policy = uplift::Policy::Load(policy_path);
      const auto ds =
          uplift::LoadCsv(data_path, uplift::LoadCsvRoles(roles_path));
      const auto rows =
          uplift::EvaluatePolicy(policy, ds, outcomes, baseline, out);
      std::cout << uplift::RewardsCsv(rows);
      return 0;
    }
  } catch (const uplift::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
