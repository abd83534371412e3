// Copyright 2026 The pbrl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PBRL_HARNESS_HPP_
#define PBRL_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbrl/agents.hpp"

namespace pbrl {

inline constexpr const char* kVersion = "pbrl 0.1.0";

// Synthetic environment description. Families:
//   random     random kernel, preference or feedback oracle of the given type
//   reference  single-step dueling problem over `A` arms with one best arm
//   trap       3-state chain where action 0 falls into an absorbing dead end
struct GeneratorSpec {
  std::string family = "random";
  int S = 2;
  int A = 2;
  int H = 2;
  std::string transition = "tabular";  // tabular | linear_mixture
  int d_P = 2;
  std::string setting = "pairwise";    // pairwise | once_per_episode
  std::string pref = "utility";        // utility | linear | logistic
  int d_T = 2;
  double logistic_scale = 4.0;
  std::string feedback = "utility_sum";  // utility_sum | linear_clipped
  int d_G = 2;
  // Reference family, pairwise: non-best arm features lie in
  // [-0.5, -0.5 + spread]; the best arm sits at 0.5.
  double spread = 0.8;
  PoolMode pool_mode = PoolMode::kExhaustive;
  std::size_t pool_cap = kDefaultPolicyCap;
  std::uint64_t seed = 0;
  bool require_condorcet = true;
  bool vary_with_seed = false;  // offset `seed` by the run seed

  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
};

// Draws instances until one has a Condorcet policy in its pool; throws
// GenerationFailed after 100 rejections.
Environment generate_environment(const GeneratorSpec& spec, Rng& rng);
Environment generate_environment(const GeneratorSpec& spec);

// Resolves an environment descriptor: {"generator": {...}} or an explicit
// instance (MDP fields plus pref/feedback, features and pool).
Environment resolve_environment(const nlohmann::json& descriptor,
                                std::uint64_t run_seed);

struct ExperimentConfig {
  nlohmann::json environment;
  std::vector<AgentConfig> agents;
  int episodes = 1;
  std::vector<std::uint64_t> seeds{0};
  std::string out = "runs";
  bool emit_records = true;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

struct RunSummary {
  std::vector<double> cumulative_regret;
  std::vector<double> cumulative_outer_regret;
  double final_regret = 0.0;
  double exponent_p = 0.0;
  double pistar_rate = 0.0;
  double coverage_rate = 0.0;
  double preference_coverage_rate = 0.0;
  double transition_coverage_rate = 0.0;
  double preference_bonus_exponent = 0.0;
  double transition_bonus_exponent = 0.0;
  double preference_bonus_total = 0.0;
  double transition_bonus_total = 0.0;

  nlohmann::json to_json() const;
};

// Least-squares slope of log R_k on log k over the second half of the curve,
// using only points with R_k > 0; 0 when fewer than two points qualify.
double growth_exponent(const std::vector<double>& curve);

RunSummary summarize(const std::vector<EpisodeRecord>& records);

struct RunLog {
  nlohmann::json manifest;
  std::vector<EpisodeRecord> records;
  RunSummary summary;
};

// One (agent, seed) cell of an experiment.
RunLog run_cell(const ExperimentConfig& config, std::size_t agent_index,
                std::uint64_t seed);
// Runs directly against a prepared environment.
RunLog run_agent(const Environment& env, const nlohmann::json& env_descriptor,
                 const AgentConfig& agent, int episodes, std::uint64_t seed);

std::string records_jsonl(const std::vector<EpisodeRecord>& records);
std::string cell_directory(const AgentConfig& agent, std::uint64_t seed);
void write_run(const RunLog& log, const std::string& dir, bool emit_records);

struct CellResult {
  std::string algo;
  std::uint64_t seed = 0;
  int episodes = 0;
  int n = 2;
  double c_beta = 0.0;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

// Runs every (agent, seed) cell in parallel (capped by PBRL_THREADS), writes
// per-cell outputs and summary.csv under `out`. Failed cells write error.json.
std::vector<CellResult> sweep(const ExperimentConfig& config,
                              const std::string& out);

// Re-executes the run described by a manifest and compares the regenerated
// record stream and summary against the files next to it.
bool replay_matches(const std::string& manifest_path, std::string* detail);

int thread_budget();

}  // namespace pbrl

#endif  // PBRL_HARNESS_HPP_
