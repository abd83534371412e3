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


#include <cmath>

#include "doctest.h"
#include "pbrl/agents.hpp"
#include "pbrl/error.hpp"
#include "pbrl/harness.hpp"

using namespace pbrl;

namespace {

Environment random_env(std::string pref, std::uint64_t seed, int H = 2) {
  GeneratorSpec g;
  g.S = 2;
  g.A = 2;
  g.H = H;
  g.pref = std::move(pref);
  g.d_T = 2;
  g.seed = seed;
  return generate_environment(g);
}

// One state, two arms, one step; feedback probability r[a] for arm a.
Environment arms(double r0, double r1) {
  auto mdp = EpisodicMDP::tabular(1, 2, 1, 0, {1.0, 1.0});
  auto fb = FeedbackModel::utility_sum(1, 2, 1, {r0, r1});
  return make_environment(std::move(mdp), std::nullopt, std::move(fb),
                          enumerate_policy_pool(1, 2, 1, PoolMode::kExhaustive));
}

std::vector<EpisodeRecord> run(const Environment& env, AgentConfig cfg, int K,
                               std::uint64_t seed) {
  cfg.episodes = K;
  Agent agent(env, cfg);
  Rng rng(seed);
  std::vector<EpisodeRecord> out;
  for (int k = 0; k < K; ++k) out.push_back(agent.run_episode(rng));
  return out;
}

std::string dump(const std::vector<EpisodeRecord>& recs) {
  std::string s;
  for (const auto& r : recs) s += record_to_json(r).dump() + "\n";
  return s;
}

}  // namespace

TEST_CASE("log sizes grow by the documented amounts") {
  const auto env = random_env("linear", 1);
  AgentConfig cfg;
  cfg.episodes = 12;
  Agent pbop(env, cfg);
  Rng rng(0);
  for (int k = 1; k <= 12; ++k) {
    pbop.run_episode(rng);
    CHECK(pbop.preference_log().size() == static_cast<std::size_t>(k));
    CHECK(pbop.transition_log().size() == static_cast<std::size_t>(2 * 2 * k));
  }
  cfg.algorithm = Algorithm::kPbopPlus;
  cfg.n = 4;
  Agent plus(env, cfg);
  for (int k = 1; k <= 6; ++k) {
    const auto rec = plus.run_episode(rng);
    CHECK(rec.policies.size() == 4);
    CHECK(rec.preferences.size() == 6);
    CHECK(plus.preference_log().size() == static_cast<std::size_t>(6 * k));
    CHECK(plus.transition_log().size() == static_cast<std::size_t>(4 * 2 * k));
  }
}

TEST_CASE("records are reproducible under a fixed seed") {
  const auto env = random_env("utility", 2);
  for (auto algo : {Algorithm::kPbop, Algorithm::kUniformRandom, Algorithm::kGreedyNoBonus}) {
    AgentConfig cfg;
    cfg.algorithm = algo;
    CHECK(dump(run(env, cfg, 40, 5)) == dump(run(env, cfg, 40, 5)));
  }
  const auto fenv = arms(0.7, 0.2);
  for (auto algo : {Algorithm::kOncePerEpisode, Algorithm::kReduction}) {
    AgentConfig cfg;
    cfg.algorithm = algo;
    CHECK(dump(run(fenv, cfg, 40, 6)) == dump(run(fenv, cfg, 40, 6)));
  }
}

TEST_CASE("raw bonuses bound the clipped ones") {
  const auto env = random_env("linear", 3, 3);
  AgentConfig cfg;
  const auto recs = run(env, cfg, 30, 1);
  CHECK(recs[1].raw_transition_bonus > 1.0);  // H per-step bonuses near 1 early on
  for (const auto& r : recs) {
    CHECK(r.raw_preference_bonus >= r.preference_bonus - 1e-15);
    CHECK(r.raw_transition_bonus >= r.transition_bonus - 1e-15);
  }
}

TEST_CASE("regret contribution is the oracle sum against the winner") {
  const auto env = random_env("linear", 3);
  AgentConfig cfg;
  const auto recs = run(env, cfg, 60, 7);
  for (const auto& r : recs) {
    double want = 0.0;
    for (int p : r.policies) {
      want += policy_pref(*env.preference, env.mdp, env.pool[env.optimal_index], env.pool[p]) - 0.5;
    }
    CHECK(r.regret == doctest::Approx(want).epsilon(1e-12));
    CHECK(r.regret >= -1e-9);
  }
}

TEST_CASE("the first episode plans over the whole pool") {
  const auto env = random_env("logistic", 4);
  AgentConfig cfg;
  const auto recs = run(env, cfg, 1, 1);
  CHECK(recs[0].set_size == static_cast<int>(env.pool.size()));
  CHECK(recs[0].optimal_in_set);
  CHECK(recs[0].objective > 0.0);
}

TEST_CASE("the n-wise agent with two policies and equal radii is the pairwise agent") {
  const auto env = random_env("linear", 5);
  AgentConfig a;
  a.beta_preference = 1.3;
  a.beta_transition = 2.1;
  AgentConfig b = a;
  b.algorithm = Algorithm::kPbopPlus;
  b.n = 2;
  CHECK(dump(run(env, a, 60, 11)) == dump(run(env, b, 60, 11)));
}

TEST_CASE("radius overrides and defaults") {
  const auto env = random_env("linear", 6);
  AgentConfig cfg;
  cfg.episodes = 100;
  Agent plain(env, cfg);
  CHECK(plain.beta(Stream::kPreference) > 0.0);
  CHECK(plain.beta(Stream::kTransition) > 0.0);
  cfg.beta_preference = 0.5;
  Agent over(env, cfg);
  CHECK(over.beta(Stream::kPreference) == 0.5);
  CHECK(over.beta(Stream::kTransition) == plain.beta(Stream::kTransition));
}

TEST_CASE("constant feedback makes every policy optimal") {
  auto mdp = EpisodicMDP::tabular(2, 2, 2, 0, {0.5, 0.5, 1, 0, 0.2, 0.8, 0, 1});
  auto fb = FeedbackModel::utility_sum(2, 2, 2, {0.2, 0.2, 0.2, 0.2});
  const auto env = make_environment(std::move(mdp), std::nullopt, std::move(fb),
                                    enumerate_policy_pool(2, 2, 2, PoolMode::kExhaustive));
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kOncePerEpisode;
  for (const auto& r : run(env, cfg, 50, 3)) {
    CHECK(r.regret == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.policies.size() == 1);
    CHECK(r.feedback.size() == 1);
  }
}

TEST_CASE("reduction bits follow the feedback comparison") {
  const auto env = arms(0.0, 1.0);
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kReduction;
  int decided = 0;
  for (const auto& r : run(env, cfg, 200, 4)) {
    REQUIRE(r.feedback.size() == 2);
    REQUIRE(r.preferences.size() == 1);
    CHECK(r.outer_regret.has_value());
    if (r.feedback[0] != r.feedback[1]) {
      CHECK(r.preferences[0] == (r.feedback[0] > r.feedback[1] ? 1 : 0));
      ++decided;
    }
  }
  CHECK(decided > 0);
}

TEST_CASE("equal feedback falls back to a fair coin") {
  const auto env = arms(1.0, 1.0);
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kReduction;
  cfg.inner = Algorithm::kUniformRandom;
  const int n = 100000;
  int ones = 0;
  for (const auto& r : run(env, cfg, n, 8)) {
    CHECK(r.feedback[0] == 1);
    ones += r.preferences[0];
  }
  CHECK(std::abs(ones / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
}

TEST_CASE("uniform baseline regret matches the pool average") {
  const auto env = random_env("linear", 9);
  double mean = 0.0;
  double sq = 0.0;
  const double P = static_cast<double>(env.pool.size());
  for (std::size_t p = 0; p < env.pool.size(); ++p) {
    const double g = env.pref_matrix(env.optimal_index, p) - 0.5;
    mean += g / P;
    sq += g * g / P;
  }
  // Two independent draws per episode.
  const double var = 2 * (sq - mean * mean);
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kUniformRandom;
  const int n = 10000;
  double total = 0.0;
  for (const auto& r : run(env, cfg, n, 10)) {
    total += r.regret;
    CHECK(r.set_size == static_cast<int>(env.pool.size()));
    CHECK_FALSE(r.covered_preference.has_value());
  }
  CHECK(std::abs(total / n - 2 * mean) <= 3 * std::sqrt(var / n));
}

TEST_CASE("greedy without bonuses takes the first pair of its set") {
  const auto env = random_env("linear", 12);
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kGreedyNoBonus;
  const auto recs = run(env, cfg, 20, 2);
  CHECK(recs[0].policies == std::vector<int>{0, 0});
  CHECK(recs[0].set_size == static_cast<int>(env.pool.size()));
  for (const auto& r : recs) {
    CHECK(r.policies[0] == r.policies[1]);
    CHECK(r.objective == 0.0);
  }
}

TEST_CASE("agent config json round-trip and validation") {
  AgentConfig cfg;
  cfg.algorithm = Algorithm::kPbopPlus;
  cfg.n = 3;
  cfg.episodes = 77;
  cfg.c_beta = 0.4;
  cfg.beta_transition = 3.0;
  cfg.planning.mode = ExpectationMode::kMonteCarlo;
  cfg.planning.samples = 50;
  const auto back = AgentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.n == 3);
  CHECK(back.beta_transition == 3.0);
  CHECK_FALSE(back.beta_preference.has_value());

  AgentConfig bad;
  bad.algorithm = Algorithm::kPbopPlus;
  bad.n = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.n = 2;
  bad.episodes = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(algorithm_from_name("nope"), InvalidArgument);
  CHECK(algorithm_from_name(algorithm_name(Algorithm::kReduction)) == Algorithm::kReduction);
}

TEST_CASE("environment json round-trip") {
  for (const char* pref : {"utility", "linear", "logistic"}) {
    const auto env = random_env(pref, 13);
    const auto back = environment_from_json(environment_to_json(env));
    CHECK(back.optimal_index == env.optimal_index);
    CHECK((back.pref_matrix - env.pref_matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.pool.codes == env.pool.codes);
  }
  const auto fenv = arms(0.3, 0.6);
  const auto fb = environment_from_json(environment_to_json(fenv));
  CHECK(fb.values == fenv.values);
  CHECK(fb.optimal_index == 1);
}

TEST_CASE("feedback environments use value differences") {
  const auto env = arms(0.3, 0.6);
  CHECK(env.pref_matrix(1, 0) == doctest::Approx(0.65));
  CHECK(env.pref_matrix(0, 1) == doctest::Approx(0.35));
  CHECK_FALSE(env.pairwise());
}
