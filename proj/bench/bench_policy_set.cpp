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


// Near-optimal set construction: OpenMP build vs the serial reference.

#include <benchmark/benchmark.h>

#include <memory>

#include "pbrl/agents.hpp"
#include "pbrl/harness.hpp"
#include "pbrl/planner.hpp"

using namespace pbrl;

namespace {

struct Fixture {
  std::unique_ptr<Environment> env;
  std::unique_ptr<Agent> agent;
  std::unique_ptr<PlanningContext> ctx;
};

// Random tabular environment with an exhaustive pool of A^(S*H) policies,
// after 50 training episodes.
Fixture make_fixture(int S, int H) {
  GeneratorSpec g;
  g.family = "random";
  g.S = S;
  g.A = 2;
  g.H = H;
  g.pref = "linear";
  g.d_T = 3;
  g.seed = 17;
  Fixture f;
  f.env = std::make_unique<Environment>(generate_environment(g));
  AgentConfig cfg;
  cfg.episodes = 50;
  f.agent = std::make_unique<Agent>(*f.env, cfg);
  Rng rng(5);
  for (int k = 0; k < 50; ++k) f.agent->run_episode(rng);
  const auto plan = f.agent->prepare_plan(false);
  f.ctx = std::make_unique<PlanningContext>(f.env->pool, plan.mdp, plan.snapshot);
  return f;
}

void BM_PolicySetParallel(benchmark::State& state) {
  const auto f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(build_policy_set(*f.ctx, 0.5));
  state.counters["pool"] = static_cast<double>(f.env->pool.size());
}

void BM_PolicySetSerial(benchmark::State& state) {
  const auto f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(build_policy_set_serial(*f.ctx, 0.5));
  state.counters["pool"] = static_cast<double>(f.env->pool.size());
}

}  // namespace

BENCHMARK(BM_PolicySetParallel)->Args({2, 3})->Args({3, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolicySetSerial)->Args({2, 3})->Args({3, 3})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
