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
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "pbrl/error.hpp"
#include "pbrl/mdp.hpp"

using namespace pbrl;

namespace {

EpisodicMDP chain_two_state() {
  // 0 -> 1 under either action, 1 absorbing.
  return EpisodicMDP::tabular(2, 2, 3, 0, {0, 1, 0, 1, 0, 1, 0, 1});
}

}  // namespace

TEST_CASE("deterministic dynamics give a single trajectory") {
  const auto mdp = chain_two_state();
  const auto pi = MarkovPolicy::deterministic(2, 2, 3, {1, 0, 0, 1, 1, 1});
  const auto law = trajectory_distribution(mdp, pi);
  REQUIRE(law.size() == 1);
  CHECK(law[0].probability == doctest::Approx(1.0));
  const std::vector<Step> want{{0, 1}, {1, 1}, {1, 1}};
  CHECK(law[0].trajectory.steps == want);
}

TEST_CASE("one-step law lists only the first pair") {
  const auto mdp = EpisodicMDP::tabular(2, 1, 1, 0, {0.3, 0.7, 0.5, 0.5});
  const auto pi = MarkovPolicy::deterministic(2, 1, 1, {0, 0});
  const auto law = trajectory_distribution(mdp, pi);
  REQUIRE(law.size() == 1);
  CHECK(law[0].trajectory.steps.size() == 1);
  CHECK(law[0].probability == doctest::Approx(1.0));

  // With H = 2 the split (0.3, 0.7) shows up in the second step.
  const auto mdp2 = EpisodicMDP::tabular(2, 1, 2, 0, {0.3, 0.7, 0.5, 0.5});
  const auto pi2 = MarkovPolicy::deterministic(2, 1, 2, {0, 0, 0, 0});
  const auto law2 = trajectory_distribution(mdp2, pi2);
  REQUIRE(law2.size() == 2);
  CHECK(law2[0].probability == doctest::Approx(0.3));
  CHECK(law2[1].probability == doctest::Approx(0.7));
}

TEST_CASE("trajectory law matches the chain-rule oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto mdp = oracle::random_tabular(3, 2, 3, seed);
    const auto pi = oracle::random_stochastic_policy(3, 2, 3, seed + 100);
    const auto law = trajectory_distribution(mdp, pi);
    const auto want = oracle::trajectory_law(mdp, pi);
    REQUIRE(law.size() == want.size());
    double total = 0.0;
    for (const auto& wt : law) {
      CHECK(wt.probability > 0.0);
      CHECK(wt.probability == doctest::Approx(want.at(wt.trajectory)).epsilon(1e-12));
      total += wt.probability;
    }
    CHECK(std::abs(total - 1.0) < 1e-8);
    for (std::size_t i = 1; i < law.size(); ++i) {
      CHECK(law[i - 1].trajectory < law[i].trajectory);
    }
  }
}

TEST_CASE("sampled trajectories converge to the exact law") {
  const auto mdp = oracle::random_tabular(3, 2, 3, 11);
  const auto pi = oracle::random_stochastic_policy(3, 2, 3, 12);
  std::map<Trajectory, double> exact;
  for (const auto& wt : trajectory_distribution(mdp, pi)) {
    exact[wt.trajectory] = wt.probability;
  }
  Rng rng(2024);
  const int n = 1000000;
  std::map<Trajectory, double> freq;
  for (int i = 0; i < n; ++i) freq[sample_trajectory(mdp, pi, rng)] += 1.0 / n;
  double tv = 0.0;
  for (const auto& [t, p] : exact) tv += std::abs(p - freq[t]);
  for (const auto& [t, q] : freq) CHECK(exact.count(t) == 1);
  tv *= 0.5;
  CHECK(tv < 0.01);
}

TEST_CASE("transition frequencies stay within three standard errors") {
  const auto mdp = oracle::random_tabular(3, 2, 2, 21);
  const auto pi = MarkovPolicy::deterministic(3, 2, 2, {1, 0, 1, 0, 0, 0});
  Rng rng(5);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    const auto t = sample_trajectory(mdp, pi, rng);
    ++counts[t.steps[1].state];
  }
  for (int s = 0; s < 3; ++s) {
    const double p = mdp.transition(0, 1, s);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[s] / double(n) - p) <= 3 * se + 1e-12);
  }
}

TEST_CASE("sampling is reproducible under a fixed seed") {
  const auto mdp = oracle::random_tabular(3, 2, 3, 3);
  const auto pi = oracle::random_stochastic_policy(3, 2, 3, 4);
  Rng a(77), b(77);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_trajectory(mdp, pi, a) == sample_trajectory(mdp, pi, b));
  }
  const auto d = chain_two_state();
  const auto dp = MarkovPolicy::deterministic(2, 2, 3, {0, 0, 1, 1, 0, 1});
  Rng c(1);
  CHECK(sample_trajectory(d, dp, c) == trajectory_distribution(d, dp)[0].trajectory);
}

TEST_CASE("rollouts record the state after the last action") {
  const auto d = chain_two_state();
  const auto dp = MarkovPolicy::deterministic(2, 2, 3, {0, 0, 0, 0, 0, 0});
  Rng rng(0);
  const auto r = sample_rollout(d, dp, rng);
  CHECK(r.trajectory.steps.size() == 3);
  CHECK(r.final_state == 1);
}

TEST_CASE("marginals of the trajectory law equal the occupancy measure") {
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    const auto mdp = oracle::random_tabular(3, 3, 3, seed);
    const auto pi = oracle::random_stochastic_policy(3, 3, 3, seed * 7);
    const auto occ = occupancy_measure(mdp, pi);
    std::vector<Eigen::MatrixXd> marg(3, Eigen::MatrixXd::Zero(3, 3));
    for (const auto& wt : trajectory_distribution(mdp, pi)) {
      for (int h = 0; h < 3; ++h) {
        const auto st = wt.trajectory.steps[h];
        marg[h](st.state, st.action) += wt.probability;
      }
    }
    for (int h = 0; h < 3; ++h) CHECK((marg[h] - occ[h]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("enumeration cap") {
  const auto mdp = oracle::random_tabular(3, 2, 4, 1);
  const auto pi = oracle::random_stochastic_policy(3, 2, 4, 2);
  CHECK_THROWS_AS(trajectory_distribution(mdp, pi, 10), EnumerationCapExceeded);
}

TEST_CASE("policy pools") {
  CHECK(enumerate_policy_pool(1, 2, 1, PoolMode::kExhaustive).size() == 2);
  const auto pool = enumerate_policy_pool(2, 2, 2, PoolMode::kExhaustive);
  CHECK(pool.size() == 16);
  std::set<std::vector<int>> distinct;
  for (const auto& p : pool.policies) distinct.insert(p.actions());
  CHECK(distinct.size() == 16);
  CHECK_THROWS_AS(enumerate_policy_pool(4, 3, 5, PoolMode::kExhaustive, 20000),
                  CapExceeded);

  const auto sampled = enumerate_policy_pool(3, 2, 3, PoolMode::kSampled, 40, 9);
  CHECK(sampled.size() == 40);
  std::set<std::uint64_t> codes(sampled.codes.begin(), sampled.codes.end());
  CHECK(codes.size() == 40);
  const auto again = enumerate_policy_pool(3, 2, 3, PoolMode::kSampled, 40, 9);
  CHECK(again.codes == sampled.codes);
}

TEST_CASE("policy codes round-trip") {
  const auto pool = enumerate_policy_pool(2, 3, 2, PoolMode::kExhaustive);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(policy_code(pool[i]) == pool.codes[i]);
    CHECK(policy_from_code(2, 3, 2, pool.codes[i]) == pool[i]);
  }
}

TEST_CASE("tabular kernel is a linear mixture of scaled indicators") {
  const auto mdp = oracle::random_tabular(3, 2, 2, 8);
  const auto f = mdp.transition_features();
  const Eigen::VectorXd theta = mdp.transition_parameter();
  CHECK(theta.norm() <= mdp.transition_parameter_bound() + 1e-12);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXd row = f.block(s, a).transpose() * theta;
      for (int n = 0; n < 3; ++n) CHECK(row(n) == doctest::Approx(mdp.transition(s, a, n)));
      // ||sum_s' psi V(s')|| <= 1 for V in [0,1]^S.
      CHECK(f.integrate(s, a, Eigen::VectorXd::Ones(3)).norm() <= 1.0 + 1e-12);
    }
  }
  const auto back = estimated_mdp(f, theta, 2, 0);
  for (std::size_t i = 0; i < mdp.dense_kernel().size(); ++i) {
    CHECK(std::abs(back.dense_kernel()[i] - mdp.dense_kernel()[i]) < 1e-12);
  }
}

TEST_CASE("estimated kernels are projected onto the simplex") {
  const auto mdp = oracle::random_tabular(2, 1, 1, 3);
  const auto f = mdp.transition_features();
  Eigen::VectorXd theta = mdp.transition_parameter();
  theta(0) = -theta(0);  // (s=0, a=0, s'=0) negative
  int projected = 0;
  const auto est = estimated_mdp(f, theta, 1, 0, &projected);
  CHECK(projected == 1);
  CHECK(est.transition(0, 0, 0) == 0.0);
  CHECK(est.transition(0, 0, 1) == doctest::Approx(1.0));
  const auto flat = estimated_mdp(f, Eigen::VectorXd::Zero(theta.size()), 1, 0);
  CHECK(flat.transition(1, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("linear mixture kernels validate and serialize") {
  // Two base kernels mixed by theta / sqrt(d).
  const int S = 2, A = 1, d = 2;
  std::vector<double> psi(static_cast<std::size_t>(S) * A * d * S);
  const double base[2][2][2] = {{{1, 0}, {0, 1}}, {{0.5, 0.5}, {0.2, 0.8}}};
  for (int s = 0; s < S; ++s) {
    for (int i = 0; i < d; ++i) {
      for (int n = 0; n < S; ++n) {
        psi[(static_cast<std::size_t>(s) * A * S + n) * d + i] = base[i][s][n] / std::sqrt(2.0);
      }
    }
  }
  LinearMixtureKernel k{MixtureFeatures(S, A, d, psi),
                        Eigen::Vector2d(0.25, 0.75) * std::sqrt(2.0), 1.5};
  const auto mdp = EpisodicMDP::linear_mixture(S, A, 2, 0, k);
  CHECK(mdp.is_linear_mixture());
  for (int s = 0; s < S; ++s) {
    for (int n = 0; n < S; ++n) {
      CHECK(mdp.transition(s, 0, n) ==
            doctest::Approx(0.25 * base[0][s][n] + 0.75 * base[1][s][n]));
    }
  }
  const auto back = mdp_from_json(mdp_to_json(mdp));
  CHECK(back.is_linear_mixture());
  CHECK(back.dense_kernel() == mdp.dense_kernel());
  CHECK(back.mixture().theta.isApprox(mdp.mixture().theta));
}

TEST_CASE("invalid kernels are rejected") {
  CHECK_THROWS_AS(EpisodicMDP::tabular(2, 1, 1, 0, {0.5, 0.6, 1, 0}), InvalidArgument);
  CHECK_THROWS_AS(EpisodicMDP::tabular(2, 1, 1, 2, {0.5, 0.5, 1, 0}), InvalidArgument);
  CHECK_THROWS_AS(EpisodicMDP::tabular(2, 1, 0, 0, {0.5, 0.5, 1, 0}), InvalidArgument);
}

TEST_CASE("mdp and pool json round-trip") {
  const auto mdp = oracle::random_tabular(3, 2, 2, 4);
  const auto back = mdp_from_json(mdp_to_json(mdp));
  CHECK(back.dense_kernel() == mdp.dense_kernel());
  CHECK(back.horizon() == 2);
  const auto pool = enumerate_policy_pool(3, 2, 2, PoolMode::kSampled, 10, 3);
  const auto pb = pool_from_json(pool_to_json(pool), 3, 2, 2);
  CHECK(pb.codes == pool.codes);
  CHECK(pb.policies == pool.policies);
}
