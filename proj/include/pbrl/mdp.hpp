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

#ifndef PBRL_MDP_HPP_
#define PBRL_MDP_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace pbrl {

using Rng = std::mt19937_64;

inline constexpr std::size_t kDefaultTrajectoryCap = 200000;
inline constexpr std::size_t kDefaultPolicyCap = 20000;

struct Step {
  int state = 0;
  int action = 0;
  friend auto operator<=>(const Step&, const Step&) = default;
};

// An H-step (state, action) sequence starting at the initial state.
struct Trajectory {
  std::vector<Step> steps;

  std::size_t horizon() const { return steps.size(); }
  friend auto operator<=>(const Trajectory&, const Trajectory&) = default;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Mixed-radix index of a trajectory over the (state, action) alphabet.
std::uint64_t trajectory_code(const Trajectory& traj, int num_states,
                              int num_actions);

// Known transition features psi(s, a, s') in R^d. Stored per (s, a) as a
// d x S column-major block so that sum_{s'} psi(s, a, s') V(s') is a
// matrix-vector product.
class MixtureFeatures {
 public:
  MixtureFeatures() = default;
  MixtureFeatures(int num_states, int num_actions, int dim,
                  std::vector<double> psi);

  int dim() const { return dim_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  Eigen::Map<const Eigen::MatrixXd> block(int s, int a) const;
  double psi(int s, int a, int next, int i) const;
  Eigen::VectorXd integrate(int s, int a, const Eigen::VectorXd& value) const;

 private:
  int num_states_ = 0;
  int num_actions_ = 0;
  int dim_ = 0;
  std::vector<double> psi_;
};

struct LinearMixtureKernel {
  MixtureFeatures features;
  Eigen::VectorXd theta;
  double bound = 1.0;  // B with ||theta||_2 <= B
};

// Finite-horizon MDP with a fixed initial state. The kernel is either an
// explicit tabular tensor or a linear mixture psi(s, a, s')^T theta; in both
// cases a dense copy of P is kept for sampling and enumeration.
class EpisodicMDP {
 public:
  static EpisodicMDP tabular(int num_states, int num_actions, int horizon,
                             int initial_state, std::vector<double> kernel);
  static EpisodicMDP linear_mixture(int num_states, int num_actions,
                                    int horizon, int initial_state,
                                    LinearMixtureKernel kernel);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int initial_state() const { return initial_state_; }

  double transition(int s, int a, int next) const {
    return dense_[(static_cast<std::size_t>(s) * num_actions_ + a) *
                      num_states_ +
                  next];
  }
  std::span<const double> transition_row(int s, int a) const;
  const std::vector<double>& dense_kernel() const { return dense_; }

  bool is_linear_mixture() const { return mixture_.has_value(); }
  const LinearMixtureKernel& mixture() const;

  // Features under which the kernel is linear. Tabular kernels use scaled
  // indicators e_{(s,a,s')} / sqrt(S), which satisfy the unit-norm condition.
  MixtureFeatures transition_features() const;
  Eigen::VectorXd transition_parameter() const;
  double transition_parameter_bound() const;

 private:
  EpisodicMDP() = default;
  void validate() const;

  int num_states_ = 0;
  int num_actions_ = 0;
  int horizon_ = 0;
  int initial_state_ = 0;
  std::vector<double> dense_;
  std::optional<LinearMixtureKernel> mixture_;
};

// Row-stochastic per-step action laws; deterministic policies also keep the
// chosen action per (h, s).
class MarkovPolicy {
 public:
  static MarkovPolicy deterministic(int num_states, int num_actions,
                                    int horizon, std::vector<int> actions);
  static MarkovPolicy stochastic(int num_states, int num_actions, int horizon,
                                 std::vector<double> probs);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  bool is_deterministic() const { return !actions_.empty(); }

  double prob(int h, int s, int a) const {
    return probs_[(static_cast<std::size_t>(h) * num_states_ + s) *
                      num_actions_ +
                  a];
  }
  int action(int h, int s) const;
  int sample_action(int h, int s, Rng& rng) const;
  const std::vector<int>& actions() const { return actions_; }

  friend bool operator==(const MarkovPolicy&, const MarkovPolicy&) = default;

 private:
  MarkovPolicy() = default;

  int num_states_ = 0;
  int num_actions_ = 0;
  int horizon_ = 0;
  std::vector<double> probs_;
  std::vector<int> actions_;
};

enum class PoolMode { kExhaustive, kSampled };

struct PolicyPool {
  std::vector<MarkovPolicy> policies;
  std::vector<std::uint64_t> codes;  // mixed-radix action codes
  PoolMode mode = PoolMode::kExhaustive;
  std::uint64_t seed = 0;

  std::size_t size() const { return policies.size(); }
  const MarkovPolicy& operator[](std::size_t i) const { return policies[i]; }
};

struct WeightedTrajectory {
  Trajectory trajectory;
  double probability = 0.0;
};
using TrajectoryDistribution = std::vector<WeightedTrajectory>;

// Exact law of tau ~ (P, pi), listed in depth-first (lexicographic) order.
// Throws EnumerationCapExceeded when more than `cap` trajectories are
// reachable.
TrajectoryDistribution trajectory_distribution(
    const EpisodicMDP& mdp, const MarkovPolicy& policy,
    std::size_t cap = kDefaultTrajectoryCap);

// A trajectory plus the state reached after the final action, which value-
// targeted regression uses as the H-th regression target.
struct Rollout {
  Trajectory trajectory;
  int final_state = 0;
};

Rollout sample_rollout(const EpisodicMDP& mdp, const MarkovPolicy& policy,
                       Rng& rng);
Trajectory sample_trajectory(const EpisodicMDP& mdp,
                             const MarkovPolicy& policy, Rng& rng);

// Step-h state-action occupancy by forward dynamic programming.
std::vector<Eigen::MatrixXd> occupancy_measure(const EpisodicMDP& mdp,
                                               const MarkovPolicy& policy);

std::uint64_t policy_code(const MarkovPolicy& policy);
MarkovPolicy policy_from_code(int num_states, int num_actions, int horizon,
                              std::uint64_t code);

PolicyPool enumerate_policy_pool(int num_states, int num_actions, int horizon,
                                 PoolMode mode,
                                 std::size_t cap = kDefaultPolicyCap,
                                 std::uint64_t seed = 0);

// Projects an estimated linear-mixture parameter onto a valid kernel: negative
// entries are zeroed and rows renormalized (uniform if a row vanishes).
EpisodicMDP estimated_mdp(const MixtureFeatures& features,
                          const Eigen::VectorXd& theta, int horizon,
                          int initial_state, int* projected_rows = nullptr);

double uniform01(Rng& rng);
bool bernoulli(double p, Rng& rng);

nlohmann::json mdp_to_json(const EpisodicMDP& mdp);
EpisodicMDP mdp_from_json(const nlohmann::json& j);
nlohmann::json pool_to_json(const PolicyPool& pool);
PolicyPool pool_from_json(const nlohmann::json& j, int num_states,
                          int num_actions, int horizon);
nlohmann::json trajectory_to_json(const Trajectory& traj);

}  // namespace pbrl

#endif  // PBRL_MDP_HPP_
