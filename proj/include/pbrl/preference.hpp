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

#ifndef PBRL_PREFERENCE_HPP_
#define PBRL_PREFERENCE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pbrl/mdp.hpp"

namespace pbrl {

// Trajectory embedding x(tau) with ||x(tau)||_2 <= L / 2, so that pairwise
// differences x(tau1) - x(tau2) have norm at most L.
class TrajectoryFeatureMap {
 public:
  enum class Kind { kStepSum, kTable };

  TrajectoryFeatureMap() = default;

  // x(tau) = sum_h phi(s_h, a_h); phi is (S*A) x dim, row-major.
  static TrajectoryFeatureMap step_sum(int num_states, int num_actions,
                                       int dim, std::vector<double> phi,
                                       double norm_bound);
  // Visit counts of each (s, a): phi(s, a) = e_{s*A+a}.
  static TrajectoryFeatureMap one_hot(int num_states, int num_actions,
                                      int horizon);
  // Arbitrary non-decomposable lookup keyed by trajectory_code; trajectories
  // missing from the table map to the zero vector.
  static TrajectoryFeatureMap table(int num_states, int num_actions, int dim,
                                    std::map<std::uint64_t, Eigen::VectorXd> t,
                                    double norm_bound);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double norm_bound() const { return norm_bound_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  Eigen::VectorXd operator()(const Trajectory& traj) const;

  // Checks ||x(tau)|| <= L/2 over every trajectory starting at the MDP's
  // initial state (exhaustively when feasible, else 10^4 random sequences).
  void validate(const EpisodicMDP& mdp) const;

  nlohmann::json to_json() const;
  static TrajectoryFeatureMap from_json(const nlohmann::json& j, int num_states,
                                        int num_actions, int horizon);

 private:
  Kind kind_ = Kind::kStepSum;
  int num_states_ = 0;
  int num_actions_ = 0;
  int dim_ = 0;
  double norm_bound_ = 0.0;
  bool one_hot_ = false;
  Eigen::MatrixXd phi_;  // (S*A) x dim
  std::map<std::uint64_t, Eigen::VectorXd> table_;
};

class PreferenceModel {
 public:
  enum class Kind { kLinear, kLogistic, kUtilityBased };

  // f = 1/2 + (x(tau1) - x(tau2))^T theta; requires L * S_theta <= 1/2.
  static PreferenceModel linear(TrajectoryFeatureMap features,
                                Eigen::VectorXd theta, double theta_bound);
  // f = sigmoid((x(tau1) - x(tau2))^T theta).
  static PreferenceModel logistic(TrajectoryFeatureMap features,
                                  Eigen::VectorXd theta, double theta_bound);
  // f = (r(tau1) - r(tau2) + 1) / 2 with r(tau) = sum_h r(s_h, a_h) and
  // per-step rewards in [0, 1/H].
  static PreferenceModel utility(int num_states, int num_actions, int horizon,
                                 std::vector<double> reward);

  Kind kind() const { return kind_; }
  // Features the estimator regresses on; one-hot visit counts for the
  // utility model, whose preference is linear in them with theta = r / 2.
  const TrajectoryFeatureMap& features() const { return features_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double theta_bound() const { return theta_bound_; }
  const std::vector<double>& reward() const { return reward_; }
  // True when f is exactly 1/2 + (x1 - x2)^T theta().
  bool is_linear_in_features() const { return kind_ != Kind::kLogistic; }

  double utility(const Trajectory& traj) const;

  nlohmann::json to_json() const;
  static PreferenceModel from_json(const nlohmann::json& pref,
                                   const nlohmann::json* features,
                                   int num_states, int num_actions,
                                   int horizon);

 private:
  double raw(const Trajectory& t1, const Trajectory& t2) const;
  friend double pref_prob(const PreferenceModel&, const Trajectory&,
                          const Trajectory&);

  Kind kind_ = Kind::kLinear;
  TrajectoryFeatureMap features_;
  Eigen::VectorXd theta_;
  double theta_bound_ = 0.0;
  std::vector<double> reward_;
  int num_actions_ = 0;
};

// Once-per-episode feedback probability g*(tau) in [0, 1].
class FeedbackModel {
 public:
  enum class Kind { kLinearClipped, kUtilitySum };

  static FeedbackModel linear_clipped(TrajectoryFeatureMap features,
                                      Eigen::VectorXd theta,
                                      double theta_bound);
  static FeedbackModel utility_sum(int num_states, int num_actions,
                                   int horizon, std::vector<double> reward);

  Kind kind() const { return kind_; }
  const TrajectoryFeatureMap& features() const { return features_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double theta_bound() const { return theta_bound_; }
  const std::vector<double>& reward() const { return reward_; }

  nlohmann::json to_json() const;
  static FeedbackModel from_json(const nlohmann::json& fb,
                                 const nlohmann::json* features,
                                 int num_states, int num_actions, int horizon);

 private:
  friend double feedback_value(const FeedbackModel&, const Trajectory&);

  Kind kind_ = Kind::kLinearClipped;
  TrajectoryFeatureMap features_;
  Eigen::VectorXd theta_;
  double theta_bound_ = 0.0;
  std::vector<double> reward_;
};

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Pr(tau1 > tau2). Antisymmetric to the last bit: the swapped call returns
// 1 - f for the canonical ordering of the pair.
double pref_prob(const PreferenceModel& model, const Trajectory& t1,
                 const Trajectory& t2);
bool sample_preference(const PreferenceModel& model, const Trajectory& t1,
                       const Trajectory& t2, Rng& rng);

// Exact E_{tau1 ~ pi1, tau2 ~ pi2} f(tau1, tau2). Throws MonteCarloRequired
// when either trajectory law exceeds `cap`.
double policy_pref(const PreferenceModel& model, const EpisodicMDP& mdp,
                   const MarkovPolicy& p1, const MarkovPolicy& p2,
                   std::size_t cap = kDefaultTrajectoryCap);
MonteCarloEstimate policy_pref_monte_carlo(const PreferenceModel& model,
                                           const EpisodicMDP& mdp,
                                           const MarkovPolicy& p1,
                                           const MarkovPolicy& p2,
                                           std::size_t samples, Rng& rng);
// Matrix M(i, j) = policy_pref(pool[i], pool[j]).
Eigen::MatrixXd policy_pref_matrix(const PreferenceModel& model,
                                   const EpisodicMDP& mdp,
                                   const PolicyPool& pool,
                                   std::size_t cap = kDefaultTrajectoryCap);

// Lowest pool index whose preference against every member is >= 1/2 - 1e-9.
// Throws NoCondorcetWinner.
int find_condorcet_policy(const Eigen::MatrixXd& pref_matrix);
int find_condorcet_policy(const PreferenceModel& model, const EpisodicMDP& mdp,
                          const PolicyPool& pool);

double feedback_value(const FeedbackModel& model, const Trajectory& traj);
bool sample_feedback(const FeedbackModel& model, const Trajectory& traj,
                     Rng& rng);
// V^pi(s1) = E_{tau ~ (P, pi)} g*(tau).
double policy_feedback_value(const FeedbackModel& model,
                             const EpisodicMDP& mdp,
                             const MarkovPolicy& policy,
                             std::size_t cap = kDefaultTrajectoryCap);
std::vector<double> policy_value_vector(const FeedbackModel& model,
                                        const EpisodicMDP& mdp,
                                        const PolicyPool& pool);

}  // namespace pbrl

#endif  // PBRL_PREFERENCE_HPP_
