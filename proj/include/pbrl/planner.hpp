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

#ifndef PBRL_PLANNER_HPP_
#define PBRL_PLANNER_HPP_

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbrl/estimator.hpp"
#include "pbrl/mdp.hpp"
#include "pbrl/preference.hpp"

namespace pbrl {

// Pairwise: preference comparisons between trajectories. Single: one
// trajectory per episode scored by a feedback function.
enum class Setting { kPairwise, kSingle };

struct ScoreComponents {
  bool estimate = true;          // T-hat, or g-hat(tau) - g-hat(tau0)
  bool preference_bonus = true;  // b_T, or b_G(tau) + b_G(tau0)
  bool transition_bonus = true;  // b_P(tau) + b_P(tau0)
};

// Read-only view of an agent's estimators for one episode of planning.
struct EstimatorSnapshot {
  Setting setting = Setting::kPairwise;
  const ConfidenceEllipsoid* preference = nullptr;  // pairwise only
  const ConfidenceEllipsoid* feedback = nullptr;    // single only
  const TrajectoryFeatureMap* features = nullptr;
  double preference_offset = 0.5;
  std::vector<double> step_bonus;  // clipped b_P(s, a), index s * A + a
  int num_actions = 1;
  bool zero_bonuses = false;

  // b_P(tau) = min(1, sum_h b_P(s_h, a_h)).
  double trajectory_bonus(const Trajectory& traj) const;
};

using PairScore = std::function<double(const Trajectory&, const Trajectory&)>;

// Integrand of the near-optimal set test: T-hat + b_T + b_P + b_P (pairwise)
// or g-hat - g-hat0 + b_G + b_G0 + b_P + b_P0 (single).
PairScore make_membership_score(const EstimatorSnapshot& snapshot,
                                ScoreComponents components = {});
// b_T(tau1, tau2) + b_P(tau1) + b_P(tau2).
PairScore make_exploration_score(const EstimatorSnapshot& snapshot);

enum class ExpectationMode { kExact, kMonteCarlo };

struct ExpectationOptions {
  ExpectationMode mode = ExpectationMode::kExact;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  std::size_t cap = kDefaultTrajectoryCap;
};

struct ScoreEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// E_{tau1 ~ (P, pi1), tau2 ~ (P, pi2)} score(tau1, tau2).
ScoreEstimate expected_pair_score(const EpisodicMDP& mdp,
                                  const MarkovPolicy& p1,
                                  const MarkovPolicy& p2,
                                  const PairScore& score,
                                  const ExpectationOptions& options = {});

// Per-episode planning tables: every pool policy's trajectory law under the
// estimated kernel, interned so that per-trajectory and per-pair score terms
// are evaluated once.
class PlanningContext {
 public:
  PlanningContext(const PolicyPool& pool, const EpisodicMDP& mdp,
                  const EstimatorSnapshot& snapshot,
                  const ExpectationOptions& options = {},
                  ScoreComponents components = {});

  std::size_t pool_size() const { return laws_.size(); }
  std::size_t num_trajectories() const { return trajectories_.size(); }
  Setting setting() const { return setting_; }
  const std::vector<std::pair<int, double>>& law(int policy) const {
    return laws_[policy];
  }

  // E[membership integrand] for (pi_i, opponent pi_j).
  double membership_score(int i, int j) const;
  // Pairwise: E[b_T + b_P(tau_i) + b_P(tau_j)].
  double exploration_value(int i, int j) const;
  // Single: E[b_G(tau) + b_P(tau)].
  double exploration_value(int i) const;

  // min_j membership_score(i, j) and its first minimizer.
  void membership_row(int i, double* min_value, int* argmin) const;
  // exploration_value(members[a], members[b]) for all a, b.
  Eigen::MatrixXd exploration_matrix(const std::vector<int>& members) const;

 private:
  double expect(const Eigen::MatrixXd& table, int i, int j) const;

  Setting setting_;
  std::vector<Trajectory> trajectories_;
  static Eigen::MatrixXd apply_laws(
      const Eigen::MatrixXd& table,
      const std::vector<std::vector<std::pair<int, double>>>& laws);

  std::vector<std::vector<std::pair<int, double>>> laws_;
  Eigen::MatrixXd membership_table_;
  Eigen::MatrixXd membership_cols_;  // trajectory x policy
  Eigen::MatrixXd exploration_table_;
  std::vector<double> exploration_single_;
};

struct PolicySet {
  std::vector<int> members;        // ascending pool indices
  std::vector<char> is_member;     // per pool index
  std::vector<int> opponent;       // minimizing opponent per pool index
  std::vector<double> certificate; // attained minimum per pool index
  double threshold = 0.5;

  bool contains(int i) const { return is_member[i] != 0; }
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

// pi is a member iff min_{pi0} membership_score(pi, pi0) >= threshold - 1e-9.
// The outer loop over pool members runs under OpenMP.
PolicySet build_policy_set(const PlanningContext& ctx, double threshold);
// Single-threaded reference for build_policy_set.
PolicySet build_policy_set_serial(const PlanningContext& ctx, double threshold);

struct Selection {
  std::vector<int> policies;
  double value = 0.0;
  bool approximate = false;
};

// Exhaustive argmax over ordered member pairs (including (pi, pi)); ties go to
// the lowest first index, then the lowest second index. Throws EmptyPolicySet.
Selection select_exploratory_pair(const PolicySet& set,
                                  const PlanningContext& ctx);
// Argmax of sum_{i<j} exploration_value over member n-tuples. Exhaustive in
// lexicographic order when |S|^n <= tuple_cap, else greedy extension of the
// best pair (flagged approximate).
Selection select_exploratory_tuple(const PolicySet& set, int n,
                                   const PlanningContext& ctx,
                                   std::size_t tuple_cap = 1000000);
Selection select_exploratory_single(const PolicySet& set,
                                    const PlanningContext& ctx);

}  // namespace pbrl

#endif  // PBRL_PLANNER_HPP_
