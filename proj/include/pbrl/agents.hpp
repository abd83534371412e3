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

#ifndef PBRL_AGENTS_HPP_
#define PBRL_AGENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pbrl/estimator.hpp"
#include "pbrl/mdp.hpp"
#include "pbrl/planner.hpp"
#include "pbrl/preference.hpp"

namespace pbrl {

// A hidden environment plus its ground-truth oracles over the pool. Exactly
// one of `preference` (pairwise protocol) and `feedback` (once-per-episode
// protocol) is set.
struct Environment {
  EpisodicMDP mdp;
  std::optional<PreferenceModel> preference;
  std::optional<FeedbackModel> feedback;
  PolicyPool pool;
  int optimal_index = 0;
  // T(pi_i, pi_j); for feedback environments (V_i - V_j + 1) / 2.
  Eigen::MatrixXd pref_matrix;
  // V^pi(s1) per pool member; feedback environments only.
  std::vector<double> values;
  int rejections = 0;

  bool pairwise() const { return preference.has_value(); }
};

// Evaluates the oracles and locates the Condorcet policy. Throws
// NoCondorcetWinner.
Environment make_environment(EpisodicMDP mdp,
                             std::optional<PreferenceModel> preference,
                             std::optional<FeedbackModel> feedback,
                             PolicyPool pool);

nlohmann::json environment_to_json(const Environment& env);
Environment environment_from_json(const nlohmann::json& j);

enum class Algorithm {
  kPbop,
  kPbopPlus,
  kOncePerEpisode,
  kReduction,
  kUniformRandom,
  kGreedyNoBonus,
};

std::string_view algorithm_name(Algorithm algorithm);
Algorithm algorithm_from_name(std::string_view name);

struct AgentConfig {
  Algorithm algorithm = Algorithm::kPbop;
  int n = 2;          // policies per episode for pbop_plus
  int episodes = 1;   // K, used by the beta schedule
  double delta = 0.05;
  double c_beta = 0.1;
  double lambda = 1.0;
  std::optional<double> beta_preference;
  std::optional<double> beta_transition;
  std::optional<double> beta_feedback;
  ExpectationOptions planning;
  std::size_t tuple_cap = 1000000;
  TargetOptions targets;
  Algorithm inner = Algorithm::kPbop;  // reduction only
  bool emit_estimator_state = false;
  bool emit_timing = false;

  void validate() const;
  nlohmann::json to_json() const;
  static AgentConfig from_json(const nlohmann::json& j);
};

struct EpisodeRecord {
  int episode = 0;
  std::vector<int> policies;
  std::vector<Trajectory> trajectories;
  // Pairwise bits o_{i,j} in (0,1), (0,2), ..., (1,2), ... order.
  std::vector<int> preferences;
  // Once-per-episode feedback bits (also y1, y2 for the reduction).
  std::vector<int> feedback;
  int set_size = 0;
  double objective = 0.0;
  double regret = 0.0;
  std::optional<double> outer_regret;
  bool optimal_in_set = false;
  double preference_bonus = 0.0;  // sum of clipped b_T (or b_G)
  double transition_bonus = 0.0;  // sum of clipped b_P(tau)
  double raw_preference_bonus = 0.0;  // unclipped widths
  // Per-step bonuses are clipped; this skips only the per-trajectory clip.
  double raw_transition_bonus = 0.0;
  std::optional<bool> covered_preference;  // also used for the feedback stream
  std::optional<bool> covered_transition;
  bool approximate = false;
  std::optional<double> wall_time;
  std::optional<nlohmann::json> estimator_state;
};

nlohmann::json record_to_json(const EpisodeRecord& record);

class Agent {
 public:
  Agent(const Environment& env, AgentConfig config);

  EpisodeRecord run_episode(Rng& rng);

  EpisodeRecord pbop_episode(Rng& rng);
  EpisodeRecord pbop_plus_episode(Rng& rng);
  EpisodeRecord ope_episode(Rng& rng);
  EpisodeRecord reduction_episode(Rng& rng);
  EpisodeRecord baseline_episode(Rng& rng);

  const AgentConfig& config() const { return config_; }
  int episodes_done() const { return episode_; }
  double beta(Stream stream) const;

  const RegressionLog& preference_log() const { return pref_log_; }
  const RegressionLog& transition_log() const { return trans_log_; }
  const RegressionLog& feedback_log() const { return fb_log_; }
  const ConfidenceEllipsoid& preference_ellipsoid() const { return pref_ell_; }
  const ConfidenceEllipsoid& transition_ellipsoid() const { return trans_ell_; }
  const ConfidenceEllipsoid& feedback_ellipsoid() const { return fb_ell_; }
  const TrajectoryFeatureMap& preference_features() const { return pref_features_; }

  // Planning state for the next episode (refits estimators). Exposed for
  // tests that compare the planner against brute force.
  struct Plan {
    EpisodicMDP mdp;
    EstimatorSnapshot snapshot;
    std::vector<Eigen::VectorXd> targets;  // V_max per (s, a)
  };
  Plan prepare_plan(bool zero_bonuses);

 private:
  enum class Source { kPreference, kReducedFeedback };

  EpisodeRecord comparison_episode(Rng& rng, int n, bool tuple, bool zero_bonuses,
                                   bool uniform, Source source);
  EpisodeRecord single_episode(Rng& rng, bool zero_bonuses);
  EpisodeRecord uniform_single_episode(Rng& rng);
  void absorb_transitions(const std::vector<Rollout>& rollouts,
                          const std::vector<Eigen::VectorXd>& targets);
  bool transition_covered() const;
  nlohmann::json estimator_state() const;

  const Environment& env_;
  AgentConfig config_;
  int episode_ = 0;
  bool pairwise_features_ = true;

  TrajectoryFeatureMap pref_features_;
  MixtureFeatures trans_features_;
  Eigen::VectorXd trans_theta_;

  double beta_pref_ = 0.0;
  double beta_trans_ = 0.0;
  double beta_fb_ = 0.0;

  RegressionLog pref_log_;
  RegressionLog trans_log_;
  RegressionLog fb_log_;
  ConfidenceEllipsoid pref_ell_;
  ConfidenceEllipsoid trans_ell_;
  ConfidenceEllipsoid fb_ell_;
  CoverageTracker pref_cov_;
  CoverageTracker trans_cov_;
  CoverageTracker fb_cov_;
};

}  // namespace pbrl

#endif  // PBRL_AGENTS_HPP_
