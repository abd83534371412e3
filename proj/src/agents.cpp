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

#include "pbrl/agents.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "pbrl/error.hpp"

namespace pbrl {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}


// Parameter-norm bound of the hypothesis class (not of the hidden model).
double class_bound(const PreferenceModel& m, int S, int A, int H) {
  if (m.kind() == PreferenceModel::Kind::kUtilityBased) {
    return std::sqrt(static_cast<double>(S) * A) / (2.0 * H);
  }
  return m.theta_bound();
}

double class_bound(const FeedbackModel& m, int S, int A, int H) {
  if (m.kind() == FeedbackModel::Kind::kUtilitySum) {
    return std::sqrt(static_cast<double>(S) * A) / H;
  }
  return m.theta_bound();
}

}  // namespace

// ---------------------------------------------------------------------------
// Environment

Environment make_environment(EpisodicMDP mdp,
                             std::optional<PreferenceModel> preference,
                             std::optional<FeedbackModel> feedback,
                             PolicyPool pool) {
  require(preference.has_value() != feedback.has_value(),
          "environment needs exactly one of a preference or a feedback model");
  require(pool.size() > 0, "policy pool is empty");
  for (const auto& p : pool.policies) {
    require(p.num_states() == mdp.num_states() &&
                p.num_actions() == mdp.num_actions() &&
                p.horizon() == mdp.horizon(),
            "pool policy does not match the MDP");
  }
  Eigen::MatrixXd matrix;
  std::vector<double> values;
  if (preference) {
    preference->features().validate(mdp);
    matrix = policy_pref_matrix(*preference, mdp, pool);
  } else {
    feedback->features().validate(mdp);
    values = policy_value_vector(*feedback, mdp, pool);
    const int n = static_cast<int>(pool.size());
    matrix.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) matrix(i, j) = (values[i] - values[j] + 1.0) / 2.0;
    }
  }
  int opt = 0;
  if (preference) {
    opt = find_condorcet_policy(matrix);
  } else {
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] > values[opt]) opt = static_cast<int>(i);
    }
  }
  return Environment{std::move(mdp),   std::move(preference),
                     std::move(feedback), std::move(pool),
                     opt,              std::move(matrix),
                     std::move(values), 0};
}

nlohmann::json environment_to_json(const Environment& env) {
  nlohmann::json j = mdp_to_json(env.mdp);
  if (env.preference) {
    j["pref"] = env.preference->to_json();
    if (env.preference->kind() != PreferenceModel::Kind::kUtilityBased) {
      j["features"] = env.preference->features().to_json();
    }
  } else {
    j["feedback"] = env.feedback->to_json();
    if (env.feedback->kind() != FeedbackModel::Kind::kUtilitySum) {
      j["features"] = env.feedback->features().to_json();
    }
  }
  j["pool"] = pool_to_json(env.pool);
  return j;
}

Environment environment_from_json(const nlohmann::json& j) {
  EpisodicMDP mdp = mdp_from_json(j);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  const nlohmann::json* features = j.contains("features") ? &j["features"] : nullptr;
  std::optional<PreferenceModel> pref;
  std::optional<FeedbackModel> fb;
  if (j.contains("pref")) pref = PreferenceModel::from_json(j["pref"], features, S, A, H);
  if (j.contains("feedback")) fb = FeedbackModel::from_json(j["feedback"], features, S, A, H);
  PolicyPool pool =
      j.contains("pool")
          ? pool_from_json(j["pool"], S, A, H)
          : enumerate_policy_pool(S, A, H, PoolMode::kExhaustive);
  return make_environment(std::move(mdp), std::move(pref), std::move(fb),
                          std::move(pool));
}

// ---------------------------------------------------------------------------
// Config

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPbop:
      return "pbop";
    case Algorithm::kPbopPlus:
      return "pbop_plus";
    case Algorithm::kOncePerEpisode:
      return "once_per_episode";
    case Algorithm::kReduction:
      return "reduction";
    case Algorithm::kUniformRandom:
      return "uniform_random";
    case Algorithm::kGreedyNoBonus:
      return "greedy_no_bonus";
  }
  return "unknown";
}

Algorithm algorithm_from_name(std::string_view name) {
  for (Algorithm a : {Algorithm::kPbop, Algorithm::kPbopPlus,
                      Algorithm::kOncePerEpisode, Algorithm::kReduction,
                      Algorithm::kUniformRandom, Algorithm::kGreedyNoBonus}) {
    if (algorithm_name(a) == name) return a;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

void AgentConfig::validate() const {
  require(episodes >= 1, "K must be at least 1");
  require(algorithm != Algorithm::kPbopPlus || n >= 2, "pbop_plus needs n >= 2");
  require(lambda > 0.0, "lambda must be positive");
  require(c_beta > 0.0, "c_beta must be positive");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(inner == Algorithm::kPbop || inner == Algorithm::kGreedyNoBonus ||
              inner == Algorithm::kUniformRandom,
          "reduction inner agent must be pbop, greedy_no_bonus or uniform_random");
  for (const auto& b : {beta_preference, beta_transition, beta_feedback}) {
    require(!b || *b >= 0.0, "beta overrides must be nonnegative");
  }
}

nlohmann::json AgentConfig::to_json() const {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(algorithm);
  j["n"] = n;
  j["K"] = episodes;
  j["delta"] = delta;
  j["c_beta"] = c_beta;
  j["lambda"] = lambda;
  nlohmann::json beta = nlohmann::json::object();
  if (beta_preference) beta["preference"] = *beta_preference;
  if (beta_transition) beta["transition"] = *beta_transition;
  if (beta_feedback) beta["feedback"] = *beta_feedback;
  j["beta"] = beta;
  j["planning"] = {
      {"mode", planning.mode == ExpectationMode::kExact ? "exact" : "monte_carlo"},
      {"samples", planning.samples},
      {"seed", planning.seed},
      {"cap", planning.cap}};
  j["tuple_cap"] = tuple_cap;
  j["targets"] = {{"max_exact_states", targets.max_exact_states},
                  {"heuristic", targets.allow_heuristic},
                  {"restarts", targets.restarts}};
  j["inner"] = algorithm_name(inner);
  j["emit"] = {{"estimator_state", emit_estimator_state},
               {"timing", emit_timing}};
  return j;
}

AgentConfig AgentConfig::from_json(const nlohmann::json& j) {
  AgentConfig c;
  c.algorithm = algorithm_from_name(j.value("algorithm", std::string("pbop")));
  c.n = j.value("n", c.n);
  c.episodes = j.value("K", c.episodes);
  c.delta = j.value("delta", c.delta);
  c.c_beta = j.value("c_beta", c.c_beta);
  c.lambda = j.value("lambda", c.lambda);
  if (j.contains("beta")) {
    const auto& b = j["beta"];
    if (b.contains("preference")) c.beta_preference = b["preference"].get<double>();
    if (b.contains("transition")) c.beta_transition = b["transition"].get<double>();
    if (b.contains("feedback")) c.beta_feedback = b["feedback"].get<double>();
  }
  if (j.contains("planning")) {
    const auto& p = j["planning"];
    const std::string mode = p.value("mode", std::string("exact"));
    require(mode == "exact" || mode == "monte_carlo",
            "planning.mode must be exact or monte_carlo");
    c.planning.mode =
        mode == "exact" ? ExpectationMode::kExact : ExpectationMode::kMonteCarlo;
    c.planning.samples = p.value("samples", c.planning.samples);
    c.planning.seed = p.value("seed", c.planning.seed);
    c.planning.cap = p.value("cap", c.planning.cap);
  }
  c.tuple_cap = j.value("tuple_cap", c.tuple_cap);
  if (j.contains("targets")) {
    const auto& t = j["targets"];
    c.targets.max_exact_states = t.value("max_exact_states", c.targets.max_exact_states);
    c.targets.allow_heuristic = t.value("heuristic", c.targets.allow_heuristic);
    c.targets.restarts = t.value("restarts", c.targets.restarts);
  }
  c.inner = algorithm_from_name(j.value("inner", std::string("pbop")));
  if (j.contains("emit")) {
    c.emit_estimator_state = j["emit"].value("estimator_state", false);
    c.emit_timing = j["emit"].value("timing", false);
  }
  c.validate();
  return c;
}

nlohmann::json record_to_json(const EpisodeRecord& r) {
  nlohmann::json j;
  j["episode"] = r.episode;
  j["policies"] = r.policies;
  nlohmann::json trajs = nlohmann::json::array();
  for (const auto& t : r.trajectories) trajs.push_back(trajectory_to_json(t));
  j["trajectories"] = trajs;
  if (!r.preferences.empty()) j["preferences"] = r.preferences;
  if (!r.feedback.empty()) j["feedback"] = r.feedback;
  j["set_size"] = r.set_size;
  j["objective"] = r.objective;
  j["regret"] = r.regret;
  if (r.outer_regret) j["outer_regret"] = *r.outer_regret;
  j["optimal_in_set"] = r.optimal_in_set;
  j["preference_bonus"] = r.preference_bonus;
  j["transition_bonus"] = r.transition_bonus;
  j["raw_preference_bonus"] = r.raw_preference_bonus;
  j["raw_transition_bonus"] = r.raw_transition_bonus;
  if (r.covered_preference) j["covered_preference"] = *r.covered_preference;
  if (r.covered_transition) j["covered_transition"] = *r.covered_transition;
  if (r.approximate) j["approximate"] = true;
  if (r.wall_time) j["wall_time"] = *r.wall_time;
  if (r.estimator_state) j["estimator"] = *r.estimator_state;
  return j;
}

// ---------------------------------------------------------------------------
// Agent

Agent::Agent(const Environment& env, AgentConfig config)
    : env_(env), config_(std::move(config)) {
  config_.validate();
  const int S = env.mdp.num_states();
  const int A = env.mdp.num_actions();
  const int H = env.mdp.horizon();
  const Algorithm a = config_.algorithm;
  if (a == Algorithm::kOncePerEpisode || a == Algorithm::kReduction) {
    require(!env.pairwise(), std::string(algorithm_name(a)) +
                                 " needs a once-per-episode environment");
  }
  if (a == Algorithm::kPbop || a == Algorithm::kPbopPlus) {
    require(env.pairwise(), std::string(algorithm_name(a)) +
                                " needs a preference environment");
  }
  pairwise_features_ = env.pairwise() || a == Algorithm::kReduction;

  trans_features_ = env.mdp.transition_features();
  trans_theta_ = env.mdp.transition_parameter();

  const bool nwise = a == Algorithm::kPbopPlus;
  BetaSchedule sched;
  sched.episodes = config_.episodes;
  sched.delta = config_.delta;
  sched.c_beta = config_.c_beta;
  sched.n = nwise ? config_.n : 2;
  sched.nwise = nwise;

  sched.covering = {CoveringModel::Kind::kAnalyticLinear, trans_features_.dim(),
                    1.0, env.mdp.transition_parameter_bound(), 1.0};
  beta_trans_ = config_.beta_transition.value_or(beta_value(sched, Stream::kTransition));
  trans_log_ = RegressionLog(Stream::kTransition, trans_features_.dim());
  trans_ell_ = ConfidenceEllipsoid(trans_features_.dim(), config_.lambda, beta_trans_);
  trans_cov_ = CoverageTracker(trans_features_.dim(), 0.0);

  if (pairwise_features_) {
    double bound = 0.0;
    if (env.pairwise()) {
      pref_features_ = env.preference->features();
      bound = class_bound(*env.preference, S, A, H);
    } else {
      pref_features_ = env.feedback->features();
      bound = class_bound(*env.feedback, S, A, H) / 2.0;
    }
    const int d = pref_features_.dim();
    sched.covering = {CoveringModel::Kind::kAnalyticLinear, d,
                      pref_features_.norm_bound(), bound, 1.0};
    beta_pref_ = config_.beta_preference.value_or(beta_value(sched, Stream::kPreference));
    pref_log_ = RegressionLog(Stream::kPreference, d, 0.5);
    pref_ell_ = ConfidenceEllipsoid(d, config_.lambda, beta_pref_);
    pref_cov_ = CoverageTracker(d, 0.5);
  } else {
    pref_features_ = env.feedback->features();
    const int d = pref_features_.dim();
    sched.covering = {CoveringModel::Kind::kAnalyticLinear, d,
                      pref_features_.norm_bound() / 2.0,
                      class_bound(*env.feedback, S, A, H), 1.0};
    beta_fb_ = config_.beta_feedback.value_or(beta_value(sched, Stream::kFeedback));
    fb_log_ = RegressionLog(Stream::kFeedback, d, 0.0);
    fb_ell_ = ConfidenceEllipsoid(d, config_.lambda, beta_fb_);
    fb_cov_ = CoverageTracker(d, 0.0);
  }
}

double Agent::beta(Stream stream) const {
  switch (stream) {
    case Stream::kPreference:
      return beta_pref_;
    case Stream::kTransition:
      return beta_trans_;
    case Stream::kFeedback:
      return beta_fb_;
  }
  return 0.0;
}

Agent::Plan Agent::prepare_plan(bool zero_bonuses) {
  const int S = env_.mdp.num_states();
  const int A = env_.mdp.num_actions();
  if (pairwise_features_) {
    pref_ell_.refit();
  } else {
    fb_ell_.refit();
  }
  trans_ell_.refit();

  std::vector<Eigen::VectorXd> targets(static_cast<std::size_t>(S) * A);
  std::vector<double> step_bonus(targets.size());
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      TargetSelection sel =
          select_target_value(trans_ell_, trans_features_, s, a, config_.targets);
      targets[s * A + a] = std::move(sel.value);
      step_bonus[s * A + a] = sel.bonus;
    }
  }
  EstimatorSnapshot snap;
  snap.setting = pairwise_features_ ? Setting::kPairwise : Setting::kSingle;
  snap.preference = pairwise_features_ ? &pref_ell_ : nullptr;
  snap.feedback = pairwise_features_ ? nullptr : &fb_ell_;
  snap.features = &pref_features_;
  snap.preference_offset = 0.5;
  snap.step_bonus = std::move(step_bonus);
  snap.num_actions = A;
  snap.zero_bonuses = zero_bonuses;
  return Plan{estimated_mdp(trans_features_, trans_ell_.center(),
                            env_.mdp.horizon(), env_.mdp.initial_state()),
              std::move(snap), std::move(targets)};
}

void Agent::absorb_transitions(const std::vector<Rollout>& rollouts,
                               const std::vector<Eigen::VectorXd>& targets) {
  const int A = env_.mdp.num_actions();
  const int H = env_.mdp.horizon();
  for (const Rollout& r : rollouts) {
    for (int h = 0; h < H; ++h) {
      const Step& st = r.trajectory.steps[h];
      const int next = h + 1 < H ? r.trajectory.steps[h + 1].state : r.final_state;
      const Eigen::VectorXd& v = targets[st.state * A + st.action];
      const Eigen::VectorXd x = trans_features_.integrate(st.state, st.action, v);
      const auto row = env_.mdp.transition_row(st.state, st.action);
      double truth = 0.0;
      for (std::size_t s2 = 0; s2 < row.size(); ++s2) truth += row[s2] * v[s2];
      trans_log_.append(x, v[next], episode_ + 1);
      trans_ell_.absorb(x, v[next]);
      trans_cov_.add(x, truth);
    }
  }
}

bool Agent::transition_covered() const {
  return trans_cov_.statistic(trans_ell_.center()) <= beta_trans_;
}

nlohmann::json Agent::estimator_state() const {
  nlohmann::json j;
  if (pairwise_features_) {
    j["preference"] = pref_ell_.to_json(false);
  } else {
    j["feedback"] = fb_ell_.to_json(false);
  }
  j["transition"] = trans_ell_.to_json(false);
  return j;
}

EpisodeRecord Agent::comparison_episode(Rng& rng, int n, bool tuple,
                                        bool zero_bonuses, bool uniform,
                                        Source source) {
  EpisodeRecord rec;
  rec.episode = episode_ + 1;
  const int A = env_.mdp.num_actions();
  std::optional<Plan> plan;
  if (uniform) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(env_.pool.size()) - 1);
    for (int i = 0; i < n; ++i) rec.policies.push_back(pick(rng));
    rec.set_size = static_cast<int>(env_.pool.size());
    rec.optimal_in_set = true;
  } else {
    plan.emplace(prepare_plan(zero_bonuses));
    PlanningContext ctx(env_.pool, plan->mdp, plan->snapshot, config_.planning);
    PolicySet set = build_policy_set(ctx, 0.5);
    Selection sel = tuple ? select_exploratory_tuple(set, n, ctx, config_.tuple_cap)
                          : select_exploratory_pair(set, ctx);
    rec.policies = sel.policies;
    rec.objective = sel.value;
    rec.approximate = sel.approximate;
    rec.set_size = static_cast<int>(set.size());
    rec.optimal_in_set = set.contains(env_.optimal_index);
    if (config_.emit_estimator_state) rec.estimator_state = estimator_state();
  }

  std::vector<Rollout> rollouts;
  std::vector<double> truth_g;
  for (int p : rec.policies) {
    rollouts.push_back(sample_rollout(env_.mdp, env_.pool[p], rng));
    rec.trajectories.push_back(rollouts.back().trajectory);
    if (source == Source::kReducedFeedback) {
      rec.feedback.push_back(sample_feedback(*env_.feedback, rollouts.back().trajectory, rng));
      truth_g.push_back(feedback_value(*env_.feedback, rollouts.back().trajectory));
    }
  }
  const int m = static_cast<int>(rec.policies.size());
  std::vector<double> truth_pref;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Trajectory& ti = rec.trajectories[i];
      const Trajectory& tj = rec.trajectories[j];
      if (source == Source::kPreference) {
        rec.preferences.push_back(sample_preference(*env_.preference, ti, tj, rng));
        truth_pref.push_back(pref_prob(*env_.preference, ti, tj));
      } else {
        const int y1 = rec.feedback[i];
        const int y2 = rec.feedback[j];
        rec.preferences.push_back(y1 != y2 ? (y1 > y2) : bernoulli(0.5, rng));
        truth_pref.push_back((truth_g[i] - truth_g[j] + 1.0) / 2.0);
      }
    }
  }

  double regret = 0.0;
  double outer = 0.0;
  for (int p : rec.policies) {
    regret += env_.pref_matrix(env_.optimal_index, p) - 0.5;
    if (!env_.values.empty()) outer += env_.values[env_.optimal_index] - env_.values[p];
  }
  rec.regret = regret;
  if (source == Source::kReducedFeedback) rec.outer_regret = outer;

  if (plan) {
    std::vector<Eigen::VectorXd> x;
    for (const auto& t : rec.trajectories) x.push_back(pref_features_(t));
    for (int i = 0; i < m; ++i) {
      double bp = 0.0;
      for (const Step& st : rec.trajectories[i].steps) {
        bp += plan->snapshot.step_bonus[st.state * A + st.action];
      }
      rec.transition_bonus += std::min(1.0, bp);
      rec.raw_transition_bonus += bp;
      for (int j = i + 1; j < m; ++j) {
        rec.preference_bonus += pref_ell_.width(x[i] - x[j]);
        rec.raw_preference_bonus += pref_ell_.raw_width(x[i] - x[j]);
      }
    }
    rec.covered_preference = pref_cov_.statistic(pref_ell_.center()) <= beta_pref_;
    rec.covered_transition = transition_covered();

    int k = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j, ++k) {
        const Eigen::VectorXd dx = x[i] - x[j];
        const double o = rec.preferences[k];
        pref_log_.append(dx, o, episode_ + 1);
        pref_ell_.absorb(dx, o - 0.5);
        pref_cov_.add(dx, truth_pref[k]);
      }
    }
    absorb_transitions(rollouts, plan->targets);
  }
  ++episode_;
  return rec;
}

EpisodeRecord Agent::single_episode(Rng& rng, bool zero_bonuses) {
  EpisodeRecord rec;
  rec.episode = episode_ + 1;
  const int A = env_.mdp.num_actions();
  Plan plan = prepare_plan(zero_bonuses);
  PlanningContext ctx(env_.pool, plan.mdp, plan.snapshot, config_.planning);
  PolicySet set = build_policy_set(ctx, 0.0);
  Selection sel = select_exploratory_single(set, ctx);
  rec.policies = sel.policies;
  rec.objective = sel.value;
  rec.set_size = static_cast<int>(set.size());
  rec.optimal_in_set = set.contains(env_.optimal_index);
  if (config_.emit_estimator_state) rec.estimator_state = estimator_state();

  const int p = sel.policies[0];
  Rollout r = sample_rollout(env_.mdp, env_.pool[p], rng);
  rec.trajectories.push_back(r.trajectory);
  rec.feedback.push_back(sample_feedback(*env_.feedback, r.trajectory, rng));
  rec.regret = env_.values[env_.optimal_index] - env_.values[p];

  const Eigen::VectorXd x = pref_features_(r.trajectory);
  double bp = 0.0;
  for (const Step& st : r.trajectory.steps) {
    bp += plan.snapshot.step_bonus[st.state * A + st.action];
  }
  rec.transition_bonus = std::min(1.0, bp);
  rec.raw_transition_bonus = bp;
  rec.preference_bonus = fb_ell_.width(x);
  rec.raw_preference_bonus = fb_ell_.raw_width(x);
  rec.covered_preference = fb_cov_.statistic(fb_ell_.center()) <= beta_fb_;
  rec.covered_transition = transition_covered();

  fb_log_.append(x, rec.feedback[0], episode_ + 1);
  fb_ell_.absorb(x, rec.feedback[0]);
  fb_cov_.add(x, feedback_value(*env_.feedback, r.trajectory));
  absorb_transitions({r}, plan.targets);
  ++episode_;
  return rec;
}

EpisodeRecord Agent::uniform_single_episode(Rng& rng) {
  EpisodeRecord rec;
  rec.episode = episode_ + 1;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(env_.pool.size()) - 1);
  const int p = pick(rng);
  rec.policies.push_back(p);
  Rollout r = sample_rollout(env_.mdp, env_.pool[p], rng);
  rec.trajectories.push_back(r.trajectory);
  rec.feedback.push_back(sample_feedback(*env_.feedback, r.trajectory, rng));
  rec.set_size = static_cast<int>(env_.pool.size());
  rec.optimal_in_set = true;
  rec.regret = env_.values[env_.optimal_index] - env_.values[p];
  ++episode_;
  return rec;
}

EpisodeRecord Agent::pbop_episode(Rng& rng) {
  return comparison_episode(rng, 2, false, false, false, Source::kPreference);
}

EpisodeRecord Agent::pbop_plus_episode(Rng& rng) {
  return comparison_episode(rng, config_.n, true, false, false, Source::kPreference);
}

EpisodeRecord Agent::ope_episode(Rng& rng) { return single_episode(rng, false); }

EpisodeRecord Agent::reduction_episode(Rng& rng) {
  return comparison_episode(rng, 2, false,
                            config_.inner == Algorithm::kGreedyNoBonus,
                            config_.inner == Algorithm::kUniformRandom,
                            Source::kReducedFeedback);
}

EpisodeRecord Agent::baseline_episode(Rng& rng) {
  const bool greedy = config_.algorithm == Algorithm::kGreedyNoBonus;
  if (!env_.pairwise()) {
    return greedy ? single_episode(rng, true) : uniform_single_episode(rng);
  }
  return comparison_episode(rng, 2, false, greedy, !greedy, Source::kPreference);
}

EpisodeRecord Agent::run_episode(Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  EpisodeRecord rec;
  switch (config_.algorithm) {
    case Algorithm::kPbop:
      rec = pbop_episode(rng);
      break;
    case Algorithm::kPbopPlus:
      rec = pbop_plus_episode(rng);
      break;
    case Algorithm::kOncePerEpisode:
      rec = ope_episode(rng);
      break;
    case Algorithm::kReduction:
      rec = reduction_episode(rng);
      break;
    case Algorithm::kUniformRandom:
    case Algorithm::kGreedyNoBonus:
      rec = baseline_episode(rng);
      break;
  }
  if (config_.emit_timing) {
    rec.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  }
  return rec;
}

}  // namespace pbrl
