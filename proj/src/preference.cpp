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

#include "pbrl/preference.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "pbrl/error.hpp"

namespace pbrl {
namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> reward_from_json(const nlohmann::json& jr, int S, int A) {
  std::vector<double> r;
  require(jr.size() == static_cast<std::size_t>(S), "reward table has wrong shape");
  for (int s = 0; s < S; ++s) {
    auto row = jr[s].get<std::vector<double>>();
    require(row.size() == static_cast<std::size_t>(A),
            "reward table has wrong shape");
    r.insert(r.end(), row.begin(), row.end());
  }
  return r;
}

nlohmann::json reward_to_json(const std::vector<double>& r, int A) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < r.size(); i += A) {
    out.push_back(std::vector<double>(r.begin() + i, r.begin() + i + A));
  }
  return out;
}

void validate_reward(const std::vector<double>& r, int S, int A, int H) {
  require(r.size() == static_cast<std::size_t>(S) * A,
          "reward table must have S*A entries");
  for (double v : r) {
    require(v >= 0.0 && v <= 1.0 / H + 1e-12,
            "per-step rewards must lie in [0, 1/H]");
  }
}

double trajectory_reward(const std::vector<double>& r, int A,
                         const Trajectory& traj) {
  double total = 0.0;
  for (const Step& st : traj.steps) total += r[st.state * A + st.action];
  return total;
}

// Interns trajectories of several laws so features are computed once.
struct InternedLaws {
  std::vector<Trajectory> trajectories;
  std::vector<std::vector<std::pair<int, double>>> laws;
};

InternedLaws intern_laws(const EpisodicMDP& mdp, const PolicyPool& pool,
                         std::size_t cap) {
  InternedLaws out;
  std::unordered_map<std::uint64_t, int> ids;
  for (const auto& policy : pool.policies) {
    TrajectoryDistribution dist;
    try {
      dist = trajectory_distribution(mdp, policy, cap);
    } catch (const EnumerationCapExceeded& e) {
      throw MonteCarloRequired(e.what());
    }
    std::vector<std::pair<int, double>> law;
    law.reserve(dist.size());
    for (auto& wt : dist) {
      const auto code =
          trajectory_code(wt.trajectory, mdp.num_states(), mdp.num_actions());
      auto [it, inserted] =
          ids.emplace(code, static_cast<int>(out.trajectories.size()));
      if (inserted) out.trajectories.push_back(std::move(wt.trajectory));
      law.emplace_back(it->second, wt.probability);
    }
    out.laws.push_back(std::move(law));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrajectoryFeatureMap

TrajectoryFeatureMap TrajectoryFeatureMap::step_sum(int num_states,
                                                    int num_actions, int dim,
                                                    std::vector<double> phi,
                                                    double norm_bound) {
  require(num_states > 0 && num_actions > 0 && dim > 0,
          "feature map sizes must be positive");
  require(phi.size() == static_cast<std::size_t>(num_states) * num_actions * dim,
          "phi must have S*A*dim entries");
  require(norm_bound > 0.0, "feature norm bound L must be positive");
  TrajectoryFeatureMap m;
  m.kind_ = Kind::kStepSum;
  m.num_states_ = num_states;
  m.num_actions_ = num_actions;
  m.dim_ = dim;
  m.norm_bound_ = norm_bound;
  m.phi_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(
      phi.data(), num_states * num_actions, dim);
  return m;
}

TrajectoryFeatureMap TrajectoryFeatureMap::one_hot(int num_states,
                                                   int num_actions,
                                                   int horizon) {
  const int dim = num_states * num_actions;
  std::vector<double> phi(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) phi[static_cast<std::size_t>(i) * dim + i] = 1.0;
  auto m = step_sum(num_states, num_actions, dim, std::move(phi), 2.0 * horizon);
  m.one_hot_ = true;
  return m;
}

TrajectoryFeatureMap TrajectoryFeatureMap::table(
    int num_states, int num_actions, int dim,
    std::map<std::uint64_t, Eigen::VectorXd> t, double norm_bound) {
  require(num_states > 0 && num_actions > 0 && dim > 0,
          "feature map sizes must be positive");
  require(norm_bound > 0.0, "feature norm bound L must be positive");
  for (const auto& [code, x] : t) {
    require(x.size() == dim, "feature table entry has wrong dimension");
  }
  TrajectoryFeatureMap m;
  m.kind_ = Kind::kTable;
  m.num_states_ = num_states;
  m.num_actions_ = num_actions;
  m.dim_ = dim;
  m.norm_bound_ = norm_bound;
  m.table_ = std::move(t);
  return m;
}

Eigen::VectorXd TrajectoryFeatureMap::operator()(const Trajectory& traj) const {
  if (kind_ == Kind::kTable) {
    auto it = table_.find(trajectory_code(traj, num_states_, num_actions_));
    if (it == table_.end()) return Eigen::VectorXd::Zero(dim_);
    return it->second;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_);
  for (const Step& st : traj.steps) {
    x += phi_.row(st.state * num_actions_ + st.action).transpose();
  }
  return x;
}

void TrajectoryFeatureMap::validate(const EpisodicMDP& mdp) const {
  require(mdp.num_states() == num_states_ && mdp.num_actions() == num_actions_,
          "feature map does not match MDP sizes");
  const int S = num_states_;
  const int A = num_actions_;
  const int H = mdp.horizon();
  const double limit = norm_bound_ / 2.0 + 1e-9;

  // Sequences start at s1; later steps range over all (s, a).
  double count = A * std::pow(static_cast<double>(S * A), H - 1);
  Trajectory traj;
  traj.steps.resize(H);
  auto check = [&] {
    require((*this)(traj).norm() <= limit,
            "trajectory feature norm exceeds L/2");
  };
  if (count <= static_cast<double>(kDefaultTrajectoryCap)) {
    const auto total = static_cast<std::uint64_t>(count);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t rest = idx;
      for (int h = H - 1; h >= 1; --h) {
        const int sa = static_cast<int>(rest % (S * A));
        rest /= (S * A);
        traj.steps[h] = {sa / A, sa % A};
      }
      traj.steps[0] = {mdp.initial_state(), static_cast<int>(rest)};
      check();
    }
  } else {
    Rng rng(0xfea7);
    std::uniform_int_distribution<int> ds(0, S - 1);
    std::uniform_int_distribution<int> da(0, A - 1);
    for (int t = 0; t < 10000; ++t) {
      for (int h = 0; h < H; ++h) {
        traj.steps[h] = {h == 0 ? mdp.initial_state() : ds(rng), da(rng)};
      }
      check();
    }
  }
}

nlohmann::json TrajectoryFeatureMap::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::kTable) {
    j["type"] = "table";
    j["dim"] = dim_;
    j["L"] = norm_bound_;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [code, x] : table_) {
      entries.push_back({{"code", code},
                         {"x", std::vector<double>(x.data(), x.data() + x.size())}});
    }
    j["entries"] = entries;
    return j;
  }
  if (one_hot_) {
    j["type"] = "one_hot";
    return j;
  }
  j["type"] = "step_sum";
  j["L"] = norm_bound_;
  nlohmann::json phi = nlohmann::json::array();
  for (int s = 0; s < num_states_; ++s) {
    nlohmann::json per_s = nlohmann::json::array();
    for (int a = 0; a < num_actions_; ++a) {
      Eigen::VectorXd row = phi_.row(s * num_actions_ + a).transpose();
      per_s.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    phi.push_back(per_s);
  }
  j["phi"] = phi;
  return j;
}

TrajectoryFeatureMap TrajectoryFeatureMap::from_json(const nlohmann::json& j,
                                                     int num_states,
                                                     int num_actions,
                                                     int horizon) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "one_hot") return one_hot(num_states, num_actions, horizon);
  if (type == "step_sum") {
    const auto& jphi = j.at("phi");
    require(jphi.size() == static_cast<std::size_t>(num_states),
            "features.phi has wrong shape");
    std::vector<double> phi;
    int dim = -1;
    for (int s = 0; s < num_states; ++s) {
      require(jphi[s].size() == static_cast<std::size_t>(num_actions),
              "features.phi has wrong shape");
      for (int a = 0; a < num_actions; ++a) {
        auto v = jphi[s][a].get<std::vector<double>>();
        if (dim < 0) dim = static_cast<int>(v.size());
        require(static_cast<int>(v.size()) == dim,
                "features.phi rows differ in dimension");
        phi.insert(phi.end(), v.begin(), v.end());
      }
    }
    return step_sum(num_states, num_actions, dim, std::move(phi),
                    j.at("L").get<double>());
  }
  if (type == "table") {
    const int dim = j.at("dim").get<int>();
    std::map<std::uint64_t, Eigen::VectorXd> t;
    for (const auto& e : j.at("entries")) {
      auto v = e.at("x").get<std::vector<double>>();
      t[e.at("code").get<std::uint64_t>()] =
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return table(num_states, num_actions, dim, std::move(t),
                 j.at("L").get<double>());
  }
  throw InvalidArgument("unknown features.type '" + type + "'");
}

// ---------------------------------------------------------------------------
// PreferenceModel

PreferenceModel PreferenceModel::linear(TrajectoryFeatureMap features,
                                        Eigen::VectorXd theta,
                                        double theta_bound) {
  require(theta.size() == features.dim(), "theta dimension mismatch");
  require(theta.norm() <= theta_bound + 1e-12, "||theta|| exceeds S_theta");
  require(0.5 + features.norm_bound() * theta_bound <= 1.0 + 1e-12,
          "linear preference needs 1/2 + L * S_theta <= 1");
  PreferenceModel m;
  m.kind_ = Kind::kLinear;
  m.features_ = std::move(features);
  m.theta_ = std::move(theta);
  m.theta_bound_ = theta_bound;
  m.num_actions_ = m.features_.num_actions();
  return m;
}

PreferenceModel PreferenceModel::logistic(TrajectoryFeatureMap features,
                                          Eigen::VectorXd theta,
                                          double theta_bound) {
  require(theta.size() == features.dim(), "theta dimension mismatch");
  require(theta.norm() <= theta_bound + 1e-12, "||theta|| exceeds S_theta");
  PreferenceModel m;
  m.kind_ = Kind::kLogistic;
  m.features_ = std::move(features);
  m.theta_ = std::move(theta);
  m.theta_bound_ = theta_bound;
  m.num_actions_ = m.features_.num_actions();
  return m;
}

PreferenceModel PreferenceModel::utility(int num_states, int num_actions,
                                         int horizon,
                                         std::vector<double> reward) {
  validate_reward(reward, num_states, num_actions, horizon);
  PreferenceModel m;
  m.kind_ = Kind::kUtilityBased;
  m.features_ = TrajectoryFeatureMap::one_hot(num_states, num_actions, horizon);
  m.theta_ = 0.5 * Eigen::Map<const Eigen::VectorXd>(
                       reward.data(), static_cast<Eigen::Index>(reward.size()));
  m.theta_bound_ = m.theta_.norm();
  m.reward_ = std::move(reward);
  m.num_actions_ = num_actions;
  return m;
}

double PreferenceModel::utility(const Trajectory& traj) const {
  if (kind_ != Kind::kUtilityBased) {
    throw InvalidArgument("utility() needs a utility-based preference");
  }
  return trajectory_reward(reward_, num_actions_, traj);
}

double PreferenceModel::raw(const Trajectory& t1, const Trajectory& t2) const {
  switch (kind_) {
    case Kind::kLinear: {
      const double f = 0.5 + (features_(t1) - features_(t2)).dot(theta_);
      return std::clamp(f, 0.0, 1.0);
    }
    case Kind::kLogistic:
      return sigmoid((features_(t1) - features_(t2)).dot(theta_));
    case Kind::kUtilityBased:
      return (utility(t1) - utility(t2) + 1.0) / 2.0;
  }
  return 0.5;
}

nlohmann::json PreferenceModel::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::kLinear:
      j["type"] = "linear";
      break;
    case Kind::kLogistic:
      j["type"] = "logistic";
      break;
    case Kind::kUtilityBased:
      j["type"] = "utility";
      j["r"] = reward_to_json(reward_, num_actions_);
      return j;
  }
  j["theta"] = std::vector<double>(theta_.data(), theta_.data() + theta_.size());
  j["S_theta"] = theta_bound_;
  return j;
}

PreferenceModel PreferenceModel::from_json(const nlohmann::json& pref,
                                           const nlohmann::json* features,
                                           int num_states, int num_actions,
                                           int horizon) {
  const std::string type = pref.at("type").get<std::string>();
  if (type == "utility") {
    return utility(num_states, num_actions, horizon,
                   reward_from_json(pref.at("r"), num_states, num_actions));
  }
  require(features != nullptr, "pref.type '" + type + "' needs a features block");
  auto fmap = TrajectoryFeatureMap::from_json(*features, num_states,
                                              num_actions, horizon);
  auto tv = pref.at("theta").get<std::vector<double>>();
  Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(tv.data(), static_cast<Eigen::Index>(tv.size()));
  const double bound = pref.value("S_theta", theta.norm());
  if (type == "linear") return linear(std::move(fmap), theta, bound);
  if (type == "logistic") return logistic(std::move(fmap), theta, bound);
  throw InvalidArgument("unknown pref.type '" + type + "'");
}

// ---------------------------------------------------------------------------
// FeedbackModel

FeedbackModel FeedbackModel::linear_clipped(TrajectoryFeatureMap features,
                                            Eigen::VectorXd theta,
                                            double theta_bound) {
  require(theta.size() == features.dim(), "theta_G dimension mismatch");
  require(theta.norm() <= theta_bound + 1e-12, "||theta_G|| exceeds its bound");
  FeedbackModel m;
  m.kind_ = Kind::kLinearClipped;
  m.features_ = std::move(features);
  m.theta_ = std::move(theta);
  m.theta_bound_ = theta_bound;
  return m;
}

FeedbackModel FeedbackModel::utility_sum(int num_states, int num_actions,
                                         int horizon,
                                         std::vector<double> reward) {
  validate_reward(reward, num_states, num_actions, horizon);
  FeedbackModel m;
  m.kind_ = Kind::kUtilitySum;
  m.features_ = TrajectoryFeatureMap::one_hot(num_states, num_actions, horizon);
  m.theta_ = Eigen::Map<const Eigen::VectorXd>(
      reward.data(), static_cast<Eigen::Index>(reward.size()));
  m.theta_bound_ = m.theta_.norm();
  m.reward_ = std::move(reward);
  return m;
}

nlohmann::json FeedbackModel::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::kUtilitySum) {
    j["type"] = "utility_sum";
    j["r"] = reward_to_json(reward_, features_.num_actions());
    return j;
  }
  j["type"] = "linear_clipped";
  j["theta"] = std::vector<double>(theta_.data(), theta_.data() + theta_.size());
  j["S_theta"] = theta_bound_;
  return j;
}

FeedbackModel FeedbackModel::from_json(const nlohmann::json& fb,
                                       const nlohmann::json* features,
                                       int num_states, int num_actions,
                                       int horizon) {
  const std::string type = fb.at("type").get<std::string>();
  if (type == "utility_sum") {
    return utility_sum(num_states, num_actions, horizon,
                       reward_from_json(fb.at("r"), num_states, num_actions));
  }
  if (type == "linear_clipped") {
    require(features != nullptr, "linear_clipped feedback needs a features block");
    auto fmap = TrajectoryFeatureMap::from_json(*features, num_states,
                                                num_actions, horizon);
    auto tv = fb.at("theta").get<std::vector<double>>();
    Eigen::VectorXd theta =
        Eigen::Map<const Eigen::VectorXd>(tv.data(), static_cast<Eigen::Index>(tv.size()));
    return linear_clipped(std::move(fmap), theta,
                          fb.value("S_theta", theta.norm()));
  }
  throw InvalidArgument("unknown feedback.type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Operations

double pref_prob(const PreferenceModel& model, const Trajectory& t1,
                 const Trajectory& t2) {
  if (t2 < t1) return 1.0 - model.raw(t2, t1);
  return model.raw(t1, t2);
}

bool sample_preference(const PreferenceModel& model, const Trajectory& t1,
                       const Trajectory& t2, Rng& rng) {
  return bernoulli(pref_prob(model, t1, t2), rng);
}

double policy_pref(const PreferenceModel& model, const EpisodicMDP& mdp,
                   const MarkovPolicy& p1, const MarkovPolicy& p2,
                   std::size_t cap) {
  TrajectoryDistribution d1;
  TrajectoryDistribution d2;
  try {
    d1 = trajectory_distribution(mdp, p1, cap);
    d2 = trajectory_distribution(mdp, p2, cap);
  } catch (const EnumerationCapExceeded& e) {
    throw MonteCarloRequired(e.what());
  }
  double total = 0.0;
  for (const auto& a : d1) {
    for (const auto& b : d2) {
      total += a.probability * b.probability *
               pref_prob(model, a.trajectory, b.trajectory);
    }
  }
  return total;
}

MonteCarloEstimate policy_pref_monte_carlo(const PreferenceModel& model,
                                           const EpisodicMDP& mdp,
                                           const MarkovPolicy& p1,
                                           const MarkovPolicy& p2,
                                           std::size_t samples, Rng& rng) {
  require(samples >= 2, "Monte-Carlo estimate needs at least 2 samples");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Trajectory t1 = sample_trajectory(mdp, p1, rng);
    const Trajectory t2 = sample_trajectory(mdp, p2, rng);
    const double f = pref_prob(model, t1, t2);
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

Eigen::MatrixXd policy_pref_matrix(const PreferenceModel& model,
                                   const EpisodicMDP& mdp,
                                   const PolicyPool& pool, std::size_t cap) {
  const InternedLaws laws = intern_laws(mdp, pool, cap);
  const auto m = static_cast<Eigen::Index>(laws.trajectories.size());
  Eigen::MatrixXd f(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      f(a, b) = pref_prob(model, laws.trajectories[a], laws.trajectories[b]);
    }
  }
  const auto P = static_cast<Eigen::Index>(pool.size());
  Eigen::MatrixXd out(P, P);
  for (Eigen::Index i = 0; i < P; ++i) {
    for (Eigen::Index j = 0; j < P; ++j) {
      double total = 0.0;
      for (const auto& [ta, pa] : laws.laws[i]) {
        for (const auto& [tb, pb] : laws.laws[j]) total += pa * pb * f(ta, tb);
      }
      out(i, j) = total;
    }
  }
  return out;
}

int find_condorcet_policy(const Eigen::MatrixXd& pref_matrix) {
  if (pref_matrix.rows() == 0) throw InvalidArgument("policy pool is empty");
  for (Eigen::Index i = 0; i < pref_matrix.rows(); ++i) {
    if (pref_matrix.row(i).minCoeff() >= 0.5 - 1e-9) return static_cast<int>(i);
  }
  throw NoCondorcetWinner("no pool policy is preferred to every other member");
}

int find_condorcet_policy(const PreferenceModel& model, const EpisodicMDP& mdp,
                          const PolicyPool& pool) {
  return find_condorcet_policy(policy_pref_matrix(model, mdp, pool));
}

double feedback_value(const FeedbackModel& model, const Trajectory& traj) {
  if (model.kind_ == FeedbackModel::Kind::kUtilitySum) {
    return std::clamp(trajectory_reward(model.reward_,
                                        model.features_.num_actions(), traj),
                      0.0, 1.0);
  }
  return std::clamp(model.features_(traj).dot(model.theta_), 0.0, 1.0);
}

bool sample_feedback(const FeedbackModel& model, const Trajectory& traj,
                     Rng& rng) {
  return bernoulli(feedback_value(model, traj), rng);
}

double policy_feedback_value(const FeedbackModel& model,
                             const EpisodicMDP& mdp,
                             const MarkovPolicy& policy, std::size_t cap) {
  TrajectoryDistribution dist;
  try {
    dist = trajectory_distribution(mdp, policy, cap);
  } catch (const EnumerationCapExceeded& e) {
    throw MonteCarloRequired(e.what());
  }
  double total = 0.0;
  for (const auto& wt : dist) {
    total += wt.probability * feedback_value(model, wt.trajectory);
  }
  return total;
}

std::vector<double> policy_value_vector(const FeedbackModel& model,
                                        const EpisodicMDP& mdp,
                                        const PolicyPool& pool) {
  std::vector<double> out;
  out.reserve(pool.size());
  for (const auto& policy : pool.policies) {
    out.push_back(policy_feedback_value(model, mdp, policy));
  }
  return out;
}

}  // namespace pbrl
