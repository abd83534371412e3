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

#include "pbrl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "pbrl/error.hpp"

namespace pbrl {

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<std::pair<Trajectory, double>> policy_law(
    const EpisodicMDP& mdp, const MarkovPolicy& policy,
    const ExpectationOptions& options, Rng& rng) {
  std::vector<std::pair<Trajectory, double>> out;
  if (options.mode == ExpectationMode::kExact) {
    for (auto& wt : trajectory_distribution(mdp, policy, options.cap)) {
      out.emplace_back(std::move(wt.trajectory), wt.probability);
    }
    return out;
  }
  if (options.samples == 0) {
    throw InvalidArgument("monte-carlo planning needs at least one sample");
  }
  std::map<Trajectory, std::size_t> counts;
  for (std::size_t i = 0; i < options.samples; ++i) {
    ++counts[sample_trajectory(mdp, policy, rng)];
  }
  const double m = static_cast<double>(options.samples);
  for (auto& [traj, c] : counts) out.emplace_back(traj, c / m);
  return out;
}

}  // namespace

double EstimatorSnapshot::trajectory_bonus(const Trajectory& traj) const {
  if (zero_bonuses || step_bonus.empty()) return 0.0;
  double sum = 0.0;
  for (const Step& st : traj.steps) {
    sum += step_bonus[static_cast<std::size_t>(st.state) * num_actions +
                      st.action];
  }
  return std::min(1.0, sum);
}

PairScore make_membership_score(const EstimatorSnapshot& snap,
                                ScoreComponents c) {
  if (snap.features == nullptr) throw InvalidArgument("snapshot has no features");
  if (snap.setting == Setting::kPairwise) {
    if (snap.preference == nullptr) {
      throw InvalidArgument("pairwise snapshot needs a preference ellipsoid");
    }
    return [snap, c](const Trajectory& t1, const Trajectory& t2) {
      const Eigen::VectorXd dx = (*snap.features)(t1) - (*snap.features)(t2);
      double v = 0.0;
      if (c.estimate) {
        v += clip01(snap.preference_offset + snap.preference->predict(dx));
      }
      if (c.preference_bonus && !snap.zero_bonuses) {
        v += snap.preference->width(dx);
      }
      if (c.transition_bonus) {
        v += snap.trajectory_bonus(t1) + snap.trajectory_bonus(t2);
      }
      return v;
    };
  }
  if (snap.feedback == nullptr) {
    throw InvalidArgument("single-trajectory snapshot needs a feedback ellipsoid");
  }
  return [snap, c](const Trajectory& t1, const Trajectory& t0) {
    const Eigen::VectorXd x1 = (*snap.features)(t1);
    const Eigen::VectorXd x0 = (*snap.features)(t0);
    double v = 0.0;
    if (c.estimate) {
      v += clip01(snap.feedback->predict(x1)) - clip01(snap.feedback->predict(x0));
    }
    if (c.preference_bonus && !snap.zero_bonuses) {
      v += snap.feedback->width(x1) + snap.feedback->width(x0);
    }
    if (c.transition_bonus) {
      v += snap.trajectory_bonus(t1) + snap.trajectory_bonus(t0);
    }
    return v;
  };
}

PairScore make_exploration_score(const EstimatorSnapshot& snap) {
  if (snap.features == nullptr || snap.preference == nullptr) {
    throw InvalidArgument("exploration score needs preference features");
  }
  return [snap](const Trajectory& t1, const Trajectory& t2) {
    double v = snap.trajectory_bonus(t1) + snap.trajectory_bonus(t2);
    if (!snap.zero_bonuses) {
      v += snap.preference->width((*snap.features)(t1) - (*snap.features)(t2));
    }
    return v;
  };
}

ScoreEstimate expected_pair_score(const EpisodicMDP& mdp,
                                  const MarkovPolicy& p1,
                                  const MarkovPolicy& p2,
                                  const PairScore& score,
                                  const ExpectationOptions& options) {
  ScoreEstimate out;
  if (options.mode == ExpectationMode::kExact) {
    const auto d1 = trajectory_distribution(mdp, p1, options.cap);
    const auto d2 = trajectory_distribution(mdp, p2, options.cap);
    for (const auto& a : d1) {
      for (const auto& b : d2) {
        out.value += a.probability * b.probability *
                     score(a.trajectory, b.trajectory);
      }
    }
    return out;
  }
  if (options.samples < 2) {
    throw InvalidArgument("monte-carlo expectation needs at least 2 samples");
  }
  Rng rng(options.seed);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < options.samples; ++i) {
    const Trajectory t1 = sample_trajectory(mdp, p1, rng);
    const Trajectory t2 = sample_trajectory(mdp, p2, rng);
    const double v = score(t1, t2);
    sum += v;
    sq += v * v;
  }
  const double m = static_cast<double>(options.samples);
  out.value = sum / m;
  const double var = std::max(0.0, (sq - m * out.value * out.value) / (m - 1.0));
  out.standard_error = std::sqrt(var / m);
  return out;
}

PlanningContext::PlanningContext(const PolicyPool& pool,
                                 const EpisodicMDP& mdp,
                                 const EstimatorSnapshot& snap,
                                 const ExpectationOptions& options,
                                 ScoreComponents c)
    : setting_(snap.setting) {
  if (pool.size() == 0) throw EmptyPolicySet("policy pool is empty");
  if (snap.features == nullptr) throw InvalidArgument("snapshot has no features");
  const ConfidenceEllipsoid* ell =
      snap.setting == Setting::kPairwise ? snap.preference : snap.feedback;
  if (ell == nullptr) throw InvalidArgument("snapshot is missing an ellipsoid");

  Rng rng(options.seed);
  std::map<Trajectory, int> index;
  laws_.resize(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (auto& [traj, p] : policy_law(mdp, pool[i], options, rng)) {
      auto [it, inserted] =
          index.try_emplace(traj, static_cast<int>(trajectories_.size()));
      if (inserted) trajectories_.push_back(traj);
      laws_[i].emplace_back(it->second, p);
    }
  }

  const int m = static_cast<int>(trajectories_.size());
  const int d = snap.features->dim();
  Eigen::MatrixXd x(d, m);
  std::vector<double> bp(m);
  for (int a = 0; a < m; ++a) {
    x.col(a) = (*snap.features)(trajectories_[a]);
    bp[a] = snap.trajectory_bonus(trajectories_[a]);
  }
  const Eigen::VectorXd pred = x.transpose() * ell->center();
  const bool bonus = !snap.zero_bonuses;
  const double scale = 2.0 * std::sqrt(ell->beta());
  const Eigen::MatrixXd z = ell->whiten(x);

  membership_table_.resize(m, m);
  if (setting_ == Setting::kPairwise) {
    exploration_table_.resize(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const double bt =
            bonus ? std::min(1.0, scale * (z.col(a) - z.col(b)).norm()) : 0.0;
        const double est = clip01(snap.preference_offset + pred[a] - pred[b]);
        membership_table_(a, b) = (c.estimate ? est : 0.0) +
                                  (c.preference_bonus ? bt : 0.0) +
                                  (c.transition_bonus ? bp[a] + bp[b] : 0.0);
        exploration_table_(a, b) = bt + bp[a] + bp[b];
      }
    }
  } else {
    std::vector<double> g(m), bg(m);
    exploration_single_.resize(m);
    for (int a = 0; a < m; ++a) {
      g[a] = clip01(pred[a]);
      bg[a] = bonus ? std::min(1.0, scale * z.col(a).norm()) : 0.0;
      exploration_single_[a] = bg[a] + bp[a];
    }
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        membership_table_(a, b) =
            (c.estimate ? g[a] - g[b] : 0.0) +
            (c.preference_bonus ? bg[a] + bg[b] : 0.0) +
            (c.transition_bonus ? bp[a] + bp[b] : 0.0);
      }
    }
  }
  membership_cols_ = apply_laws(membership_table_, laws_);
}

Eigen::MatrixXd PlanningContext::apply_laws(
    const Eigen::MatrixXd& table,
    const std::vector<std::vector<std::pair<int, double>>>& laws) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(table.rows(), static_cast<Eigen::Index>(laws.size()));
  for (std::size_t j = 0; j < laws.size(); ++j) {
    for (const auto& [b, pb] : laws[j]) out.col(j) += pb * table.col(b);
  }
  return out;
}

double PlanningContext::expect(const Eigen::MatrixXd& table, int i,
                               int j) const {
  double v = 0.0;
  for (const auto& [a, pa] : laws_[i]) {
    double row = 0.0;
    for (const auto& [b, pb] : laws_[j]) row += pb * table(a, b);
    v += pa * row;
  }
  return v;
}

double PlanningContext::membership_score(int i, int j) const {
  return expect(membership_table_, i, j);
}

double PlanningContext::exploration_value(int i, int j) const {
  if (setting_ != Setting::kPairwise) {
    throw InvalidArgument("pair exploration value needs the pairwise setting");
  }
  return expect(exploration_table_, i, j);
}

double PlanningContext::exploration_value(int i) const {
  if (setting_ != Setting::kSingle) {
    throw InvalidArgument("single exploration value needs the single setting");
  }
  double v = 0.0;
  for (const auto& [a, pa] : laws_[i]) v += pa * exploration_single_[a];
  return v;
}

void PlanningContext::membership_row(int i, double* out_min,
                                     int* out_arg) const {
  Eigen::RowVectorXd values = Eigen::RowVectorXd::Zero(membership_cols_.cols());
  for (const auto& [a, pa] : laws_[i]) values += pa * membership_cols_.row(a);
  Eigen::Index arg = 0;
  *out_min = values.minCoeff(&arg);
  *out_arg = static_cast<int>(arg);
}

Eigen::MatrixXd PlanningContext::exploration_matrix(
    const std::vector<int>& members) const {
  if (setting_ != Setting::kPairwise) {
    throw InvalidArgument("pair exploration value needs the pairwise setting");
  }
  std::vector<std::vector<std::pair<int, double>>> laws;
  laws.reserve(members.size());
  for (int i : members) laws.push_back(laws_[i]);
  const Eigen::MatrixXd right = apply_laws(exploration_table_, laws);
  Eigen::MatrixXd out(right.cols(), right.cols());
  for (std::size_t r = 0; r < laws.size(); ++r) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(right.cols());
    for (const auto& [a, pa] : laws[r]) row += pa * right.row(a);
    out.row(r) = row;
  }
  return out;
}

namespace {

PolicySet finish_set(std::vector<int> opponent, std::vector<double> cert,
                     double threshold) {
  PolicySet set;
  set.threshold = threshold;
  set.is_member.assign(cert.size(), 0);
  for (std::size_t i = 0; i < cert.size(); ++i) {
    if (cert[i] >= threshold - 1e-9) {
      set.is_member[i] = 1;
      set.members.push_back(static_cast<int>(i));
    }
  }
  set.opponent = std::move(opponent);
  set.certificate = std::move(cert);
  return set;
}

}  // namespace

PolicySet build_policy_set(const PlanningContext& ctx, double threshold) {
  const int n = static_cast<int>(ctx.pool_size());
  std::vector<int> opponent(n);
  std::vector<double> cert(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) ctx.membership_row(i, &cert[i], &opponent[i]);
  return finish_set(std::move(opponent), std::move(cert), threshold);
}

PolicySet build_policy_set_serial(const PlanningContext& ctx,
                                  double threshold) {
  const int n = static_cast<int>(ctx.pool_size());
  std::vector<int> opponent(n);
  std::vector<double> cert(n);
  for (int i = 0; i < n; ++i) ctx.membership_row(i, &cert[i], &opponent[i]);
  return finish_set(std::move(opponent), std::move(cert), threshold);
}

namespace {

void require_members(const PolicySet& set) {
  if (set.empty()) {
    std::string msg = "near-optimal policy set is empty (threshold " +
                      std::to_string(set.threshold) + "; best certificate ";
    double best = -1e300;
    for (double c : set.certificate) best = std::max(best, c);
    msg += std::to_string(best) + ")";
    throw EmptyPolicySet(msg);
  }
}

Eigen::MatrixXd member_pair_values(const PolicySet& set,
                                   const PlanningContext& ctx) {
  return ctx.exploration_matrix(set.members);
}

}  // namespace

Selection select_exploratory_pair(const PolicySet& set,
                                  const PlanningContext& ctx) {
  require_members(set);
  const Eigen::MatrixXd v = member_pair_values(set, ctx);
  const int k = static_cast<int>(set.size());
  int bi = 0;
  int bj = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (v(i, j) > v(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  return {{set.members[bi], set.members[bj]}, v(bi, bj), false};
}

Selection select_exploratory_tuple(const PolicySet& set, int n,
                                   const PlanningContext& ctx,
                                   std::size_t tuple_cap) {
  if (n < 2) throw InvalidArgument("tuple size must be at least 2");
  require_members(set);
  const Eigen::MatrixXd v = member_pair_values(set, ctx);
  const int k = static_cast<int>(set.size());

  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= k;

  std::vector<int> best(n, 0);
  double best_value = 0.0;
  bool approximate = false;
  if (count <= static_cast<double>(tuple_cap)) {
    std::vector<int> cur(n, 0);
    bool first = true;
    while (true) {
      double val = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) val += v(cur[i], cur[j]);
      }
      if (first || val > best_value) {
        best_value = val;
        best = cur;
        first = false;
      }
      int pos = n - 1;
      while (pos >= 0 && ++cur[pos] == k) cur[pos--] = 0;
      if (pos < 0) break;
    }
  } else {
    approximate = true;
    int bi = 0;
    int bj = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (v(i, j) > v(bi, bj)) {
          bi = i;
          bj = j;
        }
      }
    }
    best = {bi, bj};
    best_value = v(bi, bj);
    while (static_cast<int>(best.size()) < n) {
      int arg = 0;
      double gain = 0.0;
      for (int c = 0; c < k; ++c) {
        double g = 0.0;
        for (int b : best) g += v(b, c);
        if (c == 0 || g > gain) {
          gain = g;
          arg = c;
        }
      }
      best.push_back(arg);
      best_value += gain;
    }
  }
  Selection out;
  out.value = best_value;
  out.approximate = approximate;
  for (int i : best) out.policies.push_back(set.members[i]);
  return out;
}

Selection select_exploratory_single(const PolicySet& set,
                                    const PlanningContext& ctx) {
  require_members(set);
  int arg = set.members[0];
  double best = ctx.exploration_value(arg);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double v = ctx.exploration_value(set.members[i]);
    if (v > best) {
      best = v;
      arg = set.members[i];
    }
  }
  return {{arg}, best, false};
}

}  // namespace pbrl
