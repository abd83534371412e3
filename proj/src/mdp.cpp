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

#include "pbrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>

#include "pbrl/error.hpp"

namespace pbrl {
namespace {

constexpr double kStochasticTol = 1e-9;

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

// A^n, or nullopt when it does not fit comfortably in 62 bits.
std::optional<std::uint64_t> checked_power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > kLimit / base) return std::nullopt;
    out *= base;
  }
  return out;
}

}  // namespace

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool bernoulli(double p, Rng& rng) { return uniform01(rng) < p; }

std::uint64_t trajectory_code(const Trajectory& traj, int num_states,
                              int num_actions) {
  const std::uint64_t radix =
      static_cast<std::uint64_t>(num_states) * num_actions;
  std::uint64_t code = 0;
  for (const Step& st : traj.steps) {
    if (code > (std::numeric_limits<std::uint64_t>::max() - radix) / radix) {
      throw InvalidArgument("trajectory code overflows 64 bits");
    }
    code = code * radix +
           static_cast<std::uint64_t>(st.state) * num_actions + st.action;
  }
  return code;
}

// ---------------------------------------------------------------------------
// MixtureFeatures

MixtureFeatures::MixtureFeatures(int num_states, int num_actions, int dim,
                                 std::vector<double> psi)
    : num_states_(num_states),
      num_actions_(num_actions),
      dim_(dim),
      psi_(std::move(psi)) {
  require(num_states > 0 && num_actions > 0 && dim > 0,
          "mixture features need positive sizes");
  require(psi_.size() == static_cast<std::size_t>(num_states) * num_actions *
                             num_states * dim,
          "mixture feature tensor has wrong size");
  for (double v : psi_) require(std::isfinite(v), "mixture feature not finite");
}

Eigen::Map<const Eigen::MatrixXd> MixtureFeatures::block(int s, int a) const {
  const std::size_t offset =
      (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ * dim_;
  return Eigen::Map<const Eigen::MatrixXd>(psi_.data() + offset, dim_,
                                           num_states_);
}

double MixtureFeatures::psi(int s, int a, int next, int i) const {
  return block(s, a)(i, next);
}

Eigen::VectorXd MixtureFeatures::integrate(int s, int a,
                                           const Eigen::VectorXd& value) const {
  return block(s, a) * value;
}

// ---------------------------------------------------------------------------
// EpisodicMDP

EpisodicMDP EpisodicMDP::tabular(int num_states, int num_actions, int horizon,
                                 int initial_state,
                                 std::vector<double> kernel) {
  EpisodicMDP mdp;
  mdp.num_states_ = num_states;
  mdp.num_actions_ = num_actions;
  mdp.horizon_ = horizon;
  mdp.initial_state_ = initial_state;
  mdp.dense_ = std::move(kernel);
  mdp.validate();
  return mdp;
}

EpisodicMDP EpisodicMDP::linear_mixture(int num_states, int num_actions,
                                        int horizon, int initial_state,
                                        LinearMixtureKernel kernel) {
  require(kernel.features.num_states() == num_states &&
              kernel.features.num_actions() == num_actions,
          "mixture features do not match the MDP sizes");
  require(kernel.theta.size() == kernel.features.dim(),
          "mixture parameter has wrong dimension");
  require(kernel.theta.norm() <= kernel.bound + 1e-12,
          "mixture parameter exceeds its norm bound B");

  EpisodicMDP mdp;
  mdp.num_states_ = num_states;
  mdp.num_actions_ = num_actions;
  mdp.horizon_ = horizon;
  mdp.initial_state_ = initial_state;
  mdp.dense_.resize(static_cast<std::size_t>(num_states) * num_actions *
                    num_states);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      Eigen::VectorXd row = kernel.features.block(s, a).transpose() *
                            kernel.theta;
      for (int n = 0; n < num_states; ++n) {
        double p = row(n);
        // Round-off can leave exact zeros slightly negative.
        if (p < 0.0 && p > -1e-12) p = 0.0;
        mdp.dense_[(static_cast<std::size_t>(s) * num_actions + a) *
                       num_states +
                   n] = p;
      }
    }
  }

  // Unit-norm condition on sum_{s'} psi(s,a,s') V(s') over V in {0,1}^S.
  const auto& feats = kernel.features;
  auto check_vertex = [&](const Eigen::VectorXd& v) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        require(feats.integrate(s, a, v).norm() <= 1.0 + 1e-9,
                "mixture features violate ||sum psi V||_2 <= 1");
      }
    }
  };
  Eigen::VectorXd v(num_states);
  if (num_states <= 12) {
    for (std::uint32_t mask = 0; mask < (1u << num_states); ++mask) {
      for (int n = 0; n < num_states; ++n) v(n) = (mask >> n) & 1u;
      check_vertex(v);
    }
  } else {
    Rng rng(0x5eed);
    for (int t = 0; t < 1000; ++t) {
      for (int n = 0; n < num_states; ++n) v(n) = bernoulli(0.5, rng);
      check_vertex(v);
    }
  }
  mdp.mixture_ = std::move(kernel);
  mdp.validate();
  return mdp;
}

void EpisodicMDP::validate() const {
  require(num_states_ > 0 && num_actions_ > 0 && horizon_ > 0,
          "MDP sizes must be positive");
  require(initial_state_ >= 0 && initial_state_ < num_states_,
          "initial state out of range");
  require(dense_.size() == static_cast<std::size_t>(num_states_) *
                               num_actions_ * num_states_,
          "transition tensor has wrong size");
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      double total = 0.0;
      for (double p : transition_row(s, a)) {
        require(std::isfinite(p) && p >= 0.0,
                "transition probabilities must be nonnegative");
        total += p;
      }
      require(std::abs(total - 1.0) <= kStochasticTol,
              "transition row (" + std::to_string(s) + "," +
                  std::to_string(a) + ") does not sum to 1");
    }
  }
}

std::span<const double> EpisodicMDP::transition_row(int s, int a) const {
  return {dense_.data() +
              (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_,
          static_cast<std::size_t>(num_states_)};
}

const LinearMixtureKernel& EpisodicMDP::mixture() const {
  if (!mixture_) throw InvalidArgument("MDP kernel is tabular");
  return *mixture_;
}

MixtureFeatures EpisodicMDP::transition_features() const {
  if (mixture_) return mixture_->features;
  const int S = num_states_;
  const int A = num_actions_;
  const int dim = S * S * A;
  const double scale = 1.0 / std::sqrt(static_cast<double>(S));
  std::vector<double> psi(static_cast<std::size_t>(S) * A * S * dim, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (int n = 0; n < S; ++n) {
        const int i = (s * A + a) * S + n;
        psi[((static_cast<std::size_t>(s) * A + a) * S + n) * dim + i] = scale;
      }
    }
  }
  return MixtureFeatures(S, A, dim, std::move(psi));
}

Eigen::VectorXd EpisodicMDP::transition_parameter() const {
  if (mixture_) return mixture_->theta;
  Eigen::VectorXd theta(static_cast<Eigen::Index>(dense_.size()));
  const double scale = std::sqrt(static_cast<double>(num_states_));
  for (std::size_t i = 0; i < dense_.size(); ++i) theta(i) = scale * dense_[i];
  return theta;
}

double EpisodicMDP::transition_parameter_bound() const {
  if (mixture_) return mixture_->bound;
  // ||sqrt(S) vec(P)||_2 <= sqrt(S) * sqrt(S A) since each row has norm <= 1.
  return std::sqrt(static_cast<double>(num_states_)) *
         std::sqrt(static_cast<double>(num_states_ * num_actions_));
}

// ---------------------------------------------------------------------------
// MarkovPolicy

MarkovPolicy MarkovPolicy::deterministic(int num_states, int num_actions,
                                         int horizon,
                                         std::vector<int> actions) {
  require(num_states > 0 && num_actions > 0 && horizon > 0,
          "policy sizes must be positive");
  require(actions.size() == static_cast<std::size_t>(horizon) * num_states,
          "deterministic policy needs one action per (h, s)");
  MarkovPolicy pol;
  pol.num_states_ = num_states;
  pol.num_actions_ = num_actions;
  pol.horizon_ = horizon;
  pol.probs_.assign(actions.size() * num_actions, 0.0);
  for (std::size_t slot = 0; slot < actions.size(); ++slot) {
    require(actions[slot] >= 0 && actions[slot] < num_actions,
            "policy action out of range");
    pol.probs_[slot * num_actions + actions[slot]] = 1.0;
  }
  pol.actions_ = std::move(actions);
  return pol;
}

MarkovPolicy MarkovPolicy::stochastic(int num_states, int num_actions,
                                      int horizon, std::vector<double> probs) {
  require(num_states > 0 && num_actions > 0 && horizon > 0,
          "policy sizes must be positive");
  require(probs.size() ==
              static_cast<std::size_t>(horizon) * num_states * num_actions,
          "stochastic policy has wrong size");
  MarkovPolicy pol;
  pol.num_states_ = num_states;
  pol.num_actions_ = num_actions;
  pol.horizon_ = horizon;
  for (std::size_t slot = 0; slot < probs.size() / num_actions; ++slot) {
    double total = 0.0;
    for (int a = 0; a < num_actions; ++a) {
      const double p = probs[slot * num_actions + a];
      require(std::isfinite(p) && p >= 0.0, "policy probabilities must be >= 0");
      total += p;
    }
    require(std::abs(total - 1.0) <= kStochasticTol,
            "policy row does not sum to 1");
  }
  pol.probs_ = std::move(probs);
  return pol;
}

int MarkovPolicy::action(int h, int s) const {
  if (actions_.empty()) throw InvalidArgument("policy is not deterministic");
  return actions_[static_cast<std::size_t>(h) * num_states_ + s];
}

int MarkovPolicy::sample_action(int h, int s, Rng& rng) const {
  if (!actions_.empty()) return action(h, s);
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (int a = 0; a < num_actions_; ++a) {
    const double p = prob(h, s, a);
    if (p <= 0.0) continue;
    acc += p;
    last = a;
    if (u < acc) return a;
  }
  return last;
}

std::uint64_t policy_code(const MarkovPolicy& policy) {
  if (!policy.is_deterministic()) {
    throw InvalidArgument("only deterministic policies have codes");
  }
  std::uint64_t code = 0;
  for (int a : policy.actions()) {
    code = code * static_cast<std::uint64_t>(policy.num_actions()) +
           static_cast<std::uint64_t>(a);
  }
  return code;
}

MarkovPolicy policy_from_code(int num_states, int num_actions, int horizon,
                              std::uint64_t code) {
  std::vector<int> actions(static_cast<std::size_t>(horizon) * num_states);
  for (std::size_t i = actions.size(); i-- > 0;) {
    actions[i] = static_cast<int>(code % num_actions);
    code /= num_actions;
  }
  if (code != 0) throw InvalidArgument("policy code out of range");
  return MarkovPolicy::deterministic(num_states, num_actions, horizon,
                                     std::move(actions));
}

PolicyPool enumerate_policy_pool(int num_states, int num_actions, int horizon,
                                 PoolMode mode, std::size_t cap,
                                 std::uint64_t seed) {
  require(cap >= 1, "policy pool cap must be >= 1");
  require(num_states > 0 && num_actions > 0 && horizon > 0,
          "policy pool sizes must be positive");
  const auto total = checked_power(num_actions, num_states * horizon);

  PolicyPool pool;
  pool.mode = mode;
  pool.seed = seed;
  if (mode == PoolMode::kExhaustive) {
    if (!total || *total > cap) {
      throw CapExceeded("exhaustive pool would contain A^(S*H) policies, "
                        "more than the cap of " +
                        std::to_string(cap));
    }
    for (std::uint64_t code = 0; code < *total; ++code) pool.codes.push_back(code);
  } else {
    require(total.has_value(), "policy space too large to sample codes");
    require(cap <= *total, "sampled pool larger than the policy space");
    Rng rng(seed);
    std::uniform_int_distribution<std::uint64_t> draw(0, *total - 1);
    std::set<std::uint64_t> chosen;
    while (chosen.size() < cap) chosen.insert(draw(rng));
    pool.codes.assign(chosen.begin(), chosen.end());
  }
  pool.policies.reserve(pool.codes.size());
  for (std::uint64_t code : pool.codes) {
    pool.policies.push_back(
        policy_from_code(num_states, num_actions, horizon, code));
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Trajectory laws

TrajectoryDistribution trajectory_distribution(const EpisodicMDP& mdp,
                                               const MarkovPolicy& policy,
                                               std::size_t cap) {
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  require(policy.horizon() == H && policy.num_states() == S &&
              policy.num_actions() == A,
          "policy does not match MDP sizes");

  TrajectoryDistribution out;
  Trajectory prefix;
  prefix.steps.reserve(H);

  std::function<void(int, int, double)> expand = [&](int h, int s,
                                                     double mass) {
    for (int a = 0; a < A; ++a) {
      const double pa = policy.prob(h, s, a);
      if (pa <= 0.0) continue;
      prefix.steps.push_back({s, a});
      if (h + 1 == H) {
        if (out.size() >= cap) {
          throw EnumerationCapExceeded(
              "more than " + std::to_string(cap) + " reachable trajectories");
        }
        out.push_back({prefix, mass * pa});
      } else {
        for (int n = 0; n < S; ++n) {
          const double pn = mdp.transition(s, a, n);
          if (pn <= 0.0) continue;
          expand(h + 1, n, mass * pa * pn);
        }
      }
      prefix.steps.pop_back();
    }
  };
  expand(0, mdp.initial_state(), 1.0);
  return out;
}

Rollout sample_rollout(const EpisodicMDP& mdp, const MarkovPolicy& policy,
                       Rng& rng) {
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  Rollout out;
  out.trajectory.steps.reserve(H);
  int s = mdp.initial_state();
  for (int h = 0; h < H; ++h) {
    const int a = policy.sample_action(h, s, rng);
    out.trajectory.steps.push_back({s, a});
    const double u = uniform01(rng);
    double acc = 0.0;
    int next = -1;
    int last = 0;
    for (int n = 0; n < S; ++n) {
      const double p = mdp.transition(s, a, n);
      if (p <= 0.0) continue;
      acc += p;
      last = n;
      if (u < acc) {
        next = n;
        break;
      }
    }
    s = next < 0 ? last : next;
  }
  out.final_state = s;
  return out;
}

Trajectory sample_trajectory(const EpisodicMDP& mdp,
                             const MarkovPolicy& policy, Rng& rng) {
  return sample_rollout(mdp, policy, rng).trajectory;
}

std::vector<Eigen::MatrixXd> occupancy_measure(const EpisodicMDP& mdp,
                                               const MarkovPolicy& policy) {
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<Eigen::MatrixXd> occ(H, Eigen::MatrixXd::Zero(S, A));
  Eigen::VectorXd state_mass = Eigen::VectorXd::Zero(S);
  state_mass(mdp.initial_state()) = 1.0;
  for (int h = 0; h < H; ++h) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(S);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double m = state_mass(s) * policy.prob(h, s, a);
        occ[h](s, a) = m;
        if (m == 0.0) continue;
        for (int n = 0; n < S; ++n) next(n) += m * mdp.transition(s, a, n);
      }
    }
    state_mass = next;
  }
  return occ;
}

EpisodicMDP estimated_mdp(const MixtureFeatures& features,
                          const Eigen::VectorXd& theta, int horizon,
                          int initial_state, int* projected_rows) {
  const int S = features.num_states();
  const int A = features.num_actions();
  std::vector<double> kernel(static_cast<std::size_t>(S) * A * S);
  int projected = 0;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      Eigen::VectorXd row = features.block(s, a).transpose() * theta;
      bool touched = false;
      double total = 0.0;
      for (int n = 0; n < S; ++n) {
        if (row(n) < 0.0) {
          row(n) = 0.0;
          touched = true;
        }
        total += row(n);
      }
      if (total <= 1e-12) {
        row.setConstant(1.0 / S);
        touched = true;
      } else if (std::abs(total - 1.0) > 1e-12) {
        row /= total;
        touched = true;
      }
      if (touched) ++projected;
      for (int n = 0; n < S; ++n) {
        kernel[(static_cast<std::size_t>(s) * A + a) * S + n] = row(n);
      }
    }
  }
  if (projected_rows != nullptr) *projected_rows = projected;
  return EpisodicMDP::tabular(S, A, horizon, initial_state, std::move(kernel));
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json mdp_to_json(const EpisodicMDP& mdp) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  nlohmann::json j;
  j["S"] = S;
  j["A"] = A;
  j["H"] = mdp.horizon();
  j["s1"] = mdp.initial_state();
  nlohmann::json kernel;
  if (mdp.is_linear_mixture()) {
    const auto& mix = mdp.mixture();
    const int d = mix.features.dim();
    kernel["type"] = "linear_mixture";
    nlohmann::json psi = nlohmann::json::array();
    for (int s = 0; s < S; ++s) {
      nlohmann::json per_s = nlohmann::json::array();
      for (int a = 0; a < A; ++a) {
        nlohmann::json per_a = nlohmann::json::array();
        for (int n = 0; n < S; ++n) {
          std::vector<double> v(d);
          for (int i = 0; i < d; ++i) v[i] = mix.features.psi(s, a, n, i);
          per_a.push_back(v);
        }
        per_s.push_back(per_a);
      }
      psi.push_back(per_s);
    }
    kernel["psi"] = psi;
    kernel["theta"] = std::vector<double>(mix.theta.data(),
                                          mix.theta.data() + mix.theta.size());
    kernel["B"] = mix.bound;
  } else {
    kernel["type"] = "tabular";
    nlohmann::json P = nlohmann::json::array();
    for (int s = 0; s < S; ++s) {
      nlohmann::json per_s = nlohmann::json::array();
      for (int a = 0; a < A; ++a) {
        auto row = mdp.transition_row(s, a);
        per_s.push_back(std::vector<double>(row.begin(), row.end()));
      }
      P.push_back(per_s);
    }
    kernel["P"] = P;
  }
  j["kernel"] = kernel;
  return j;
}

EpisodicMDP mdp_from_json(const nlohmann::json& j) {
  const int S = j.at("S").get<int>();
  const int A = j.at("A").get<int>();
  const int H = j.at("H").get<int>();
  const int s1 = j.value("s1", 0);
  const auto& kernel = j.at("kernel");
  const std::string type = kernel.at("type").get<std::string>();
  if (type == "tabular") {
    std::vector<double> P;
    const auto& jp = kernel.at("P");
    require(jp.size() == static_cast<std::size_t>(S), "kernel.P has wrong shape");
    for (int s = 0; s < S; ++s) {
      require(jp[s].size() == static_cast<std::size_t>(A),
              "kernel.P has wrong shape");
      for (int a = 0; a < A; ++a) {
        auto row = jp[s][a].get<std::vector<double>>();
        require(row.size() == static_cast<std::size_t>(S),
                "kernel.P has wrong shape");
        P.insert(P.end(), row.begin(), row.end());
      }
    }
    return EpisodicMDP::tabular(S, A, H, s1, std::move(P));
  }
  if (type == "linear_mixture") {
    const auto theta_v = kernel.at("theta").get<std::vector<double>>();
    const int d = static_cast<int>(theta_v.size());
    std::vector<double> psi;
    psi.reserve(static_cast<std::size_t>(S) * A * S * d);
    const auto& jpsi = kernel.at("psi");
    require(jpsi.size() == static_cast<std::size_t>(S),
            "kernel.psi has wrong shape");
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        for (int n = 0; n < S; ++n) {
          auto v = jpsi.at(s).at(a).at(n).get<std::vector<double>>();
          require(v.size() == static_cast<std::size_t>(d),
                  "kernel.psi feature dimension mismatch");
          psi.insert(psi.end(), v.begin(), v.end());
        }
      }
    }
    LinearMixtureKernel mix{MixtureFeatures(S, A, d, std::move(psi)),
                            Eigen::Map<const Eigen::VectorXd>(theta_v.data(), d),
                            kernel.at("B").get<double>()};
    return EpisodicMDP::linear_mixture(S, A, H, s1, std::move(mix));
  }
  throw InvalidArgument("unknown kernel.type '" + type + "'");
}

nlohmann::json pool_to_json(const PolicyPool& pool) {
  nlohmann::json j;
  j["mode"] = pool.mode == PoolMode::kExhaustive ? "exhaustive" : "sampled";
  j["seed"] = pool.seed;
  j["size"] = pool.size();
  j["codes"] = pool.codes;
  return j;
}

PolicyPool pool_from_json(const nlohmann::json& j, int num_states,
                          int num_actions, int horizon) {
  PolicyPool pool;
  pool.mode = j.value("mode", std::string("exhaustive")) == "sampled"
                  ? PoolMode::kSampled
                  : PoolMode::kExhaustive;
  pool.seed = j.value("seed", std::uint64_t{0});
  pool.codes = j.at("codes").get<std::vector<std::uint64_t>>();
  require(!pool.codes.empty(), "policy pool must be nonempty");
  for (std::uint64_t code : pool.codes) {
    pool.policies.push_back(
        policy_from_code(num_states, num_actions, horizon, code));
  }
  return pool;
}

nlohmann::json trajectory_to_json(const Trajectory& traj) {
  nlohmann::json j = nlohmann::json::array();
  for (const Step& st : traj.steps) j.push_back({st.state, st.action});
  return j;
}

}  // namespace pbrl
