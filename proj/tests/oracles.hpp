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


// Independent reference computations shared by the test binaries. Nothing
// here calls into the library's solvers.

#ifndef PBRL_TESTS_ORACLES_HPP_
#define PBRL_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "pbrl/estimator.hpp"
#include "pbrl/mdp.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// (lambda I + X^T X) theta = X^T (y - offset), assembled entry by entry.
inline std::vector<double> ridge(const pbrl::RegressionLog& log, double lambda) {
  const int d = log.dim();
  Matrix a(d, std::vector<double>(d, 0.0));
  std::vector<double> b(d, 0.0);
  for (int i = 0; i < d; ++i) a[i][i] = lambda;
  for (const auto& row : log.rows()) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a[i][j] += row.x(i) * row.x(j);
      b[i] += row.x(i) * (row.y - log.target_offset());
    }
  }
  return solve(a, b);
}

inline double quad(const Eigen::MatrixXd& a, const Eigen::VectorXd& z) {
  double s = 0.0;
  for (int i = 0; i < z.size(); ++i) {
    for (int j = 0; j < z.size(); ++j) s += z(i) * a(i, j) * z(j);
  }
  return s;
}

// max over theta1, theta2 on {||theta - c||_A^2 <= beta} of x^T (theta1 -
// theta2): random boundary points followed by tangent-projected ascent.
inline double boundary_width(const Eigen::MatrixXd& a, double beta,
                             const Eigen::VectorXd& x, int samples,
                             std::uint64_t seed) {
  const int d = static_cast<int>(x.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto to_boundary = [&](Eigen::VectorXd z) {
    return Eigen::VectorXd(z * std::sqrt(beta / quad(a, z)));
  };
  Eigen::VectorXd best = to_boundary(Eigen::VectorXd::Ones(d));
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = normal(rng);
    z = to_boundary(z);
    if (x.dot(z) > x.dot(best)) best = z;
  }
  double step = 0.1 * std::sqrt(beta);
  for (int it = 0; it < 20000 && step > 1e-14; ++it) {
    const Eigen::VectorXd n = a * best;
    const Eigen::VectorXd g = x - (x.dot(n) / n.dot(n)) * n;
    const Eigen::VectorXd cand = to_boundary(best + step * g / (g.norm() + 1e-300));
    if (x.dot(cand) > x.dot(best)) {
      best = cand;
    } else {
      step *= 0.5;
    }
  }
  return 2.0 * x.dot(best);
}

// Lowest-mask maximizer of 2 sqrt(beta) ||sum_s' psi V(s')||_{A^{-1}} over
// {0,1}^S, evaluated vertex by vertex.
struct Vertex {
  std::uint32_t mask = 0;
  double bonus = 0.0;
};

inline Vertex vertex_scan(const Eigen::MatrixXd& gram, double beta,
                          const pbrl::MixtureFeatures& f, int s, int a) {
  const int S = f.num_states();
  const int d = f.dim();
  Matrix g(d, std::vector<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g[i][j] = gram(i, j);
  }
  Vertex best;
  for (std::uint32_t mask = 0; mask < (1u << S); ++mask) {
    std::vector<double> x(d, 0.0);
    for (int n = 0; n < S; ++n) {
      if ((mask >> n) & 1u) {
        for (int i = 0; i < d; ++i) x[i] += f.psi(s, a, n, i);
      }
    }
    const auto y = solve(g, x);
    double q = 0.0;
    for (int i = 0; i < d; ++i) q += x[i] * y[i];
    const double raw = 2.0 * std::sqrt(beta * std::max(0.0, q));
    if (raw > best.bonus + 1e-12) best = {mask, raw};
  }
  return best;
}

inline pbrl::EpisodicMDP random_tabular(int S, int A, int H, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(S) * A * S);
  for (int sa = 0; sa < S * A; ++sa) {
    double total = 0.0;
    for (int n = 0; n < S; ++n) total += p[sa * S + n] = gamma(rng);
    for (int n = 0; n < S; ++n) p[sa * S + n] /= total;
  }
  return pbrl::EpisodicMDP::tabular(S, A, H, 0, std::move(p));
}

inline pbrl::MarkovPolicy random_stochastic_policy(int S, int A, int H,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> p(static_cast<std::size_t>(H) * S * A);
  for (int hs = 0; hs < H * S; ++hs) {
    double total = 0.0;
    for (int a = 0; a < A; ++a) total += p[hs * A + a] = u(rng);
    for (int a = 0; a < A; ++a) p[hs * A + a] /= total;
  }
  return pbrl::MarkovPolicy::stochastic(S, A, H, std::move(p));
}

// Depth-first chain rule over explicit prefixes.
inline void law_rec(const pbrl::EpisodicMDP& mdp, const pbrl::MarkovPolicy& pi,
                    pbrl::Trajectory& prefix, int s, double p,
                    std::map<pbrl::Trajectory, double>& out) {
  const int h = static_cast<int>(prefix.steps.size());
  for (int a = 0; a < mdp.num_actions(); ++a) {
    const double pa = pi.prob(h, s, a);
    if (pa <= 0.0) continue;
    prefix.steps.push_back({s, a});
    if (h + 1 == mdp.horizon()) {
      out[prefix] += p * pa;
    } else {
      for (int n = 0; n < mdp.num_states(); ++n) {
        const double pn = mdp.transition(s, a, n);
        if (pn > 0.0) law_rec(mdp, pi, prefix, n, p * pa * pn, out);
      }
    }
    prefix.steps.pop_back();
  }
}

inline std::map<pbrl::Trajectory, double> trajectory_law(
    const pbrl::EpisodicMDP& mdp, const pbrl::MarkovPolicy& pi) {
  std::map<pbrl::Trajectory, double> out;
  pbrl::Trajectory prefix;
  law_rec(mdp, pi, prefix, mdp.initial_state(), 1.0, out);
  return out;
}

}  // namespace oracle

#endif  // PBRL_TESTS_ORACLES_HPP_
