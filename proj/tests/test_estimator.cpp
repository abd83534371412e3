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


#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pbrl/error.hpp"
#include "pbrl/estimator.hpp"

using namespace pbrl;

namespace {

RegressionLog planted_log(int d, int rows, std::uint64_t seed, double offset) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) theta(i) = u(rng);
  RegressionLog log(Stream::kPreference, d, offset);
  for (int t = 0; t < rows; ++t) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = u(rng);
    const double y = offset + 0.2 * x.dot(theta) + 0.1 * normal(rng);
    log.append(x, std::clamp(y, 0.0, 1.0), t);
  }
  return log;
}

ConfidenceEllipsoid random_ellipsoid(int d, int rows, double beta,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ConfidenceEllipsoid ell(d, 1.0, beta);
  for (int t = 0; t < rows; ++t) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = normal(rng);
    ell.absorb(x, normal(rng));
  }
  ell.refit();
  return ell;
}

double ridge_loss(const RegressionLog& log, double lambda,
                  const Eigen::VectorXd& theta) {
  double loss = lambda * theta.squaredNorm();
  for (const auto& row : log.rows()) {
    const double e = row.y - log.target_offset() - row.x.dot(theta);
    loss += e * e;
  }
  return loss;
}

// Random tabular-style mixture features with unit-norm integrals.
MixtureFeatures random_mixture(int S, int A, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> psi(static_cast<std::size_t>(S) * A * S * d);
  for (double& v : psi) v = u(rng) / (S * std::sqrt(static_cast<double>(d)));
  return MixtureFeatures(S, A, d, psi);
}

}  // namespace

TEST_CASE("ridge fit on an empty log is zero") {
  RegressionLog log(Stream::kTransition, 3);
  const auto ell = fit_least_squares(log, 1.0);
  CHECK(ell.center().isZero(0.0));
  CHECK(ell.count() == 0);
}

TEST_CASE("ridge fit on a single sample") {
  RegressionLog log(Stream::kTransition, 2);
  log.append(Eigen::Vector2d(1, 0), 1.0, 0);
  const auto ell = fit_least_squares(log, 1.0);
  CHECK(ell.center()(0) == doctest::Approx(0.5));
  CHECK(ell.center()(1) == 0.0);
}

TEST_CASE("ridge fit matches the normal equations") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 1 + static_cast<int>(seed % 8);
    const auto log = planted_log(d, 200, seed, seed % 2 ? 0.5 : 0.0);
    const auto ell = fit_least_squares(log, 1.0);
    const auto want = oracle::ridge(log, 1.0);
    for (int i = 0; i < d; ++i) CHECK(std::abs(ell.center()(i) - want[i]) < 1e-8);
  }
}

TEST_CASE("ridge fit is a minimizer of the ridge loss") {
  const auto log = planted_log(4, 300, 5, 0.5);
  const auto ell = fit_least_squares(log, 1.0);
  const double base = ridge_loss(log, 1.0, ell.center());
  for (int i = 0; i < 4; ++i) {
    for (double h : {1e-4, -1e-4}) {
      Eigen::VectorXd t = ell.center();
      t(i) += h;
      CHECK(ridge_loss(log, 1.0, t) >= base);
    }
  }
}

TEST_CASE("incremental updates agree with the batch fit") {
  const auto log = planted_log(5, 120, 9, 0.5);
  ConfidenceEllipsoid inc(5, 2.0, 1.0);
  for (const auto& row : log.rows()) inc.absorb(row.x, row.y - 0.5);
  inc.refit();
  const auto batch = fit_least_squares(log, 2.0);
  CHECK((inc.center() - batch.center()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((inc.gram() - batch.gram()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("queries before refit are rejected") {
  ConfidenceEllipsoid ell(2, 1.0, 1.0);
  ell.absorb(Eigen::Vector2d(1, 1), 0.3);
  CHECK_THROWS_AS(ell.center(), Error);
  ell.refit();
  CHECK_NOTHROW(ell.center());
}

TEST_CASE("ellipsoid width closed form") {
  ConfidenceEllipsoid ell(2, 1.0, 0.04);
  CHECK(ellipsoid_width(ell, Eigen::Vector2d::Zero()) == 0.0);
  CHECK(ellipsoid_width(ell, Eigen::Vector2d(1, 0)) == doctest::Approx(0.4));
  ell.set_beta(100.0);
  CHECK(ellipsoid_width(ell, Eigen::Vector2d(1, 0)) == 1.0);
  CHECK(ell.raw_width(Eigen::Vector2d(1, 0)) == doctest::Approx(20.0));
}

TEST_CASE("ellipsoid width matches boundary search") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int d = 1 + static_cast<int>(seed % 4);
    const auto ell = random_ellipsoid(d, 5 + static_cast<int>(seed), 0.01 + 0.02 * seed, seed);
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = normal(rng);
    const double want = std::min(1.0, oracle::boundary_width(ell.gram(), ell.beta(), x, 10000, seed));
    CHECK(std::abs(ellipsoid_width(ell, x) - want) < 1e-3);
  }
}

TEST_CASE("vertex selection with one informative direction") {
  // psi(s', .) = (1, 0) for s' = 0 and 0 for s' = 1.
  const MixtureFeatures f2(2, 1, 2, {1, 0, 0, 0, 0, 0, 0, 0});
  ConfidenceEllipsoid ell(2, 1.0, 0.25);
  const auto sel = select_target_value(ell, f2, 0, 0);
  CHECK(sel.value == Eigen::Vector2d(1, 0));
  CHECK(sel.bonus == doctest::Approx(1.0));
  CHECK(sel.exact);

  ConfidenceEllipsoid flat(2, 1.0, 0.0);
  CHECK(select_target_value(flat, f2, 0, 0).bonus == 0.0);
}

TEST_CASE("vertex selection matches exhaustive scan") {
  for (int S = 1; S <= 8; ++S) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const int d = 1 + static_cast<int>((S + seed) % 4);
      const auto f = random_mixture(S, 2, d, 31 * S + seed);
      auto ell = random_ellipsoid(d, 3, 0.05, 7 * S + seed);
      for (int a = 0; a < 2; ++a) {
        const auto sel = select_target_value(ell, f, S - 1, a);
        const auto want = oracle::vertex_scan(ell.gram(), ell.beta(), f, S - 1, a);
        CHECK(sel.raw_bonus == doctest::Approx(want.bonus).epsilon(1e-12));
        std::uint32_t mask = 0;
        for (int n = 0; n < S; ++n) mask |= (sel.value(n) > 0.5 ? 1u : 0u) << n;
        CHECK(mask == want.mask);
      }
    }
  }
}

TEST_CASE("vertex optimum dominates interior points") {
  const auto f = random_mixture(6, 1, 3, 77);
  const auto ell = random_ellipsoid(3, 4, 0.3, 78);
  const auto sel = select_target_value(ell, f, 2, 0);
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = u(rng);
    CHECK(ell.raw_width(f.integrate(2, 0, v)) <= sel.raw_bonus + 1e-12);
  }
}

TEST_CASE("heuristic vertex search above the exact cap") {
  const auto f = random_mixture(14, 1, 2, 5);
  const auto ell = random_ellipsoid(2, 2, 0.2, 6);
  TargetOptions opt;
  const auto sel = select_target_value(ell, f, 0, 0, opt);
  CHECK_FALSE(sel.exact);
  CHECK(sel.raw_bonus > 0.0);
  opt.allow_heuristic = false;
  CHECK_THROWS_AS(select_target_value(ell, f, 0, 0, opt), VertexEnumerationCapExceeded);
  opt.max_exact_states = 14;
  const auto full = select_target_value(ell, f, 0, 0, opt);
  CHECK(full.exact);
  CHECK(sel.raw_bonus <= full.raw_bonus + 1e-12);
}

TEST_CASE("confidence radius arithmetic") {
  BetaSchedule s;
  s.episodes = 100;
  s.delta = 0.05;
  s.c_beta = 1.0;
  s.covering.kind = CoveringModel::Kind::kExplicit;
  s.covering.explicit_value = 1000;
  CHECK(beta_value(s, Stream::kPreference) == doctest::Approx(8 * std::log(4e6)));
  CHECK(beta_value(s, Stream::kPreference) == doctest::Approx(121.61).epsilon(1e-4));

  s.covering.explicit_value = s.delta / (2.0 * s.episodes);
  CHECK_THROWS_AS(beta_value(s, Stream::kPreference), InvalidArgument);
  s.covering.explicit_value = 1000;
  s.c_beta = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);

  BetaSchedule a;
  a.covering = {CoveringModel::Kind::kAnalyticLinear, 3, 1.0, 0.5, 1.0};
  const double b1 = beta_value(a, Stream::kTransition);
  for (int k : {1, 10, 100, 1000}) {
    a.episodes = k;
    const double lo = beta_value(a, Stream::kTransition);
    a.episodes = 2 * k;
    CHECK(beta_value(a, Stream::kTransition) > lo);
  }
  (void)b1;

  // Analytic cover: log N = d log(1 + 2 L S / eps) at eps = 1/K.
  a.episodes = 50;
  a.c_beta = 0.1;
  CHECK(beta_value(a, Stream::kPreference) ==
        doctest::Approx(0.8 * (std::log(2 * 50 / 0.05) + 3 * std::log(1 + 2 * 0.5 * 50))));

  // n-wise resolutions shrink eps by n^2 and n.
  a.nwise = true;
  a.n = 3;
  CHECK(beta_value(a, Stream::kPreference) ==
        doctest::Approx(0.8 * (std::log(2 * 50 / 0.05) + 3 * std::log(1 + 2 * 0.5 * 450))));
  CHECK(beta_value(a, Stream::kTransition) ==
        doctest::Approx(0.8 * (std::log(2 * 50 / 0.05) + 3 * std::log(1 + 2 * 0.5 * 150))));
}

TEST_CASE("confidence set membership") {
  const auto log = planted_log(3, 50, 12, 0.5);
  auto ell = fit_least_squares(log, 1.0, 0.0);
  CHECK(model_in_confidence_set(ell, log, ell.center()));
  CHECK_FALSE(model_in_confidence_set(ell, log, Eigen::Vector3d(ell.center() + Eigen::Vector3d(0.1, 0, 0))));

  std::vector<double> truth;
  for (const auto& row : log.rows()) truth.push_back(0.5 + row.x.dot(ell.center()));
  CHECK(confidence_statistic(ell, log, truth) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("running coverage statistic equals the direct sum") {
  const auto log = planted_log(4, 80, 13, 0.5);
  const auto ell = fit_least_squares(log, 1.0);
  const Eigen::Vector4d theta(0.1, -0.2, 0.3, 0.05);
  CoverageTracker tr(4, 0.5);
  for (const auto& row : log.rows()) tr.add(row.x, 0.5 + row.x.dot(theta));
  const double direct = confidence_statistic(ell, log, theta);
  CHECK(tr.statistic(ell.center()) == doctest::Approx(direct).epsilon(1e-9));
}
