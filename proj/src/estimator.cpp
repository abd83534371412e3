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

#include "pbrl/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "pbrl/error.hpp"

namespace pbrl {
namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace

std::string_view stream_name(Stream stream) {
  switch (stream) {
    case Stream::kPreference:
      return "preference";
    case Stream::kTransition:
      return "transition";
    case Stream::kFeedback:
      return "feedback";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// RegressionLog

RegressionLog::RegressionLog(Stream stream, int dim, double target_offset)
    : stream_(stream), dim_(dim), target_offset_(target_offset) {
  require(dim > 0, "regression log dimension must be positive");
}

void RegressionLog::append(Eigen::VectorXd x, double y, int episode) {
  require(x.size() == dim_, "regression row has wrong dimension");
  require(x.allFinite(), "regression features must be finite");
  require(y >= 0.0 && y <= 1.0, "regression targets must lie in [0, 1]");
  rows_.push_back({std::move(x), y, episode});
}

// ---------------------------------------------------------------------------
// ConfidenceEllipsoid

ConfidenceEllipsoid::ConfidenceEllipsoid(int dim, double lambda, double beta)
    : lambda_(lambda),
      beta_(beta),
      gram_(lambda * Eigen::MatrixXd::Identity(dim, dim)),
      moment_(Eigen::VectorXd::Zero(dim)) {
  require(dim > 0, "ellipsoid dimension must be positive");
  require(lambda > 0.0, "ridge lambda must be positive");
  require(beta >= 0.0, "confidence radius must be nonnegative");
  refit();
}

void ConfidenceEllipsoid::absorb(const Eigen::VectorXd& x, double target) {
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram_.triangularView<Eigen::StrictlyUpper>() =
      gram_.transpose().triangularView<Eigen::StrictlyUpper>();
  moment_ += target * x;
  ++count_;
  fitted_ = false;
}

void ConfidenceEllipsoid::refit() {
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success) {
    throw SingularGram("Gram matrix is not positive definite");
  }
  center_ = llt_.solve(moment_);
  fitted_ = true;
}

void ConfidenceEllipsoid::set_beta(double beta) {
  require(beta >= 0.0, "confidence radius must be nonnegative");
  beta_ = beta;
}

void ConfidenceEllipsoid::require_fitted() const {
  if (!fitted_) throw Error("ellipsoid queried before refit()");
}

const Eigen::VectorXd& ConfidenceEllipsoid::center() const {
  require_fitted();
  return center_;
}

double ConfidenceEllipsoid::quad_inverse(const Eigen::VectorXd& x) const {
  require_fitted();
  return llt_.matrixL().solve(x).squaredNorm();
}

double ConfidenceEllipsoid::raw_width(const Eigen::VectorXd& x) const {
  return 2.0 * std::sqrt(beta_) * std::sqrt(quad_inverse(x));
}

double ConfidenceEllipsoid::width(const Eigen::VectorXd& x) const {
  return std::min(1.0, raw_width(x));
}

Eigen::MatrixXd ConfidenceEllipsoid::inverse_gram() const {
  require_fitted();
  return llt_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

Eigen::MatrixXd ConfidenceEllipsoid::whiten(const Eigen::MatrixXd& m) const {
  require_fitted();
  return llt_.matrixL().solve(m);
}

nlohmann::json ConfidenceEllipsoid::to_json(bool include_gram) const {
  nlohmann::json j;
  const auto& c = center();
  j["center"] = std::vector<double>(c.data(), c.data() + c.size());
  j["beta"] = beta_;
  j["count"] = count_;
  if (include_gram) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < gram_.rows(); ++i) {
      Eigen::VectorXd r = gram_.row(i).transpose();
      rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    j["gram"] = rows;
  }
  return j;
}

ConfidenceEllipsoid fit_least_squares(const RegressionLog& log, double lambda,
                                      double beta) {
  ConfidenceEllipsoid ell(log.dim(), lambda, beta);
  for (const auto& row : log.rows()) {
    ell.absorb(row.x, row.y - log.target_offset());
  }
  ell.refit();
  return ell;
}

double ellipsoid_width(const ConfidenceEllipsoid& ell,
                       const Eigen::VectorXd& x) {
  return ell.width(x);
}

// ---------------------------------------------------------------------------
// Target-value selection

TargetSelection select_target_value(const ConfidenceEllipsoid& ell,
                                    const MixtureFeatures& features, int s,
                                    int a, const TargetOptions& options) {
  const int S = features.num_states();
  // q(V) = V^T M V with M = Psi^T A^{-1} Psi.
  const Eigen::MatrixXd w = ell.whiten(features.block(s, a));
  const Eigen::MatrixXd m = w.transpose() * w;

  Eigen::VectorXd best_v = Eigen::VectorXd::Zero(S);
  double best_q = 0.0;
  bool exact = true;

  if (S <= options.max_exact_states) {
    // Gray-code walk over {0,1}^S keeping r = M V up to date.
    Eigen::VectorXd r = Eigen::VectorXd::Zero(S);
    std::uint32_t mask = 0;
    std::uint32_t best_mask = 0;
    double q = 0.0;
    const std::uint32_t total = 1u << S;
    for (std::uint32_t i = 1; i < total; ++i) {
      const int j = std::countr_zero(i);
      if ((mask >> j) & 1u) {
        q -= 2.0 * r(j) - m(j, j);
        r -= m.col(j);
      } else {
        q += 2.0 * r(j) + m(j, j);
        r += m.col(j);
      }
      mask ^= 1u << j;
      if (q > best_q || (q == best_q && mask < best_mask)) {
        best_q = q;
        best_mask = mask;
      }
    }
    for (int n = 0; n < S; ++n) best_v(n) = (best_mask >> n) & 1u;
    // Recompute at the winner to shed accumulated drift.
    best_q = best_v.dot(m * best_v);
  } else {
    if (!options.allow_heuristic) {
      throw VertexEnumerationCapExceeded(
          "exact V_max search needs S <= " +
          std::to_string(options.max_exact_states));
    }
    exact = false;
    Rng rng(0x7a11e7u + static_cast<std::uint64_t>(s) * 7919u + a);
    for (int restart = 0; restart < options.restarts; ++restart) {
      Eigen::VectorXd v(S);
      if (restart == 0) {
        v.setOnes();
      } else {
        for (int n = 0; n < S; ++n) v(n) = bernoulli(0.5, rng) ? 1.0 : 0.0;
      }
      Eigen::VectorXd r = m * v;
      double q = v.dot(r);
      while (true) {
        int flip = -1;
        double gain = 1e-15;
        for (int j = 0; j < S; ++j) {
          const double g = v(j) > 0.5 ? -(2.0 * r(j) - m(j, j))
                                      : 2.0 * r(j) + m(j, j);
          if (g > gain) {
            gain = g;
            flip = j;
          }
        }
        if (flip < 0) break;
        if (v(flip) > 0.5) {
          v(flip) = 0.0;
          r -= m.col(flip);
        } else {
          v(flip) = 1.0;
          r += m.col(flip);
        }
        q += gain;
      }
      if (q > best_q) {
        best_q = q;
        best_v = v;
      }
    }
  }

  TargetSelection out;
  out.value = best_v;
  out.raw_bonus = 2.0 * std::sqrt(ell.beta()) * std::sqrt(std::max(0.0, best_q));
  out.bonus = std::min(1.0, out.raw_bonus);
  out.exact = exact;
  return out;
}

// ---------------------------------------------------------------------------
// Beta schedule

double CoveringModel::log_covering(double eps) const {
  if (kind == Kind::kExplicit) return std::log(explicit_value);
  return dim * std::log1p(2.0 * feature_bound * param_bound / eps);
}

void BetaSchedule::validate() const {
  require(episodes >= 1, "beta schedule needs K >= 1");
  require(delta > 0.0 && delta < 1.0, "beta schedule needs delta in (0, 1)");
  require(c_beta > 0.0, "beta scale c_beta must be positive");
  require(n >= 2, "beta schedule needs n >= 2");
  if (covering.kind == CoveringModel::Kind::kExplicit) {
    require(covering.explicit_value > 0.0, "covering number must be positive");
  } else {
    require(covering.dim >= 1 && covering.feature_bound > 0.0 &&
                covering.param_bound >= 0.0,
            "analytic covering needs d >= 1, L > 0, S >= 0");
  }
  beta_value(*this, Stream::kPreference);
  beta_value(*this, Stream::kTransition);
}

double beta_value(const BetaSchedule& schedule, Stream stream) {
  require(schedule.episodes >= 1, "beta schedule needs K >= 1");
  require(schedule.delta > 0.0 && schedule.delta < 1.0,
          "beta schedule needs delta in (0, 1)");
  require(schedule.c_beta > 0.0, "beta scale c_beta must be positive");
  const double K = schedule.episodes;
  const double n = schedule.n;
  double eps = 1.0 / K;
  if (schedule.nwise) {
    eps = stream == Stream::kPreference ? 1.0 / (K * n * n) : 1.0 / (K * n);
  }
  const double log_arg = std::log(2.0 * K / schedule.delta) +
                         schedule.covering.log_covering(eps);
  const double beta = schedule.c_beta * 8.0 * log_arg;
  if (!(beta > 0.0)) {
    throw InvalidArgument("beta schedule is degenerate (beta <= 0)");
  }
  return beta;
}

// ---------------------------------------------------------------------------
// Coverage checks

double confidence_statistic(const ConfidenceEllipsoid& ell,
                            const RegressionLog& log,
                            const Eigen::VectorXd& theta_true) {
  const Eigen::VectorXd diff = ell.center() - theta_true;
  double total = 0.0;
  for (const auto& row : log.rows()) {
    const double e = row.x.dot(diff);
    total += e * e;
  }
  return total;
}

double confidence_statistic(const ConfidenceEllipsoid& ell,
                            const RegressionLog& log,
                            std::span<const double> true_values) {
  require(true_values.size() == log.size(),
          "need one true value per logged row");
  double total = 0.0;
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& row = log.rows()[t];
    const double e =
        log.target_offset() + ell.predict(row.x) - true_values[t];
    total += e * e;
  }
  return total;
}

bool model_in_confidence_set(const ConfidenceEllipsoid& ell,
                             const RegressionLog& log,
                             const Eigen::VectorXd& theta_true) {
  return confidence_statistic(ell, log, theta_true) <= ell.beta();
}

bool model_in_confidence_set(const ConfidenceEllipsoid& ell,
                             const RegressionLog& log,
                             std::span<const double> true_values) {
  return confidence_statistic(ell, log, true_values) <= ell.beta();
}

CoverageTracker::CoverageTracker(int dim, double offset)
    : offset_(offset),
      second_moment_(Eigen::MatrixXd::Zero(dim, dim)),
      cross_(Eigen::VectorXd::Zero(dim)) {}

void CoverageTracker::add(const Eigen::VectorXd& x, double true_value) {
  const double gap = offset_ - true_value;
  second_moment_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  cross_ += gap * x;
  constant_ += gap * gap;
}

double CoverageTracker::statistic(const Eigen::VectorXd& center) const {
  const Eigen::VectorXd mc =
      second_moment_.selfadjointView<Eigen::Lower>() * center;
  return std::max(0.0, center.dot(mc) + 2.0 * center.dot(cross_) + constant_);
}

}  // namespace pbrl
