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

#ifndef PBRL_ESTIMATOR_HPP_
#define PBRL_ESTIMATOR_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pbrl/mdp.hpp"

namespace pbrl {

enum class Stream { kPreference, kTransition, kFeedback };

std::string_view stream_name(Stream stream);

struct RegressionRow {
  Eigen::VectorXd x;
  double y = 0.0;
  int episode = 0;
};

// Append-only (feature, target) history for one regression stream. Targets
// are observations in [0, 1]; `target_offset` is subtracted before fitting
// (1/2 for the preference stream, whose model carries a fixed intercept).
class RegressionLog {
 public:
  RegressionLog() = default;
  RegressionLog(Stream stream, int dim, double target_offset = 0.0);

  void append(Eigen::VectorXd x, double y, int episode);

  Stream stream() const { return stream_; }
  int dim() const { return dim_; }
  double target_offset() const { return target_offset_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<RegressionRow>& rows() const { return rows_; }

 private:
  Stream stream_ = Stream::kPreference;
  int dim_ = 0;
  double target_offset_ = 0.0;
  std::vector<RegressionRow> rows_;
};

// Ridge least-squares center, Gram matrix A = lambda I + sum x x^T, and
// radius beta. The parameter-space set {theta : ||theta - center||_A^2 <=
// beta} stands in for the sum-of-squares ball around the fitted function.
class ConfidenceEllipsoid {
 public:
  ConfidenceEllipsoid() = default;
  ConfidenceEllipsoid(int dim, double lambda, double beta);

  // Rank-one update; call refit() before querying.
  void absorb(const Eigen::VectorXd& x, double target);
  void refit();
  void set_beta(double beta);

  int dim() const { return static_cast<int>(gram_.rows()); }
  double lambda() const { return lambda_; }
  double beta() const { return beta_; }
  std::size_t count() const { return count_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& moment() const { return moment_; }
  const Eigen::VectorXd& center() const;

  double predict(const Eigen::VectorXd& x) const { return x.dot(center()); }
  // x^T A^{-1} x
  double quad_inverse(const Eigen::VectorXd& x) const;
  double raw_width(const Eigen::VectorXd& x) const;
  // Width clipped to [0, 1].
  double width(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd inverse_gram() const;
  // Whitened copy L^{-1} M of the columns of M, where A = L L^T.
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& m) const;

  nlohmann::json to_json(bool include_gram) const;

 private:
  void require_fitted() const;

  double lambda_ = 1.0;
  double beta_ = 1.0;
  std::size_t count_ = 0;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd moment_;
  Eigen::VectorXd center_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool fitted_ = false;
};

// Batch ridge fit of a whole log: center = A^{-1} b with b = sum x (y - offset).
ConfidenceEllipsoid fit_least_squares(const RegressionLog& log, double lambda,
                                      double beta = 1.0);

// Clipped width min(1, 2 sqrt(beta) ||x||_{A^{-1}}).
double ellipsoid_width(const ConfidenceEllipsoid& ell, const Eigen::VectorXd& x);

struct TargetSelection {
  Eigen::VectorXd value;  // maximizing vertex V in {0,1}^S
  double bonus = 0.0;     // clipped to [0, 1]
  double raw_bonus = 0.0;
  bool exact = true;
};

struct TargetOptions {
  int max_exact_states = 12;
  bool allow_heuristic = true;
  int restarts = 8;
};

// V_max(s, a) = argmax_{V in [0,1]^S} 2 sqrt(beta) ||sum_{s'} psi(s,a,s') V(s')||_{A^{-1}}.
// The objective is convex in V, so the maximum sits at a vertex; vertices are
// enumerated for S <= 12, otherwise greedy coordinate ascent is used.
TargetSelection select_target_value(const ConfidenceEllipsoid& ell,
                                    const MixtureFeatures& features, int s,
                                    int a, const TargetOptions& options = {});

struct CoveringModel {
  enum class Kind { kAnalyticLinear, kExplicit };
  Kind kind = Kind::kAnalyticLinear;
  int dim = 1;
  double feature_bound = 1.0;  // L
  double param_bound = 1.0;    // S_theta or B
  double explicit_value = 1.0; // N when kind == kExplicit

  // log N(eps) = d log(1 + 2 L S / eps) for the analytic parameter-box cover.
  double log_covering(double eps) const;
};

struct BetaSchedule {
  int episodes = 1;  // K
  double delta = 0.05;
  CoveringModel covering;
  double c_beta = 0.1;
  int n = 2;
  // n-wise resolutions 1/(K n^2) (preference) and 1/(K n) (transition);
  // otherwise 1/K.
  bool nwise = false;

  void validate() const;
};

// beta = c_beta * 8 log(2 K N(eps) / delta).
double beta_value(const BetaSchedule& schedule, Stream stream);

// Sum over logged rows of (predicted - true)^2, where predicted = offset +
// x^T center. The true function is given either by a parameter or by its
// values on the logged rows.
double confidence_statistic(const ConfidenceEllipsoid& ell,
                            const RegressionLog& log,
                            const Eigen::VectorXd& theta_true);
double confidence_statistic(const ConfidenceEllipsoid& ell,
                            const RegressionLog& log,
                            std::span<const double> true_values);
bool model_in_confidence_set(const ConfidenceEllipsoid& ell,
                             const RegressionLog& log,
                             const Eigen::VectorXd& theta_true);
bool model_in_confidence_set(const ConfidenceEllipsoid& ell,
                             const RegressionLog& log,
                             std::span<const double> true_values);

// Running form of confidence_statistic for agents: keeps sum x x^T,
// sum x (offset - m) and sum (offset - m)^2 so the statistic at any center is
// a quadratic form.
class CoverageTracker {
 public:
  CoverageTracker() = default;
  CoverageTracker(int dim, double offset);

  void add(const Eigen::VectorXd& x, double true_value);
  double statistic(const Eigen::VectorXd& center) const;

 private:
  double offset_ = 0.0;
  Eigen::MatrixXd second_moment_;
  Eigen::VectorXd cross_;
  double constant_ = 0.0;
};

}  // namespace pbrl

#endif  // PBRL_ESTIMATOR_HPP_
