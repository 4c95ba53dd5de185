// Copyright 2026 The April Summarisation Authors.
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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "april/corpus.hpp"
#include "april/evalmetrics.hpp"
#include "april/heuristic.hpp"
#include "april/oracle.hpp"

namespace april {

/// Bradley-Terry learner state. Fitting is full-batch gradient descent.
struct RankerState {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(kFeatureDim);
  double alpha = 0.3;       // weight of the learnt term in the blend
  double learn_rate = 0.1;
  int epochs = 500;
  bool warm_start = false;  // false: every fit restarts from w = 0

  /// Versioned plain-text form; from_text(to_text()) is exact.
  std::string to_text() const;
  static RankerState from_text(const std::string& text);
};

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// 1 / (1 + e^-x).
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// P_w(a > b) = (1 + exp[w'(phi_b - phi_a)])^-1.
template <typename DerivedW, typename DerivedA, typename DerivedB>
double bt_probability(const Eigen::MatrixBase<DerivedW>& w,
                      const Eigen::MatrixBase<DerivedA>& phi_a,
                      const Eigen::MatrixBase<DerivedB>& phi_b) {
  return logistic(w.dot(phi_a - phi_b));
}

/// One row per preference: phi(winner) - phi(loser).
Eigen::MatrixXd preference_differences(std::span<const PreferenceRecord> prefs,
                                       const Eigen::MatrixXd& features);

/// Cross-entropy over preference difference rows d: sum softplus(-w'd).
template <typename DerivedW, typename DerivedD>
double bt_loss(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedD>& diffs) {
  const Eigen::VectorXd margins = diffs * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) loss += softplus(-margins(i));
  return loss;
}

/// Gradient of bt_loss: -sum sigma(-w'd) d.
template <typename DerivedW, typename DerivedD>
Eigen::VectorXd bt_gradient(const Eigen::MatrixBase<DerivedW>& w,
                            const Eigen::MatrixBase<DerivedD>& diffs) {
  const Eigen::VectorXd margins = diffs * w;
  const Eigen::VectorXd weights = margins.unaryExpr([](double m) { return -logistic(-m); });
  return diffs.transpose() * weights;
}

double bt_loss(const Eigen::VectorXd& w, std::span<const PreferenceRecord> prefs,
               const Eigen::MatrixXd& features);

/// Gradient descent on the cumulative preference set. Each epoch must not
/// increase the loss; otherwise the step is halved and retried (at most 20
/// times, after which fitting stops). Throws NumericalError on a non-finite
/// loss.
RankerState bt_fit(const RankerState& state, std::span<const PreferenceRecord> prefs,
                   const Eigen::MatrixXd& features);

/// Blend weight by query budget: 0.3 up to 10 queries, 0.7 from 100, linear
/// in log T between.
double alpha_schedule(int budget);

/// Min-max normalisation onto [0, 1] by the given range; a degenerate range
/// maps everything to 0.
inline double minmax(double x, double lo, double hi) {
  return hi > lo ? (x - lo) / (hi - lo) : 0.0;
}

/// Fitted prior/posterior ranker over a fixed pool. Both the learnt score
/// w'phi and HU are min-max normalised by their pool ranges; out-of-pool
/// summaries use the same ranges and may fall outside [0, 1].
class BlendedRanker {
 public:
  BlendedRanker(const DocumentCluster& cluster, Eigen::VectorXd w, double alpha,
                Eigen::MatrixXd pool_features, Eigen::VectorXd pool_hu,
                HeuristicParams hu_params = {});

  /// Blend for a summary given its features and raw HU.
  double blended(const FeatureVector& phi, double hu) const;

  /// Blend of pool member i; InputError when out of range.
  double blended_score(int pool_index) const;

  const Eigen::VectorXd& pool_scores() const { return pool_scores_; }
  Ranking ranking() const { return Ranking{pool_scores_}; }

  /// Share of pool members with strictly lower blend.
  double rank_reward(const FeatureVector& phi, double hu) const;
  double rank_reward(const Summary& summary) const;

  double alpha() const { return alpha_; }
  int pool_size() const { return static_cast<int>(pool_scores_.size()); }

 private:
  const DocumentCluster* cluster_;
  Eigen::VectorXd w_;
  double alpha_;
  HeuristicParams hu_params_;
  double bt_lo_ = 0.0, bt_hi_ = 0.0;
  double hu_lo_ = 0.0, hu_hi_ = 0.0;
  Eigen::VectorXd pool_scores_;
  std::vector<double> sorted_scores_;
};

/// Raw HU for every pool member.
Eigen::VectorXd pool_hu(const DocumentCluster& cluster, std::span<const Summary> pool,
                        const HeuristicParams& params = {});

}  // namespace april
