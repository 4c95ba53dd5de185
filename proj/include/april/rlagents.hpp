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

#include <cstdint>
#include <string>
#include <vector>

#include "april/corpus.hpp"
#include "april/random.hpp"
#include "april/summdp.hpp"

namespace april {

/// State features: the draft's bigram features, a bias and the length ratio
/// token_count / length_budget.
inline constexpr int kStateDim = kFeatureDim + 2;

/// Linear state value V(s) = theta' psi(s).
struct ValueFn {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(kStateDim);

  double operator()(const Eigen::VectorXd& psi) const { return theta.dot(psi); }

  /// Versioned plain-text form; from_text(to_text()) is exact.
  std::string to_text() const;
  static ValueFn from_text(const std::string& text);
};

enum class RlAlgorithm { kTd, kLstd };

std::string to_string(RlAlgorithm a);
/// Accepts "td" and "lstd" (any case).
RlAlgorithm parse_rl(const std::string& name);

struct TrainConfig {
  int episodes = 5000;
  double lambda = 1.0;
  double step_size = 0.001;    // TD only: step / (1 + step_decay * episode)
  double step_decay = 0.001;
  double temperature_start = 5.0;
  double temperature_end = 0.1;
  int lstd_solve_every = 100;  // LSTD only: episodes between solves
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range values.
  void validate() const;
  /// Linear interpolation from temperature_start to temperature_end.
  double temperature(int episode) const;
  double step(int episode) const;
};

struct TrainResult {
  ValueFn value;
  Summary summary;                     // greedy rollout under the final value
  std::vector<double> episode_rewards; // terminal reward of each episode
  std::vector<std::string> warnings;
};

/// psi(s) for a draft.
Eigen::VectorXd state_features(const DocumentCluster& cluster, const Summary& draft);

/// Rollout choosing, at each state, the legal action with the highest
/// lookahead value (first in legal_actions order on ties). Insert looks at
/// V(draft + sentence); Terminate looks at V(draft).
Summary greedy_rollout(const DocumentCluster& cluster, const ValueFn& value);

/// Rollout sampling actions from the softmax of lookahead values / temperature.
Summary softmax_rollout(const DocumentCluster& cluster, const ValueFn& value,
                        double temperature, Rng& rng);

/// TD(lambda) with accumulating traces, undiscounted, V(terminal) = 0.
/// Throws NumericalError naming the episode when theta stops being finite.
TrainResult td_train(const DocumentCluster& cluster, const RewardFn& reward,
                     const TrainConfig& cfg);

/// Random diagonal start of the LSTD matrix: entries uniform in [0, 1).
Eigen::MatrixXd lstd_initial_matrix(int dim, Rng& rng);

/// LSTD(lambda): accumulates A += e (psi - psi')' and b += e r, solving
/// A theta = b every cfg.lstd_solve_every episodes and at the end.
/// Throws NumericalError when the system stays singular after a 1e-9 ridge.
TrainResult lstd_train(const DocumentCluster& cluster, const RewardFn& reward,
                       const TrainConfig& cfg);

TrainResult rl_train(RlAlgorithm algorithm, const DocumentCluster& cluster,
                     const RewardFn& reward, const TrainConfig& cfg);

}  // namespace april
