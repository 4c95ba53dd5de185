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
#include <functional>
#include <vector>

#include "april/corpus.hpp"
#include "april/oracle.hpp"
#include "april/querystrat.hpp"
#include "april/random.hpp"

namespace april {

// Structured prediction from pairwise feedback: pairs are drawn with
// P(i, j) proportional to exp(w'(phi_i - phi_j)) and w follows a
// score-function estimate of the gradient of the expected loss
// E[Delta(i, j)], where Delta = 1 when the user prefers the second item.

struct SppiState {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(kFeatureDim);
  int t = 0;                  // rounds completed
  double gamma_offset = 10.0; // gamma_t = 1 / (gamma_offset + t)
  int baseline_samples = 32;  // B

  double gamma() const { return 1.0 / (gamma_offset + static_cast<double>(t)); }
};

/// ghat = delta * (psi_ij - mean of psi over B fresh pair samples), with
/// psi_ij = phi_i - phi_j. Returns zero without sampling when delta is 0.
Eigen::VectorXd sppi_gradient_estimate(const Eigen::MatrixXd& features,
                                       const GibbsPairSampler& sampler, const IndexPair& pair,
                                       double delta, int baseline_samples, Rng& rng);

/// One round: sample a pair, ask the oracle, step w along -gamma_t * ghat.
/// Randomness comes from (seed, state.t). `log` receives the answered pair.
SppiState sppi_round(const SppiState& state, const Eigen::MatrixXd& features, Oracle& oracle,
                     std::uint64_t seed, std::vector<PreferenceRecord>* log = nullptr);

/// Pool index maximising w'phi; lowest index on ties.
int sppi_argmax(const Eigen::MatrixXd& features, const Eigen::VectorXd& w);

struct SppiResult {
  SppiState state;
  int best_index = 0;
  std::vector<PreferenceRecord> log;
};

/// Runs T rounds from `start`, then returns the pool argmax.
SppiResult sppi_run(const Eigen::MatrixXd& features, Oracle& oracle, int rounds,
                    std::uint64_t seed, SppiState start = {});

/// Pretraining against a deterministic oracle that prefers the higher
/// reference-free heuristic score, 5000 rounds by default.
SppiState sppi_pretrain_hu(const Eigen::MatrixXd& features, const Eigen::VectorXd& pool_hu,
                           std::uint64_t seed, int rounds = 5000);

}  // namespace april
