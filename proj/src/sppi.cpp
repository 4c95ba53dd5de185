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

#include "april/sppi.hpp"

#include "april/errors.hpp"

namespace april {
namespace {

constexpr std::uint64_t kSppiStream = 0x5001;
constexpr std::uint64_t kPretrainSeedSalt = 0x48550000;

}  // namespace

Eigen::VectorXd sppi_gradient_estimate(const Eigen::MatrixXd& features,
                                       const GibbsPairSampler& sampler, const IndexPair& pair,
                                       double delta, int baseline_samples, Rng& rng) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(features.cols());
  if (delta == 0.0) return grad;
  if (baseline_samples < 1) throw InputError("baseline needs at least one sample");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(features.cols());
  for (int b = 0; b < baseline_samples; ++b) {
    const auto draw = sampler.sample(rng);
    if (!draw) throw NumericalError("pair sampler kept drawing identical items");
    mean += (features.row(draw->first) - features.row(draw->second)).transpose();
  }
  mean /= static_cast<double>(baseline_samples);
  grad = delta * ((features.row(pair.first) - features.row(pair.second)).transpose() - mean);
  return grad;
}

SppiState sppi_round(const SppiState& state, const Eigen::MatrixXd& features, Oracle& oracle,
                     std::uint64_t seed, std::vector<PreferenceRecord>* log) {
  if (features.rows() < 2) throw InputError("SPPI needs a pool of at least 2 summaries");
  if (state.w.size() != features.cols()) throw InputError("weight dimension mismatch");
  Rng rng = make_rng(seed, kSppiStream + static_cast<std::uint64_t>(state.t) * 8);
  const Eigen::VectorXd scores = features * state.w;
  const GibbsPairSampler sampler(scores);
  const auto pair = sampler.sample(rng);
  if (!pair) throw NumericalError("pair sampler kept drawing identical items");
  const PreferenceRecord pref = oracle.respond(state.t, pair->first, pair->second);
  if (log != nullptr) log->push_back(pref);
  const double delta = pref.preferred == Side::kRight ? 1.0 : 0.0;

  SppiState next = state;
  if (delta != 0.0) {
    next.w -= state.gamma() *
              sppi_gradient_estimate(features, sampler, *pair, delta, state.baseline_samples, rng);
  }
  next.t = state.t + 1;
  if (!next.w.allFinite()) {
    throw NumericalError("SPPI weights stopped being finite in round " + std::to_string(state.t));
  }
  return next;
}

int sppi_argmax(const Eigen::MatrixXd& features, const Eigen::VectorXd& w) {
  if (features.rows() == 0) throw InputError("empty pool");
  const Eigen::VectorXd scores = features * w;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return static_cast<int>(best);
}

SppiResult sppi_run(const Eigen::MatrixXd& features, Oracle& oracle, int rounds,
                    std::uint64_t seed, SppiState start) {
  if (rounds < 0) throw InputError("round count must be non-negative");
  SppiResult result;
  result.state = std::move(start);
  for (int r = 0; r < rounds; ++r) {
    result.state = sppi_round(result.state, features, oracle, seed, &result.log);
  }
  result.best_index = sppi_argmax(features, result.state.w);
  return result;
}

SppiState sppi_pretrain_hu(const Eigen::MatrixXd& features, const Eigen::VectorXd& pool_hu,
                           std::uint64_t seed, int rounds) {
  if (pool_hu.size() != features.rows()) throw InputError("pool features and HU disagree");
  Oracle oracle(OracleSpec::perfect(seed),
                [&pool_hu](int i) { return pool_hu(i); });
  SppiState state;
  state.w = Eigen::VectorXd::Zero(features.cols());
  const std::uint64_t pretrain_seed = mix_seed(seed, kPretrainSeedSalt);
  for (int r = 0; r < rounds; ++r) state = sppi_round(state, features, oracle, pretrain_seed);
  return state;
}

}  // namespace april
