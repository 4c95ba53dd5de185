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
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "april/oracle.hpp"
#include "april/random.hpp"

namespace april {

enum class Strategy { kRandom, kSbt, kUnc, kJn };

std::string to_string(Strategy s);
/// Accepts "rnd", "sbt", "unc", "jn" (any case).
Strategy parse_strategy(const std::string& name);

using IndexPair = std::pair<int, int>;

/// Unordered pairs of pool indices.
class PairSet {
 public:
  void insert(int i, int j) { keys_.insert(key(i, j)); }
  bool contains(int i, int j) const { return keys_.count(key(i, j)) > 0; }
  std::size_t size() const { return keys_.size(); }

 private:
  static std::uint64_t key(int i, int j) {
    const auto lo = static_cast<std::uint32_t>(std::min(i, j));
    const auto hi = static_cast<std::uint32_t>(std::max(i, j));
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
  }
  std::unordered_set<std::uint64_t> keys_;
};

struct QueryContext {
  const Eigen::MatrixXd* features = nullptr;  // pool rows
  PairSet asked;
  std::vector<PreferenceRecord> answered;
  Eigen::VectorXd w;        // current Bradley-Terry weights
  std::uint64_t seed = 0;
  int round = 0;            // selects the random stream for this query
  std::vector<std::string>* warnings = nullptr;

  int jn_samples = 100;         // Monte Carlo points kept per round
  int jn_min_samples = 10;      // fewer survivors: fall back to random
  int jn_max_draws = 5000;      // rejection-sampling attempts per round
  int jn_max_candidates = 5000; // unasked pairs scored per round

  int pool_size() const { return static_cast<int>(features->rows()); }
  /// Records a finished query.
  void record(const PreferenceRecord& pref);
};

/// Ordered-pair sampler with P(i, j) proportional to exp(s_i - s_j), i != j,
/// for utility scores s. Draws i by exp(s) and j by exp(-s) independently
/// and rejects i == j, which leaves exactly that distribution.
class GibbsPairSampler {
 public:
  explicit GibbsPairSampler(const Eigen::VectorXd& scores);

  /// Nullopt if `max_attempts` draws all had i == j.
  std::optional<IndexPair> sample(Rng& rng, int max_attempts = 1000) const;

 private:
  std::vector<double> first_cdf_;
  std::vector<double> second_cdf_;
};

IndexPair select_rnd(QueryContext& ctx);
IndexPair select_sbt(QueryContext& ctx);
IndexPair select_unc(QueryContext& ctx);
IndexPair select_jn(QueryContext& ctx);
IndexPair select_pair(Strategy strategy, QueryContext& ctx);

/// Uncertainty min(p, 1 - p) of p = sigma(score).
double uncertainty(double score);

/// J&N vote counts for candidate pairs: for each pair (i, j) the number of
/// Monte Carlo reference points from which i is farther than j, i.e. that
/// predict i preferred. Second member is the number of surviving points.
std::pair<std::vector<int>, int> jn_votes(const QueryContext& ctx,
                                          const std::vector<IndexPair>& pairs);

}  // namespace april
