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

#include "april/heuristic.hpp"

#include <algorithm>

#include "april/errors.hpp"

namespace april {

double hu_score_counts(const DocumentCluster& cluster, const Eigen::VectorXd& counts,
                       int token_count, const HeuristicParams& params) {
  if (params.redundancy_penalty < 0.0) throw InputError("redundancy penalty must be >= 0");
  if (token_count > cluster.length_budget) return params.overlength_penalty;
  const double docs = static_cast<double>(cluster.num_documents());
  double coverage = 0.0;
  double redundancy = 0.0;
  for (int k = 0; k < kFeatureDim; ++k) {
    const double n = counts(k);
    if (n <= 0.0) continue;
    coverage += cluster.vocab_df[static_cast<std::size_t>(k)] / docs;
    redundancy += std::max(0.0, n - 1.0) / docs;
  }
  return coverage - params.redundancy_penalty * redundancy;
}

double hu_score(const DocumentCluster& cluster, const Summary& summary,
                const HeuristicParams& params) {
  return hu_score_counts(cluster, bigram_counts(cluster, summary), summary.token_count,
                         params);
}

Ranking hu_rank(const DocumentCluster& cluster, std::span<const Summary> pool,
                const HeuristicParams& params) {
  Ranking r;
  r.scores.resize(static_cast<Eigen::Index>(pool.size()));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    r.scores(static_cast<Eigen::Index>(i)) = hu_score(cluster, pool[i], params);
  }
  return r;
}

}  // namespace april
