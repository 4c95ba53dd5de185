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

#include <span>

#include "april/corpus.hpp"
#include "april/evalmetrics.hpp"

namespace april {

struct HeuristicParams {
  double redundancy_penalty = 1.0;   // >= 0
  double overlength_penalty = -10.0;
};

/// Reference-free summary quality: document-frequency coverage of distinct
/// vocab bigrams minus a penalty on repeated ones, both scaled by the number
/// of documents. Over-budget summaries score `overlength_penalty`.
double hu_score(const DocumentCluster& cluster, const Summary& summary,
                const HeuristicParams& params = {});

/// hu_score from precomputed raw bigram counts.
double hu_score_counts(const DocumentCluster& cluster, const Eigen::VectorXd& counts,
                       int token_count, const HeuristicParams& params = {});

Ranking hu_rank(const DocumentCluster& cluster, std::span<const Summary> pool,
                const HeuristicParams& params = {});

}  // namespace april
