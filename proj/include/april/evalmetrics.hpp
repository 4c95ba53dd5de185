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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace april {

using Tokens = std::vector<std::string>;

enum class RougeVariant { kN1, kN2, kL, kSU4 };

struct RougeConfig {
  bool stem = true;
  bool remove_stopwords = false;
  /// Candidate is cut to this many tokens before scoring; <= 0 disables.
  int truncate_to = 100;
  /// Maximum number of tokens allowed between the two words of a
  /// skip-bigram.
  int skip_gap = 4;
};

/// Recall scores, each in [0, 1].
struct RougeScores {
  double r1 = 0.0;
  double r2 = 0.0;
  double rL = 0.0;
  double rSU4 = 0.0;
};

/// Porter stemmer. Words containing anything but a-z come back unchanged.
std::string porter_stem(std::string_view word);

/// Recall-oriented ROUGE. Multiple references are micro-averaged: clipped
/// overlap counts and reference unit counts are summed over references
/// before dividing. An empty candidate scores 0; throws InputError when no
/// reference has any token.
double rouge(std::span<const std::string> candidate,
             std::span<const Tokens> references, RougeVariant variant,
             const RougeConfig& config = {});

/// All four variants with shared preprocessing.
RougeScores rouge_all(std::span<const std::string> candidate,
                      std::span<const Tokens> references,
                      const RougeConfig& config = {});

/// Item scores indexed by item id; higher is better, equal scores are
/// ordered by ascending id, so every Ranking is a strict total order.
struct Ranking {
  Eigen::VectorXd scores;

  /// True when item a is placed before item b.
  bool prefers(Eigen::Index a, Eigen::Index b) const {
    return scores(a) > scores(b) || (scores(a) == scores(b) && a < b);
  }

  /// Item ids of `items` from best to worst.
  std::vector<int> order(std::span<const int> items) const;
};

double kendall_tau(const Ranking& a, const Ranking& b, std::span<const int> items);
double spearman_rho(const Ranking& a, const Ranking& b, std::span<const int> items);

/// Convenience: all ids 0..n-1 where n is the common score length.
double kendall_tau(const Ranking& a, const Ranking& b);
double spearman_rho(const Ranking& a, const Ranking& b);

}  // namespace april
