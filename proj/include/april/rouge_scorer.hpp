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

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "april/evalmetrics.hpp"

namespace april {

// References preprocessed once and scored against many candidates. The
// free rouge() functions build one of these per call.
class RougeScorer {
 public:
  explicit RougeScorer(std::span<const Tokens> references, RougeConfig config = {});

  RougeScores score_all(std::span<const std::string> candidate) const;
  double score(std::span<const std::string> candidate, RougeVariant variant) const;

  const RougeConfig& config() const { return config_; }

 private:
  struct Reference {
    std::vector<int> ids;
    std::vector<std::pair<std::uint64_t, int>> unigrams;
    std::vector<std::pair<std::uint64_t, int>> bigrams;
    std::vector<std::pair<std::uint64_t, int>> skip;  // skip-bigrams + unigrams
  };
  struct Totals {
    long unigrams = 0;
    long bigrams = 0;
    long skip = 0;
  };

  std::string normalise(const std::string& raw) const;
  // Token ids in reference vocabulary; -1 for tokens no reference contains.
  std::vector<int> encode(std::span<const std::string> candidate) const;

  RougeConfig config_;
  std::unordered_map<std::string, int> vocab_;
  std::vector<Reference> refs_;
  Totals totals_;
};

}  // namespace april
