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

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "april/corpus.hpp"
#include "april/heuristic.hpp"

namespace april {

class BlendedRanker;
class UStar;

// Episodic summarisation environment: a state is a draft summary, an action
// inserts an unused sentence that still fits the budget or terminates.
// Only termination is rewarded.

struct MdpState {
  Summary draft;
  bool terminated = false;
};

struct Action {
  enum class Kind { kInsert, kTerminate };
  Kind kind = Kind::kTerminate;
  int sentence_id = -1;

  static Action insert(int id) { return Action{Kind::kInsert, id}; }
  static Action terminate() { return Action{Kind::kTerminate, -1}; }
  bool operator==(const Action&) const = default;
};

/// Terminal reward of a finished summary.
struct RewardFn {
  std::string source;  // "ranker", "ustar" or "hu"
  std::function<double(const Summary&)> fn;

  double operator()(const Summary& s) const { return fn(s); }
};

RewardFn ranker_reward(std::shared_ptr<const BlendedRanker> ranker);
RewardFn ustar_reward(std::shared_ptr<const UStar> ustar);
RewardFn hu_reward(const DocumentCluster& cluster, HeuristicParams params = {});

/// Inserts in ascending sentence id, then Terminate. InputError if terminated.
std::vector<Action> legal_actions(const DocumentCluster& cluster, const MdpState& state);

/// Applies a legal action; returns the successor and its reward (0 for
/// inserts). InputError on illegal actions.
std::pair<MdpState, double> step(const DocumentCluster& cluster, const MdpState& state,
                                 const Action& action, const RewardFn& reward);

/// Every within-budget sentence subset with at most `max_sentences` members,
/// ids ascending, including the empty summary. Throws TooLarge past
/// `limit` summaries.
std::vector<Summary> enumerate_summaries(const DocumentCluster& cluster, int max_sentences,
                                         std::size_t limit = 1'000'000);

}  // namespace april
