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

#include "april/summdp.hpp"

#include <algorithm>

#include "april/errors.hpp"
#include "april/oracle.hpp"
#include "april/ranker.hpp"

namespace april {

RewardFn ranker_reward(std::shared_ptr<const BlendedRanker> ranker) {
  return RewardFn{"ranker", [ranker = std::move(ranker)](const Summary& s) {
                    return ranker->rank_reward(s);
                  }};
}

RewardFn ustar_reward(std::shared_ptr<const UStar> ustar) {
  return RewardFn{"ustar", [ustar = std::move(ustar)](const Summary& s) { return (*ustar)(s); }};
}

RewardFn hu_reward(const DocumentCluster& cluster, HeuristicParams params) {
  return RewardFn{"hu", [&cluster, params](const Summary& s) {
                    return hu_score(cluster, s, params);
                  }};
}

std::vector<Action> legal_actions(const DocumentCluster& cluster, const MdpState& state) {
  if (state.terminated) throw InputError("no actions from a terminated state");
  std::vector<char> used(static_cast<std::size_t>(cluster.num_sentences()), 0);
  for (int id : state.draft.sentence_ids) used[static_cast<std::size_t>(id)] = 1;
  std::vector<Action> actions;
  for (int id = 0; id < cluster.num_sentences(); ++id) {
    if (!used[static_cast<std::size_t>(id)] &&
        state.draft.token_count + cluster.sentence_length(id) <= cluster.length_budget) {
      actions.push_back(Action::insert(id));
    }
  }
  actions.push_back(Action::terminate());
  return actions;
}

std::pair<MdpState, double> step(const DocumentCluster& cluster, const MdpState& state,
                                 const Action& action, const RewardFn& reward) {
  if (state.terminated) throw InputError("episode already terminated");
  if (action.kind == Action::Kind::kTerminate) {
    MdpState next = state;
    next.terminated = true;
    return {std::move(next), reward(state.draft)};
  }
  const int id = action.sentence_id;
  if (!cluster.has_sentence(id)) throw InputError("unknown sentence " + std::to_string(id));
  const auto& ids = state.draft.sentence_ids;
  if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
    throw InputError("sentence " + std::to_string(id) + " already in the draft");
  }
  if (state.draft.token_count + cluster.sentence_length(id) > cluster.length_budget) {
    throw InputError("sentence " + std::to_string(id) + " does not fit the budget");
  }
  MdpState next = state;
  next.draft.sentence_ids.push_back(id);
  next.draft.token_count += cluster.sentence_length(id);
  return {std::move(next), 0.0};
}

namespace {

void extend(const DocumentCluster& cluster, int max_sentences, std::size_t limit, int next_id,
            Summary& current, std::vector<Summary>& out) {
  out.push_back(current);
  if (out.size() > limit) {
    throw TooLarge("more than " + std::to_string(limit) + " summaries to enumerate");
  }
  if (static_cast<int>(current.sentence_ids.size()) >= max_sentences) return;
  for (int id = next_id; id < cluster.num_sentences(); ++id) {
    const int len = cluster.sentence_length(id);
    if (current.token_count + len > cluster.length_budget) continue;
    current.sentence_ids.push_back(id);
    current.token_count += len;
    extend(cluster, max_sentences, limit, id + 1, current, out);
    current.sentence_ids.pop_back();
    current.token_count -= len;
  }
}

}  // namespace

std::vector<Summary> enumerate_summaries(const DocumentCluster& cluster, int max_sentences,
                                         std::size_t limit) {
  std::vector<Summary> out;
  Summary current;
  extend(cluster, max_sentences, limit, 0, current, out);
  return out;
}

}  // namespace april
