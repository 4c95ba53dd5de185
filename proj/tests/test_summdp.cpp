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

#include <doctest.h>

#include <memory>
#include <set>

#include "april/errors.hpp"
#include "april/ranker.hpp"
#include "april/summdp.hpp"
#include "support.hpp"

using namespace april;

namespace {

// Three sentences of 3, 4 and 5 tokens.
DocumentCluster three_sentences(int budget) {
  return make_cluster("t", {{"a.txt", "One two three. Four five six seven. Eight nine ten eleven twelve."}},
                      {}, budget);
}

}  // namespace

TEST_CASE("legal actions from the empty draft: every sentence, then terminate") {
  const auto c = three_sentences(100);
  const auto actions = legal_actions(c, MdpState{});
  REQUIRE(actions.size() == 4);
  for (int k = 0; k < 3; ++k) CHECK(actions[static_cast<std::size_t>(k)] == Action::insert(k));
  CHECK(actions.back() == Action::terminate());
}

TEST_CASE("a draft exactly at the budget can only terminate") {
  const auto c = three_sentences(7);
  MdpState s;
  s.draft = make_summary(c, {0, 1});
  REQUIRE(s.draft.token_count == 7);
  const auto actions = legal_actions(c, s);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0] == Action::terminate());
}

TEST_CASE("legal actions on a fixture state match an independent filter") {
  const auto c = load_cluster(april::testing::fixture("tiny-01"));
  MdpState s;
  s.draft = make_summary(c, {4, 9, 20});
  std::vector<Action> expected;
  const std::set<int> used{4, 9, 20};
  for (int id = 0; id < c.num_sentences(); ++id) {
    if (!used.count(id) && s.draft.token_count + c.sentence_length(id) <= c.length_budget) {
      expected.push_back(Action::insert(id));
    }
  }
  expected.push_back(Action::terminate());
  CHECK(legal_actions(c, s) == expected);
}

TEST_CASE("terminated states are absorbing") {
  const auto c = three_sentences(100);
  MdpState s;
  s.terminated = true;
  CHECK_THROWS_AS(legal_actions(c, s), InputError);
  CHECK_THROWS_AS(step(c, s, Action::terminate(), hu_reward(c)), InputError);
}

TEST_CASE("step: inserts earn 0, termination earns the reward of the draft") {
  const auto c = load_cluster(april::testing::fixture("tiny-01"));
  const RewardFn hu = hu_reward(c);
  const auto [next, r] = step(c, MdpState{}, Action::insert(3), hu);
  CHECK(r == 0.0);
  CHECK(next.draft.sentence_ids == std::vector<int>{3});
  CHECK_FALSE(next.terminated);

  const auto [done, r_empty] = step(c, MdpState{}, Action::terminate(), hu);
  CHECK(done.terminated);
  CHECK(r_empty == 0.0);

  const auto [done2, r_draft] = step(c, next, Action::terminate(), hu);
  CHECK(done2.terminated);
  CHECK(r_draft == hu_score(c, next.draft));
}

TEST_CASE("step: termination under a ranker reward equals the ranker's rank reward") {
  const auto c = load_cluster(april::testing::fixture("tiny-01"));
  const auto pool = sample_pool(c, 40, 1);
  const auto ranker = std::make_shared<const BlendedRanker>(
      c, april::testing::gaussian_matrix(kFeatureDim, 1, 3).col(0), 0.5, pool_features(c, pool),
      pool_hu(c, pool));
  const RewardFn reward = ranker_reward(ranker);
  MdpState s;
  s.draft = make_summary(c, {1, 7});
  const auto [done, r] = step(c, s, Action::terminate(), reward);
  CHECK(r == ranker->rank_reward(s.draft));
}

TEST_CASE("step rejects illegal actions") {
  const auto c = three_sentences(7);
  MdpState s;
  s.draft = make_summary(c, {0});
  CHECK_THROWS_AS(step(c, s, Action::insert(0), hu_reward(c)), InputError);   // already used
  CHECK_THROWS_AS(step(c, s, Action::insert(2), hu_reward(c)), InputError);   // does not fit
  CHECK_THROWS_AS(step(c, s, Action::insert(99), hu_reward(c)), InputError);  // unknown
}

TEST_CASE("enumerate: 3 fitting sentences, at most 2 -> 7 summaries") {
  const auto all = enumerate_summaries(three_sentences(100), 2);
  CHECK(all.size() == 7);
  std::set<std::vector<int>> sets;
  for (const auto& s : all) sets.insert(s.sentence_ids);
  CHECK(sets.count({}) == 1);
  CHECK(sets.count({0, 2}) == 1);
}

TEST_CASE("enumerate: a pair over budget is absent") {
  // 4 + 5 = 9 tokens exceeds 8; the other pairs fit.
  const auto all = enumerate_summaries(three_sentences(8), 2);
  std::set<std::vector<int>> sets;
  for (const auto& s : all) sets.insert(s.sentence_ids);
  CHECK(all.size() == 6);
  CHECK(sets.count({1, 2}) == 0);
  CHECK(sets.count({0, 2}) == 1);
}

TEST_CASE("enumerate: the 8-sentence micro cluster at 50 tokens") {
  // Every pair fits and no triple does: 1 + 8 + C(8, 2) = 37.
  const auto c = load_cluster(april::testing::fixture("micro-01"), 50);
  REQUIRE(c.num_sentences() == 8);
  const auto all = enumerate_summaries(c, 8);
  CHECK(all.size() == 37);
  for (const auto& s : all) CHECK(s.token_count <= 50);
}

TEST_CASE("enumerate: the size guard") {
  const auto c = load_cluster(april::testing::fixture("tiny-01"));
  CHECK_THROWS_AS(enumerate_summaries(c, 24, 1000), TooLarge);
}
