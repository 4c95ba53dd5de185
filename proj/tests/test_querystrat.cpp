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

#include <cmath>
#include <map>

#include "april/errors.hpp"
#include "april/querystrat.hpp"
#include "april/ranker.hpp"
#include "support.hpp"

using namespace april;
using april::testing::gaussian_matrix;

namespace {

QueryContext context(const Eigen::MatrixXd& features, std::uint64_t seed = 0) {
  QueryContext ctx;
  ctx.features = &features;
  ctx.w = Eigen::VectorXd::Zero(features.cols());
  ctx.seed = seed;
  return ctx;
}

PreferenceRecord answer(int round, int left, int right, Side side) {
  PreferenceRecord p;
  p.round = round;
  p.left_id = left;
  p.right_id = right;
  p.preferred = side;
  return p;
}

// Exact ordered-pair distribution P(i, j) = exp(s_i - s_j) / Z over i != j.
std::map<IndexPair, double> exact_gibbs(const Eigen::VectorXd& s) {
  std::map<IndexPair, double> p;
  double z = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    for (int j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      p[{i, j}] = std::exp(s(i) - s(j));
      z += p[{i, j}];
    }
  }
  for (auto& [pair, v] : p) v /= z;
  return p;
}

double tv_distance(const std::map<IndexPair, double>& exact,
                   const std::map<IndexPair, int>& counts, int draws) {
  double tv = 0.0;
  for (const auto& [pair, v] : exact) {
    auto it = counts.find(pair);
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / draws;
    tv += std::abs(emp - v);
  }
  for (const auto& [pair, c] : counts) {
    if (!exact.count(pair)) tv += static_cast<double>(c) / draws;
  }
  return tv / 2.0;
}

}  // namespace

TEST_CASE("strategy names") {
  for (auto s : {Strategy::kRandom, Strategy::kSbt, Strategy::kUnc, Strategy::kJn}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK(parse_strategy("UNC") == Strategy::kUnc);
  CHECK_THROWS_AS(parse_strategy("best"), InputError);
}

TEST_CASE("random selection: pool of 2 returns its only pair, then runs out") {
  const Eigen::MatrixXd f = gaussian_matrix(2, 3, 1);
  auto ctx = context(f);
  const auto [i, j] = select_rnd(ctx);
  CHECK(std::min(i, j) == 0);
  CHECK(std::max(i, j) == 1);
  ctx.record(answer(0, i, j, Side::kLeft));
  CHECK_THROWS_AS(select_rnd(ctx), Exhausted);
  CHECK_THROWS_AS(select_unc(ctx), Exhausted);
  CHECK_THROWS_AS(select_sbt(ctx), Exhausted);
  CHECK_THROWS_AS(select_jn(ctx), Exhausted);
}

TEST_CASE("random selection: pool of 3 with one pair asked splits evenly") {
  const Eigen::MatrixXd f = gaussian_matrix(3, 3, 2);
  int with_zero = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto ctx = context(f, static_cast<std::uint64_t>(t));
    ctx.record(answer(0, 1, 2, Side::kLeft));
    ctx.round = 1;
    const auto [i, j] = select_rnd(ctx);
    REQUIRE_FALSE(ctx.asked.contains(i, j));
    // Remaining pairs: {0,1} and {0,2}.
    with_zero += (std::max(i, j) == 1) ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(with_zero) / trials - 0.5) <= 0.02);
}

TEST_CASE("selection is deterministic for a fixed seed and round") {
  const Eigen::MatrixXd f = gaussian_matrix(30, 5, 3);
  for (auto s : {Strategy::kRandom, Strategy::kSbt, Strategy::kUnc, Strategy::kJn}) {
    auto a = context(f, 77);
    auto b = context(f, 77);
    a.w = b.w = gaussian_matrix(5, 1, 4).col(0);
    CHECK(select_pair(s, a) == select_pair(s, b));
  }
}

TEST_CASE("Gibbs sampler: two items") {
  Eigen::MatrixXd f(2, 1);
  f << 0.4, -0.3;
  Eigen::VectorXd w(1);
  w << 1.5;
  const Eigen::VectorXd s = f * w;
  const double g = s(0) - s(1);
  const auto exact = exact_gibbs(s);
  CHECK(exact.at({0, 1}) == doctest::Approx(std::exp(g) / (std::exp(g) + std::exp(-g))));
  const GibbsPairSampler sampler(s);
  Rng rng = make_rng(9);
  int first = 0;
  for (int k = 0; k < 100000; ++k) first += sampler.sample(rng)->first == 0 ? 1 : 0;
  CHECK(std::abs(first / 100000.0 - exact.at({0, 1})) <= 0.01);
}

TEST_CASE("Gibbs sampler: w = 0 is uniform over ordered pairs") {
  const GibbsPairSampler sampler(Eigen::VectorXd::Zero(6));
  Rng rng = make_rng(10);
  std::map<IndexPair, int> counts;
  for (int k = 0; k < 60000; ++k) ++counts[*sampler.sample(rng)];
  CHECK(counts.size() == 30);
  for (const auto& [pair, c] : counts) CHECK(std::abs(c / 60000.0 - 1.0 / 30.0) <= 0.005);
}

TEST_CASE("Gibbs sampler: 20 items, total variation to the exact distribution") {
  const Eigen::MatrixXd f = gaussian_matrix(20, 10, 11);
  const Eigen::VectorXd w = gaussian_matrix(10, 1, 12).col(0) * 0.5;
  const Eigen::VectorXd s = f * w;
  const GibbsPairSampler sampler(s);
  Rng rng = make_rng(13);
  std::map<IndexPair, int> counts;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) ++counts[*sampler.sample(rng)];
  CHECK(tv_distance(exact_gibbs(s), counts, draws) <= 0.02);
}

TEST_CASE("uncertainty is min(p, 1 - p) and at most 0.5") {
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double p = 1.0 / (1.0 + std::exp(-x));
    CHECK(uncertainty(x) == doctest::Approx(std::min(p, 1.0 - p)));
    CHECK(uncertainty(x) <= 0.5);
  }
}

TEST_CASE("uncertainty selection") {
  SUBCASE("w = 0 ties everything; index order wins") {
    const Eigen::MatrixXd f = gaussian_matrix(5, 3, 14);
    auto ctx = context(f);
    CHECK(select_unc(ctx) == IndexPair{0, 1});
  }
  SUBCASE("scores (-3, 0.01, 5): item 1 first, then item 0") {
    // p = 0.0474, 0.5025, 0.9933: uncertainties 0.047, 0.4975, 0.0067.
    Eigen::MatrixXd f(3, 1);
    f << -3.0, 0.01, 5.0;
    auto ctx = context(f);
    ctx.w = Eigen::VectorXd::Ones(1);
    CHECK(select_unc(ctx) == IndexPair{1, 0});
    ctx.record(answer(0, 1, 0, Side::kLeft));
    CHECK(select_unc(ctx) == IndexPair{1, 2});
  }
}

TEST_CASE("J&N on a 1-D pool at 0, 1 and 3") {
  Eigen::MatrixXd f(3, 1);
  f << 0.0, 1.0, 3.0;
  auto ctx = context(f, 21);
  SUBCASE("no answers: pairs whose bisector cuts the box are ambiguous") {
    const std::vector<IndexPair> pairs{{0, 1}, {0, 2}, {1, 2}};
    const auto [votes, n] = jn_votes(ctx, pairs);
    REQUIRE(n == 100);
    for (int v : votes) {
      CHECK(v > 0);
      CHECK(v < n);
    }
  }
  SUBCASE("answer 'item at 3 beats item at 0' confines the reference below 1.5") {
    ctx.record(answer(0, 2, 0, Side::kLeft));
    ctx.round = 1;
    const std::vector<IndexPair> pairs{{0, 1}, {1, 2}};
    const auto [votes, n] = jn_votes(ctx, pairs);
    REQUIRE(n == 100);
    // Bisector of 1 and 3 is at 2, outside the region: unanimous that the
    // item at 3 is farther, i.e. preferred.
    CHECK(votes[1] == 0);
    // Bisector of 0 and 1 is at 0.5, inside the region.
    CHECK(votes[0] > 0);
    CHECK(votes[0] < n);
    CHECK(select_jn(ctx) == IndexPair{0, 1});
  }
}

TEST_CASE("J&N against a planted reference point") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd f = gaussian_matrix(8, 2, 300 + seed);
    const Eigen::Vector2d p = gaussian_matrix(2, 1, 400 + seed).col(0) * 0.5;
    auto farther = [&](int i, int j) {
      return (f.row(i).transpose() - p).norm() > (f.row(j).transpose() - p).norm();
    };
    auto ctx = context(f, seed);
    for (int round = 0; round < 12; ++round) {
      ctx.round = round;
      const auto [i, j] = select_jn(ctx);
      REQUIRE_FALSE(ctx.asked.contains(i, j));
      ctx.record(answer(round, i, j, farther(i, j) ? Side::kLeft : Side::kRight));
    }
    ctx.round = 12;
    std::vector<IndexPair> rest;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        if (!ctx.asked.contains(i, j)) rest.emplace_back(i, j);
      }
    }
    const auto [votes, n] = jn_votes(ctx, rest);
    if (n < ctx.jn_min_samples) continue;
    for (std::size_t q = 0; q < rest.size(); ++q) {
      if (votes[q] == 0 || votes[q] == n) {
        CAPTURE(seed);
        CHECK((votes[q] == n) == farther(rest[q].first, rest[q].second));
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("no strategy repeats a pair or pairs an item with itself") {
  const Eigen::MatrixXd f = gaussian_matrix(12, 6, 15);
  const Eigen::VectorXd v = gaussian_matrix(6, 1, 16).col(0);
  for (auto s : {Strategy::kRandom, Strategy::kSbt, Strategy::kUnc, Strategy::kJn}) {
    auto ctx = context(f, 5);
    std::vector<std::string> warnings;
    ctx.warnings = &warnings;
    for (int round = 0; round < 66; ++round) {
      ctx.round = round;
      const auto [i, j] = select_pair(s, ctx);
      CHECK(i != j);
      CHECK_FALSE(ctx.asked.contains(i, j));
      ctx.record(answer(round, i, j, f.row(i).dot(v) > f.row(j).dot(v) ? Side::kLeft : Side::kRight));
      ctx.w = bt_fit(RankerState{Eigen::VectorXd::Zero(6)}, ctx.answered, f).w;
    }
    CHECK(ctx.asked.size() == 66);
    CHECK_THROWS_AS(select_pair(s, ctx), Exhausted);
  }
}
