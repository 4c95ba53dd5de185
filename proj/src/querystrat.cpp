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

#include "april/querystrat.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "april/errors.hpp"
#include "april/ranker.hpp"

namespace april {
namespace {

enum Stream : std::uint64_t { kRndStream = 1, kSbtStream = 2, kJnStream = 3 };

Rng stream_rng(const QueryContext& ctx, Stream s) {
  return make_rng(ctx.seed, static_cast<std::uint64_t>(ctx.round) * 8 + s);
}

long total_pairs(int n) { return static_cast<long>(n) * (n - 1) / 2; }

long unasked_count(const QueryContext& ctx) {
  return total_pairs(ctx.pool_size()) - static_cast<long>(ctx.asked.size());
}

void check_pool(const QueryContext& ctx) {
  if (ctx.features == nullptr || ctx.pool_size() < 2) {
    throw InputError("query selection needs a pool of at least 2 summaries");
  }
}

void warn(const QueryContext& ctx, std::string message) {
  if (ctx.warnings != nullptr) ctx.warnings->push_back(std::move(message));
}

std::vector<IndexPair> all_unasked(const QueryContext& ctx) {
  std::vector<IndexPair> out;
  const int n = ctx.pool_size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!ctx.asked.contains(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

Eigen::VectorXd utility_scores(const QueryContext& ctx) {
  if (ctx.w.size() == 0) return Eigen::VectorXd::Zero(ctx.pool_size());
  return (*ctx.features) * ctx.w;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kRandom: return "rnd";
    case Strategy::kSbt: return "sbt";
    case Strategy::kUnc: return "unc";
    case Strategy::kJn: return "jn";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  std::string lower = name;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "rnd" || lower == "random") return Strategy::kRandom;
  if (lower == "sbt") return Strategy::kSbt;
  if (lower == "unc") return Strategy::kUnc;
  if (lower == "jn" || lower == "j&n") return Strategy::kJn;
  throw InputError("unknown query strategy '" + name + "'");
}

void QueryContext::record(const PreferenceRecord& pref) {
  asked.insert(pref.left_id, pref.right_id);
  answered.push_back(pref);
}

GibbsPairSampler::GibbsPairSampler(const Eigen::VectorXd& scores)
    : first_cdf_(softmax_cdf(scores)), second_cdf_(softmax_cdf(-scores)) {}

std::optional<IndexPair> GibbsPairSampler::sample(Rng& rng, int max_attempts) const {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const int i = static_cast<int>(sample_cdf(first_cdf_, rng));
    const int j = static_cast<int>(sample_cdf(second_cdf_, rng));
    if (i != j) return IndexPair{i, j};
  }
  return std::nullopt;
}

IndexPair select_rnd(QueryContext& ctx) {
  check_pool(ctx);
  const long remaining = unasked_count(ctx);
  if (remaining <= 0) throw Exhausted("every pair of the pool has been asked");
  Rng rng = stream_rng(ctx, kRndStream);
  const auto n = static_cast<std::size_t>(ctx.pool_size());
  if (remaining * 2 >= total_pairs(ctx.pool_size())) {
    while (true) {
      const int i = static_cast<int>(uniform_index(rng, n));
      const int j = static_cast<int>(uniform_index(rng, n));
      if (i != j && !ctx.asked.contains(i, j)) return {i, j};
    }
  }
  const auto pairs = all_unasked(ctx);
  return pairs[uniform_index(rng, pairs.size())];
}

IndexPair select_sbt(QueryContext& ctx) {
  check_pool(ctx);
  if (unasked_count(ctx) <= 0) throw Exhausted("every pair of the pool has been asked");
  const GibbsPairSampler sampler(utility_scores(ctx));
  Rng rng = stream_rng(ctx, kSbtStream);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto pair = sampler.sample(rng, 1);
    if (pair && !ctx.asked.contains(pair->first, pair->second)) return *pair;
  }
  warn(ctx, "round " + std::to_string(ctx.round) +
                ": SBT found no fresh pair in 1000 draws, using random selection");
  return select_rnd(ctx);
}

double uncertainty(double score) {
  const double p = logistic(score);
  return p >= 0.5 ? 1.0 - p : p;
}

IndexPair select_unc(QueryContext& ctx) {
  check_pool(ctx);
  const Eigen::VectorXd scores = utility_scores(ctx);
  const int n = ctx.pool_size();
  std::vector<double> unc(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) unc[static_cast<std::size_t>(i)] = uncertainty(scores(i));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return unc[static_cast<std::size_t>(a)] > unc[static_cast<std::size_t>(b)];
  });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (!ctx.asked.contains(order[a], order[b])) return {order[a], order[b]};
    }
  }
  throw Exhausted("every pair of the pool has been asked");
}

std::pair<std::vector<int>, int> jn_votes(const QueryContext& ctx,
                                          const std::vector<IndexPair>& pairs) {
  const Eigen::MatrixXd& features = *ctx.features;
  const Eigen::Index dim = features.cols();
  const Eigen::VectorXd lo = features.colwise().minCoeff().transpose();
  const Eigen::VectorXd hi = features.colwise().maxCoeff().transpose();

  // Each answer "winner > loser" says the reference point p is closer to the
  // loser: 2 p'(phi_w - phi_l) < |phi_w|^2 - |phi_l|^2.
  const auto k = static_cast<Eigen::Index>(ctx.answered.size());
  Eigen::MatrixXd normals(dim, k);
  Eigen::RowVectorXd offsets(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto& pref = ctx.answered[static_cast<std::size_t>(c)];
    const auto w = features.row(pref.winner());
    const auto l = features.row(pref.loser());
    normals.col(c) = 2.0 * (w - l).transpose();
    offsets(c) = w.squaredNorm() - l.squaredNorm();
  }

  Rng rng = stream_rng(ctx, kJnStream);
  constexpr Eigen::Index kBatch = 256;
  std::vector<Eigen::VectorXd> kept;
  int drawn = 0;
  Eigen::MatrixXd batch(kBatch, dim);
  while (static_cast<int>(kept.size()) < ctx.jn_samples && drawn < ctx.jn_max_draws) {
    for (Eigen::Index r = 0; r < kBatch; ++r) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        batch(r, d) = lo(d) + (hi(d) - lo(d)) * uniform01(rng);
      }
    }
    drawn += static_cast<int>(kBatch);
    Eigen::MatrixXd lhs;
    if (k > 0) lhs = batch * normals;
    for (Eigen::Index r = 0;
         r < kBatch && static_cast<int>(kept.size()) < ctx.jn_samples; ++r) {
      if (k == 0 || (lhs.row(r).array() < offsets.array()).all()) {
        kept.emplace_back(batch.row(r).transpose());
      }
    }
  }
  const int survivors = static_cast<int>(kept.size());
  std::vector<int> votes(pairs.size(), 0);
  if (survivors == 0) return {votes, 0};

  Eigen::MatrixXd points(survivors, dim);
  for (int s = 0; s < survivors; ++s) points.row(s) = kept[static_cast<std::size_t>(s)].transpose();
  // Squared distance up to the per-point constant |p|^2.
  const Eigen::VectorXd norms = features.rowwise().squaredNorm();
  Eigen::MatrixXd dist = -2.0 * points * features.transpose();
  dist.rowwise() += norms.transpose();

  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto [i, j] = pairs[q];
    votes[q] = static_cast<int>((dist.col(i).array() > dist.col(j).array()).count());
  }
  return {votes, survivors};
}

IndexPair select_jn(QueryContext& ctx) {
  check_pool(ctx);
  const long remaining = unasked_count(ctx);
  if (remaining <= 0) throw Exhausted("every pair of the pool has been asked");

  std::vector<IndexPair> candidates;
  if (remaining <= ctx.jn_max_candidates) {
    candidates = all_unasked(ctx);
  } else {
    Rng rng = stream_rng(ctx, kRndStream);
    PairSet picked;
    const auto n = static_cast<std::size_t>(ctx.pool_size());
    while (static_cast<int>(candidates.size()) < ctx.jn_max_candidates) {
      int i = static_cast<int>(uniform_index(rng, n));
      int j = static_cast<int>(uniform_index(rng, n));
      if (i == j || ctx.asked.contains(i, j) || picked.contains(i, j)) continue;
      picked.insert(i, j);
      candidates.emplace_back(std::min(i, j), std::max(i, j));
    }
  }

  const auto [votes, survivors] = jn_votes(ctx, candidates);
  if (survivors < ctx.jn_min_samples) {
    warn(ctx, "round " + std::to_string(ctx.round) + ": J&N region kept " +
                  std::to_string(survivors) + " points, using random selection");
    return select_rnd(ctx);
  }

  // Prefer the ambiguous pair whose majority is strongest; with no ambiguous
  // pair left, the one with the largest minority.
  std::optional<std::size_t> best_ambiguous;
  int best_majority = -1;
  std::size_t best_fallback = 0;
  int best_minority = -1;
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    const int v = votes[q];
    const int majority = std::max(v, survivors - v);
    const int minority = survivors - majority;
    if (v > 0 && v < survivors && majority > best_majority) {
      best_majority = majority;
      best_ambiguous = q;
    }
    if (minority > best_minority) {
      best_minority = minority;
      best_fallback = q;
    }
  }
  return candidates[best_ambiguous.value_or(best_fallback)];
}

IndexPair select_pair(Strategy strategy, QueryContext& ctx) {
  switch (strategy) {
    case Strategy::kRandom: return select_rnd(ctx);
    case Strategy::kSbt: return select_sbt(ctx);
    case Strategy::kUnc: return select_unc(ctx);
    case Strategy::kJn: return select_jn(ctx);
  }
  throw InputError("unknown strategy");
}

}  // namespace april
