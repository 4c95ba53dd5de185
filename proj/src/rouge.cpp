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

#include "april/rouge_scorer.hpp"

#include <algorithm>
#include <unordered_set>

#include "april/errors.hpp"

namespace april {
namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",      "about", "above",  "after", "again", "against", "all",   "am",
      "an",     "and",   "any",    "are",   "as",    "at",      "be",    "because",
      "been",   "before", "being", "below", "between", "both",  "but",   "by",
      "can",    "did",   "do",     "does",  "doing", "down",    "during", "each",
      "few",    "for",   "from",   "further", "had", "has",     "have",  "having",
      "he",     "her",   "here",   "hers",  "herself", "him",   "himself", "his",
      "how",    "i",     "if",     "in",    "into",  "is",      "it",    "its",
      "itself", "just",  "me",     "more",  "most",  "my",      "myself", "no",
      "nor",    "not",   "now",    "of",    "off",   "on",      "once",  "only",
      "or",     "other", "our",    "ours",  "ourselves", "out", "over",  "own",
      "same",   "she",   "should", "so",    "some",  "such",    "than",  "that",
      "the",    "their", "theirs", "them",  "themselves", "then", "there", "these",
      "they",   "this",  "those",  "through", "to",  "too",     "under", "until",
      "up",     "very",  "was",    "we",    "were",  "what",    "when",  "where",
      "which",  "while", "who",    "whom",  "why",   "will",    "with",  "would",
      "you",    "your",  "yours",  "yourself", "yourselves",
  };
  return words;
}

constexpr std::uint64_t kUnigramTag = 0xffffffffULL;

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::uint64_t unigram_key(int a) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | kUnigramTag;
}

// Sorted (key, count) runs of a key multiset.
std::vector<std::pair<std::uint64_t, int>> count_runs(std::vector<std::uint64_t> keys) {
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t k : keys) {
    if (!out.empty() && out.back().first == k) {
      ++out.back().second;
    } else {
      out.emplace_back(k, 1);
    }
  }
  return out;
}

// Sum over keys of min(candidate count, reference count).
long clipped_overlap(const std::vector<std::pair<std::uint64_t, int>>& cand,
                     const std::vector<std::pair<std::uint64_t, int>>& ref) {
  long total = 0;
  auto c = cand.begin();
  auto r = ref.begin();
  while (c != cand.end() && r != ref.end()) {
    if (c->first == r->first) {
      total += std::min(c->second, r->second);
      ++c;
      ++r;
    } else if (c->first < r->first) {
      ++c;
    } else {
      ++r;
    }
  }
  return total;
}

std::vector<std::uint64_t> unigram_units(const std::vector<int>& ids) {
  std::vector<std::uint64_t> keys;
  keys.reserve(ids.size());
  for (int id : ids) {
    if (id >= 0) keys.push_back(unigram_key(id));
  }
  return keys;
}

std::vector<std::uint64_t> bigram_units(const std::vector<int>& ids) {
  std::vector<std::uint64_t> keys;
  for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
    if (ids[k] >= 0 && ids[k + 1] >= 0) keys.push_back(pair_key(ids[k], ids[k + 1]));
  }
  return keys;
}

std::vector<std::uint64_t> su_units(const std::vector<int>& ids, int gap) {
  std::vector<std::uint64_t> keys = unigram_units(ids);
  const std::size_t span = static_cast<std::size_t>(gap) + 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) continue;
    for (std::size_t j = i + 1; j < ids.size() && j - i <= span; ++j) {
      if (ids[j] >= 0) keys.push_back(pair_key(ids[i], ids[j]));
    }
  }
  return keys;
}

int lcs_length(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<int> prev(b.size() + 1, 0);
  std::vector<int> cur(b.size() + 1, 0);
  for (int x : a) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = (x >= 0 && x == b[j]) ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double ratio(long num, long den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

RougeScorer::RougeScorer(std::span<const Tokens> references, RougeConfig config)
    : config_(config) {
  bool any = false;
  for (const Tokens& ref : references) any = any || !ref.empty();
  if (!any) throw InputError("ROUGE needs at least one non-empty reference");

  for (const Tokens& ref : references) {
    Reference r;
    for (const std::string& raw : ref) {
      std::string tok = normalise(raw);
      if (tok.empty()) continue;
      auto [it, inserted] = vocab_.emplace(tok, static_cast<int>(vocab_.size()));
      r.ids.push_back(it->second);
    }
    if (r.ids.empty()) continue;
    r.unigrams = count_runs(unigram_units(r.ids));
    r.bigrams = count_runs(bigram_units(r.ids));
    r.skip = count_runs(su_units(r.ids, config_.skip_gap));
    totals_.unigrams += static_cast<long>(r.ids.size());
    totals_.bigrams += static_cast<long>(r.ids.size() - 1);
    for (const auto& [k, n] : r.skip) totals_.skip += n;
    refs_.push_back(std::move(r));
  }
}

std::string RougeScorer::normalise(const std::string& raw) const {
  if (config_.remove_stopwords && stopwords().count(raw) > 0) return {};
  return config_.stem ? porter_stem(raw) : raw;
}

std::vector<int> RougeScorer::encode(std::span<const std::string> candidate) const {
  std::size_t n = candidate.size();
  if (config_.truncate_to > 0) n = std::min(n, static_cast<std::size_t>(config_.truncate_to));
  std::vector<int> ids;
  ids.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::string tok = normalise(candidate[k]);
    if (tok.empty()) continue;
    auto it = vocab_.find(tok);
    ids.push_back(it == vocab_.end() ? -1 : it->second);
  }
  return ids;
}

RougeScores RougeScorer::score_all(std::span<const std::string> candidate) const {
  RougeScores out;
  const std::vector<int> ids = encode(candidate);
  if (ids.empty()) return out;
  const auto uni = count_runs(unigram_units(ids));
  const auto bi = count_runs(bigram_units(ids));
  const auto skip = count_runs(su_units(ids, config_.skip_gap));
  long hit1 = 0;
  long hit2 = 0;
  long hitL = 0;
  long hitS = 0;
  for (const Reference& r : refs_) {
    hit1 += clipped_overlap(uni, r.unigrams);
    hit2 += clipped_overlap(bi, r.bigrams);
    hitL += lcs_length(ids, r.ids);
    hitS += clipped_overlap(skip, r.skip);
  }
  out.r1 = ratio(hit1, totals_.unigrams);
  out.r2 = ratio(hit2, totals_.bigrams);
  out.rL = ratio(hitL, totals_.unigrams);
  out.rSU4 = ratio(hitS, totals_.skip);
  return out;
}

double RougeScorer::score(std::span<const std::string> candidate, RougeVariant variant) const {
  const RougeScores s = score_all(candidate);
  switch (variant) {
    case RougeVariant::kN1: return s.r1;
    case RougeVariant::kN2: return s.r2;
    case RougeVariant::kL: return s.rL;
    case RougeVariant::kSU4: return s.rSU4;
  }
  return 0.0;
}

double rouge(std::span<const std::string> candidate, std::span<const Tokens> references,
             RougeVariant variant, const RougeConfig& config) {
  return RougeScorer(references, config).score(candidate, variant);
}

RougeScores rouge_all(std::span<const std::string> candidate,
                      std::span<const Tokens> references, const RougeConfig& config) {
  return RougeScorer(references, config).score_all(candidate);
}

}  // namespace april
