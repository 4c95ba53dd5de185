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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace april {

/// Width of the bag-of-bigram representation shared by every learner.
inline constexpr int kFeatureDim = 200;

/// Default summary length limit in tokens.
inline constexpr int kDefaultBudget = 100;

/// Normalised bag-of-bigram vector, length kFeatureDim, L2 norm <= 1.
using FeatureVector = Eigen::VectorXd;

struct Bigram {
  std::string first;
  std::string second;

  /// Padding entries have an empty first token, which no text produces.
  bool is_sentinel() const { return first.empty(); }

  auto operator<=>(const Bigram&) const = default;
};

struct Sentence {
  int id = 0;        // index into DocumentCluster::sentences
  int doc_id = 0;
  int position = 0;  // 0-based within its document
  std::vector<std::string> tokens;
  std::string text;  // original surface form, for display
};

/// A vocab slot and how often it occurs in one sentence.
struct SparseCount {
  int index = 0;
  int count = 0;
};

struct DocumentCluster {
  std::string cluster_id;
  std::vector<std::string> documents;  // file names, indexed by doc_id
  std::vector<Sentence> sentences;
  std::vector<Bigram> vocab;           // exactly kFeatureDim entries
  std::vector<std::vector<std::string>> references;
  int length_budget = kDefaultBudget;

  // Derived at load time.
  std::vector<int> vocab_df;                             // per vocab slot
  std::vector<std::vector<SparseCount>> sentence_bigrams;  // per sentence

  int num_documents() const { return static_cast<int>(documents.size()); }
  int num_sentences() const { return static_cast<int>(sentences.size()); }
  int sentence_length(int id) const {
    return static_cast<int>(sentences[static_cast<std::size_t>(id)].tokens.size());
  }
  bool has_sentence(int id) const { return id >= 0 && id < num_sentences(); }
};

/// Ordered selection of sentences. Two summaries are the same summary when
/// their id sets are equal.
struct Summary {
  std::vector<int> sentence_ids;
  int token_count = 0;

  bool empty() const { return sentence_ids.empty(); }
};

/// Lowercase, split on whitespace, strip leading/trailing punctuation, drop
/// punctuation-only tokens.
std::vector<std::string> tokenise(std::string_view text);

/// Splits running text into tokenised sentences at terminal punctuation.
/// The second member of each pair is the raw sentence text.
std::vector<std::pair<std::vector<std::string>, std::string>> split_sentences(
    std::string_view text);

/// Builds a cluster from in-memory document texts. Throws InputError on
/// empty input or a document without sentences.
DocumentCluster make_cluster(std::string cluster_id,
                             const std::vector<std::pair<std::string, std::string>>& docs,
                             const std::vector<std::string>& references,
                             int budget = kDefaultBudget);

/// Loads `<path>/docs/*.txt` and optional `<path>/refs/*.txt`.
DocumentCluster load_cluster(const std::filesystem::path& path,
                             int budget = kDefaultBudget);

/// Summary from sentence ids; throws InputError on unknown or repeated ids.
Summary make_summary(const DocumentCluster& cluster, std::vector<int> ids);

/// Sorted copy of the id set, the identity used for dedup and caching.
std::vector<int> canonical_ids(const Summary& summary);

std::vector<std::string> summary_tokens(const DocumentCluster& cluster,
                                        const Summary& summary);
std::string summary_text(const DocumentCluster& cluster, const Summary& summary);

/// Raw vocab occurrence counts (unnormalised).
Eigen::VectorXd bigram_counts(const DocumentCluster& cluster, const Summary& summary);

/// L2-normalised bigram counts; the zero vector stays zero.
FeatureVector featurise(const DocumentCluster& cluster, const Summary& summary);

/// Budget-saturating random summaries with duplicate id-sets removed.
/// A shortfall after 10 * pool_size attempts is reported through `warnings`.
std::vector<Summary> sample_pool(const DocumentCluster& cluster, int pool_size,
                                 std::uint64_t seed,
                                 std::vector<std::string>* warnings = nullptr);

/// One featurised row per pool summary.
Eigen::MatrixXd pool_features(const DocumentCluster& cluster,
                              std::span<const Summary> pool);

}  // namespace april
