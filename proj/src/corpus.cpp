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

#include "april/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "april/errors.hpp"
#include "april/random.hpp"

namespace april {
namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Strips surrounding punctuation and lowercases ASCII; may return "".
std::string normalise_token(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_punct(raw[begin])) ++begin;
  while (end > begin && is_punct(raw[end - 1])) --end;
  std::string out(raw.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_sentence(std::string_view raw) {
  std::size_t end = raw.size();
  while (end > 0 && (raw[end - 1] == '"' || raw[end - 1] == '\'' ||
                     raw[end - 1] == ')' || raw[end - 1] == ']')) {
    --end;
  }
  if (end == 0) return false;
  const char c = raw[end - 1];
  return c == '.' || c == '!' || c == '?';
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> sorted_txt_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Vocab bigram counts of one sentence, sorted by vocab index.
std::vector<SparseCount> sentence_vocab_counts(const std::vector<std::string>& tokens,
                                               const std::map<Bigram, int>& index) {
  std::map<int, int> counts;
  for (std::size_t k = 0; k + 1 < tokens.size(); ++k) {
    auto it = index.find(Bigram{tokens[k], tokens[k + 1]});
    if (it != index.end()) ++counts[it->second];
  }
  std::vector<SparseCount> out;
  out.reserve(counts.size());
  for (const auto& [slot, count] : counts) out.push_back({slot, count});
  return out;
}

}  // namespace

std::vector<std::string> tokenise(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view raw : split_whitespace(text)) {
    std::string tok = normalise_token(raw);
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::pair<std::vector<std::string>, std::string>> split_sentences(
    std::string_view text) {
  std::vector<std::pair<std::vector<std::string>, std::string>> out;
  std::vector<std::string> tokens;
  std::string surface;
  auto flush = [&] {
    if (!tokens.empty()) out.emplace_back(std::move(tokens), std::move(surface));
    tokens.clear();
    surface.clear();
  };
  for (std::string_view raw : split_whitespace(text)) {
    if (!surface.empty()) surface += ' ';
    surface.append(raw);
    std::string tok = normalise_token(raw);
    if (!tok.empty()) tokens.push_back(std::move(tok));
    if (ends_sentence(raw)) flush();
  }
  flush();
  return out;
}

DocumentCluster make_cluster(std::string cluster_id,
                             const std::vector<std::pair<std::string, std::string>>& docs,
                             const std::vector<std::string>& references, int budget) {
  if (budget <= 0) throw InputError("length budget must be positive");
  if (docs.empty()) throw InputError("cluster " + cluster_id + " has no documents");

  DocumentCluster cluster;
  cluster.cluster_id = std::move(cluster_id);
  cluster.length_budget = budget;

  std::map<Bigram, int> doc_freq;
  for (const auto& [name, text] : docs) {
    auto sentences = split_sentences(text);
    if (sentences.empty()) {
      throw InputError("document " + name + " contains no extractable sentences");
    }
    const int doc_id = cluster.num_documents();
    cluster.documents.push_back(name);
    std::set<Bigram> seen;
    int position = 0;
    for (auto& [tokens, surface] : sentences) {
      for (std::size_t k = 0; k + 1 < tokens.size(); ++k) {
        seen.insert(Bigram{tokens[k], tokens[k + 1]});
      }
      cluster.sentences.push_back(Sentence{cluster.num_sentences(), doc_id, position++,
                                           std::move(tokens), std::move(surface)});
    }
    for (const Bigram& b : seen) ++doc_freq[b];
  }

  std::vector<std::pair<Bigram, int>> ranked(doc_freq.begin(), doc_freq.end());
  // std::map iteration is lexicographic, so a stable sort on df keeps ties
  // in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > static_cast<std::size_t>(kFeatureDim)) ranked.resize(kFeatureDim);

  std::map<Bigram, int> index;
  for (const auto& [bigram, df] : ranked) {
    index.emplace(bigram, static_cast<int>(cluster.vocab.size()));
    cluster.vocab.push_back(bigram);
    cluster.vocab_df.push_back(df);
  }
  for (int pad = 0; cluster.vocab.size() < static_cast<std::size_t>(kFeatureDim); ++pad) {
    cluster.vocab.push_back(Bigram{"", "<pad:" + std::to_string(pad) + ">"});
    cluster.vocab_df.push_back(0);
  }

  cluster.sentence_bigrams.reserve(cluster.sentences.size());
  for (const Sentence& s : cluster.sentences) {
    cluster.sentence_bigrams.push_back(sentence_vocab_counts(s.tokens, index));
  }
  for (const std::string& ref : references) {
    auto tokens = tokenise(ref);
    if (!tokens.empty()) cluster.references.push_back(std::move(tokens));
  }
  return cluster;
}

DocumentCluster load_cluster(const std::filesystem::path& path, int budget) {
  const auto doc_files = sorted_txt_files(path / "docs");
  if (doc_files.empty()) {
    throw InputError("no documents under " + (path / "docs").string());
  }
  std::vector<std::pair<std::string, std::string>> docs;
  for (const auto& f : doc_files) docs.emplace_back(f.filename().string(), read_file(f));
  std::vector<std::string> refs;
  for (const auto& f : sorted_txt_files(path / "refs")) refs.push_back(read_file(f));

  std::string id = path.filename().string();
  if (id.empty()) id = path.parent_path().filename().string();
  return make_cluster(std::move(id), docs, refs, budget);
}

Summary make_summary(const DocumentCluster& cluster, std::vector<int> ids) {
  Summary s;
  std::set<int> seen;
  for (int id : ids) {
    if (!cluster.has_sentence(id)) {
      throw InputError("unknown sentence id " + std::to_string(id));
    }
    if (!seen.insert(id).second) {
      throw InputError("sentence id " + std::to_string(id) + " repeated");
    }
    s.token_count += cluster.sentence_length(id);
  }
  s.sentence_ids = std::move(ids);
  return s;
}

std::vector<int> canonical_ids(const Summary& summary) {
  std::vector<int> ids = summary.sentence_ids;
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> summary_tokens(const DocumentCluster& cluster,
                                        const Summary& summary) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(summary.token_count));
  for (int id : summary.sentence_ids) {
    if (!cluster.has_sentence(id)) {
      throw InputError("unknown sentence id " + std::to_string(id));
    }
    const auto& tokens = cluster.sentences[static_cast<std::size_t>(id)].tokens;
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

std::string summary_text(const DocumentCluster& cluster, const Summary& summary) {
  std::string out;
  for (int id : summary.sentence_ids) {
    if (!cluster.has_sentence(id)) {
      throw InputError("unknown sentence id " + std::to_string(id));
    }
    if (!out.empty()) out += ' ';
    out += cluster.sentences[static_cast<std::size_t>(id)].text;
  }
  return out;
}

Eigen::VectorXd bigram_counts(const DocumentCluster& cluster, const Summary& summary) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(kFeatureDim);
  for (int id : summary.sentence_ids) {
    if (!cluster.has_sentence(id)) {
      throw InputError("unknown sentence id " + std::to_string(id));
    }
    for (const SparseCount& sc : cluster.sentence_bigrams[static_cast<std::size_t>(id)]) {
      counts(sc.index) += sc.count;
    }
  }
  return counts;
}

FeatureVector featurise(const DocumentCluster& cluster, const Summary& summary) {
  FeatureVector v = bigram_counts(cluster, summary);
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

std::vector<Summary> sample_pool(const DocumentCluster& cluster, int pool_size,
                                 std::uint64_t seed, std::vector<std::string>* warnings) {
  if (pool_size < 2) throw InputError("pool_size must be at least 2");
  const int budget = cluster.length_budget;
  std::vector<int> fitting;
  for (int id = 0; id < cluster.num_sentences(); ++id) {
    if (cluster.sentence_length(id) <= budget) fitting.push_back(id);
  }
  if (fitting.empty()) {
    throw InputError("no sentence of cluster " + cluster.cluster_id + " fits the budget");
  }

  Rng rng = make_rng(seed, 0x9001);
  std::vector<Summary> pool;
  std::set<std::vector<int>> seen;
  const long max_attempts = 10L * pool_size;
  std::vector<int> candidates;
  for (long attempt = 0;
       attempt < max_attempts && pool.size() < static_cast<std::size_t>(pool_size);
       ++attempt) {
    Summary s;
    std::vector<char> used(static_cast<std::size_t>(cluster.num_sentences()), 0);
    while (true) {
      candidates.clear();
      for (int id : fitting) {
        if (!used[static_cast<std::size_t>(id)] &&
            s.token_count + cluster.sentence_length(id) <= budget) {
          candidates.push_back(id);
        }
      }
      if (candidates.empty()) break;
      const int pick = candidates[uniform_index(rng, candidates.size())];
      used[static_cast<std::size_t>(pick)] = 1;
      s.sentence_ids.push_back(pick);
      s.token_count += cluster.sentence_length(pick);
    }
    if (seen.insert(canonical_ids(s)).second) pool.push_back(std::move(s));
  }
  if (pool.size() < static_cast<std::size_t>(pool_size) && warnings != nullptr) {
    warnings->push_back("pool for " + cluster.cluster_id + " has " +
                        std::to_string(pool.size()) + " distinct summaries, " +
                        std::to_string(pool_size) + " requested");
  }
  return pool;
}

Eigen::MatrixXd pool_features(const DocumentCluster& cluster,
                              std::span<const Summary> pool) {
  Eigen::MatrixXd features(static_cast<Eigen::Index>(pool.size()), kFeatureDim);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = featurise(cluster, pool[i]).transpose();
  }
  return features;
}

}  // namespace april
