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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "april/corpus.hpp"
#include "april/evalmetrics.hpp"
#include "april/rouge_scorer.hpp"

namespace april {

enum class OracleKind { kPerfect, kConstantNoise, kLogisticNoise, kHuman };

struct OracleSpec {
  OracleKind kind = OracleKind::kPerfect;
  double c = 0.0;  // constant noise only: probability of a coin-flip answer
  double m = 1.0;  // logistic noise only: temperature of the response curve
  std::uint64_t seed = 0;

  static OracleSpec perfect(std::uint64_t seed = 0);
  static OracleSpec constant_noise(double c, std::uint64_t seed = 0);
  static OracleSpec logistic_noise(double m, std::uint64_t seed = 0);
  static OracleSpec human();

  /// Throws InputError on out-of-range parameters.
  void validate() const;

  /// Short table label: "PO", "CNO-0.1", "LNO-1", "HUMAN".
  std::string label() const;

  /// Parses a label produced by label(); seed is left at 0.
  static OracleSpec parse(const std::string& label);
};

enum class Side { kLeft, kRight };

struct PreferenceRecord {
  int round = 0;
  int left_id = 0;
  int right_id = 0;
  Side preferred = Side::kLeft;
  std::optional<std::int64_t> latency_ms;

  int winner() const { return preferred == Side::kLeft ? left_id : right_id; }
  int loser() const { return preferred == Side::kLeft ? right_id : left_id; }
};

/// Weighted recall sum R1/0.47 + R2/0.22 + RSU4/0.18.
double u_star_from(const RougeScores& scores);

/// Reference-based utility U* of a cluster, cached per summary id-set.
/// Safe to call from several threads.
class UStar {
 public:
  /// Throws InputError when the cluster has no references.
  explicit UStar(const DocumentCluster& cluster);

  double operator()(const Summary& summary) const;
  RougeScores rouge(const Summary& summary) const;

 private:
  const DocumentCluster* cluster_;
  RougeScorer scorer_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<int>, RougeScores> cache_;
};

/// U* of one summary without caching.
double u_star(const DocumentCluster& cluster, const Summary& summary);

/// Answer of a simulated user given both utilities. Deterministic in
/// (spec.seed, round). A perfect-oracle tie goes to Left and is noted in `log`.
Side simulated_response(const OracleSpec& spec, double u_left, double u_right, int round,
                        std::vector<std::string>* log = nullptr);

/// Simulated user over a fixed pool; `utility` maps a pool index to U*.
class Oracle {
 public:
  using Utility = std::function<double(int)>;

  Oracle(OracleSpec spec, Utility utility);

  /// Throws UnsupportedHere for the Human kind and InputError when the two
  /// indices coincide.
  PreferenceRecord respond(int round, int left_id, int right_id);

  const OracleSpec& spec() const { return spec_; }
  int calls() const { return calls_; }
  const std::vector<std::string>& log() const { return log_; }

 private:
  OracleSpec spec_;
  Utility utility_;
  int calls_ = 0;
  std::vector<std::string> log_;
};

/// Oracle answering by U* over pool summaries.
Oracle make_ustar_oracle(const OracleSpec& spec, std::shared_ptr<const UStar> ustar,
                         std::shared_ptr<const std::vector<Summary>> pool);

}  // namespace april
