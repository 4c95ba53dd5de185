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

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "april/corpus.hpp"
#include "april/heuristic.hpp"
#include "april/oracle.hpp"
#include "april/querystrat.hpp"
#include "april/ranker.hpp"
#include "april/rlagents.hpp"

namespace april {

/// Settings of one interactive summarisation run: preference learning with
/// `budget` queries, then offline RL on the learnt ranking.
struct AprilConfig {
  int budget = 10;  // query budget T
  Strategy strategy = Strategy::kUnc;
  OracleSpec oracle = OracleSpec::perfect();
  RlAlgorithm rl = RlAlgorithm::kTd;
  int episodes = 5000;
  int pool_size = 1000;
  std::optional<double> alpha;  // default: alpha_schedule(budget)
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range values.
  void validate() const;
  double effective_alpha() const;
};

void to_json(nlohmann::json& j, const AprilConfig& c);
void from_json(const nlohmann::json& j, AprilConfig& c);
void to_json(nlohmann::json& j, const PreferenceRecord& p);
void from_json(const nlohmann::json& j, PreferenceRecord& p);
void to_json(nlohmann::json& j, const RankerState& r);
void from_json(const nlohmann::json& j, RankerState& r);

/// A cluster with its candidate pool and everything derived from it.
struct PreparedCluster {
  std::shared_ptr<const DocumentCluster> cluster;
  std::shared_ptr<const std::vector<Summary>> pool;
  Eigen::MatrixXd features;    // one row per pool summary
  Eigen::VectorXd hu;          // heuristic score per pool summary
  std::shared_ptr<const UStar> ustar;  // null without references
  Eigen::VectorXd pool_ustar;  // empty without references
  std::uint64_t pool_seed = 0;
  std::vector<std::string> warnings;

  bool has_references() const { return ustar != nullptr; }
  int pool_size() const { return static_cast<int>(features.rows()); }
};

PreparedCluster prepare_cluster(std::shared_ptr<const DocumentCluster> cluster, int pool_size,
                                std::uint64_t seed, const HeuristicParams& hu_params = {});

/// Simulated oracle answering by the pool's U*; the oracle seed is the run seed.
Oracle make_pool_oracle(const PreparedCluster& prepared, OracleSpec spec, std::uint64_t seed);

/// Preference-learning phase driven one query at a time, so the same code
/// serves simulated runs and live sessions.
class AplSession {
 public:
  AplSession(const PreparedCluster& prepared, const AprilConfig& config);
  AplSession(const AplSession&) = delete;
  AplSession& operator=(const AplSession&) = delete;

  int budget() const { return config_.budget; }
  int rounds_done() const { return static_cast<int>(ctx_.answered.size()); }
  int rounds_remaining() const { return std::max(0, budget() - rounds_done()); }
  bool exhausted() const;  // budget spent or no unasked pair left

  /// The pair to show next; stable until answered. Throws Exhausted when
  /// nothing can be asked.
  IndexPair next_query();
  std::optional<IndexPair> pending() const { return pending_; }

  /// Records an answer to the pending query (or to any unasked pair when
  /// replaying a log). Throws InputError for pairs already asked.
  void answer(const PreferenceRecord& pref);

  const std::vector<PreferenceRecord>& preferences() const { return ctx_.answered; }
  const RankerState& ranker_state();
  std::shared_ptr<const BlendedRanker> blended_ranker();
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void refit();

  const PreparedCluster* prepared_;
  AprilConfig config_;
  QueryContext ctx_;
  RankerState state_;
  bool stale_ = false;
  std::optional<IndexPair> pending_;
  std::vector<std::string> warnings_;
};

/// Runs the preference phase against a simulated oracle until the budget
/// is spent or no unasked pair remains.
void run_apl(AplSession& session, Oracle& oracle);

struct MetricBlock {
  std::optional<double> tau;
  std::optional<double> rho;
  std::optional<double> ustar;
  std::optional<RougeScores> rouge;
};

struct SessionRecord {
  std::string session_id;
  std::string cluster_id;
  std::string method = "april";
  AprilConfig config;
  std::vector<PreferenceRecord> preferences;
  RankerState ranker;
  std::optional<Summary> summary;
  MetricBlock metrics;
  std::vector<std::string> warnings;
  std::string status = "querying";  // querying, done, failed
  std::optional<std::string> error;
};

/// JSON form; the summary carries its text and per-sentence attribution.
nlohmann::json record_to_json(const SessionRecord& record, const DocumentCluster* cluster);
SessionRecord record_from_json(const nlohmann::json& j);

/// Kendall tau and Spearman rho of a pool scoring against the U* ranking.
std::pair<double, double> rank_agreement(const PreparedCluster& prepared,
                                         const Eigen::VectorXd& scores);

/// U* and ROUGE of a summary, when references exist.
MetricBlock summary_metrics(const PreparedCluster& prepared, const Summary& summary);

/// Both phases: preference learning against `oracle`, then RL on the
/// blended ranking without further oracle calls. Errors are caught and
/// returned as a failed record holding everything done so far.
SessionRecord april_run(const PreparedCluster& prepared, const AprilConfig& config,
                        Oracle& oracle);
SessionRecord april_run(const PreparedCluster& prepared, const AprilConfig& config);

/// Preference phase only; tau and rho of the blended pool ranking against
/// U*. Throws InputError without references.
std::pair<double, double> apl_eval(const PreparedCluster& prepared, const AprilConfig& config,
                                   Oracle& oracle);
std::pair<double, double> apl_eval(const PreparedCluster& prepared, const AprilConfig& config);

/// Pairwise structured-prediction baseline with `config.budget` rounds;
/// a zero budget uses heuristic pretraining instead.
SessionRecord sppi_session(const PreparedCluster& prepared, const AprilConfig& config);

}  // namespace april
