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

#include "april/pipeline.hpp"

#include "april/errors.hpp"
#include "april/sppi.hpp"

namespace april {

using nlohmann::json;

// ---------------------------------------------------------------- config

void AprilConfig::validate() const {
  if (budget < 0) throw InputError("query budget must be non-negative");
  if (pool_size < 2) throw InputError("pool size must be at least 2");
  if (episodes < 1) throw InputError("episodes must be at least 1");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  oracle.validate();
}

double AprilConfig::effective_alpha() const { return alpha ? *alpha : alpha_schedule(budget); }

void to_json(json& j, const AprilConfig& c) {
  j = json{{"budget", c.budget},
           {"strategy", to_string(c.strategy)},
           {"oracle", c.oracle.label()},
           {"rl", to_string(c.rl)},
           {"episodes", c.episodes},
           {"pool_size", c.pool_size},
           {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
           {"seed", c.seed}};
}

void from_json(const json& j, AprilConfig& c) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  AprilConfig out;
  out.budget = j.value("budget", out.budget);
  if (j.contains("strategy")) out.strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (j.contains("oracle")) out.oracle = OracleSpec::parse(j.at("oracle").get<std::string>());
  if (j.contains("rl")) out.rl = parse_rl(j.at("rl").get<std::string>());
  out.episodes = j.value("episodes", out.episodes);
  out.pool_size = j.value("pool_size", out.pool_size);
  if (j.contains("alpha") && !j.at("alpha").is_null()) out.alpha = j.at("alpha").get<double>();
  out.seed = j.value("seed", out.seed);
  out.validate();
  c = out;
}

void to_json(json& j, const PreferenceRecord& p) {
  j = json{{"round", p.round},
           {"left_id", p.left_id},
           {"right_id", p.right_id},
           {"preferred", p.preferred == Side::kLeft ? "left" : "right"}};
  if (p.latency_ms) j["latency_ms"] = *p.latency_ms;
}

void from_json(const json& j, PreferenceRecord& p) {
  p.round = j.at("round").get<int>();
  p.left_id = j.at("left_id").get<int>();
  p.right_id = j.at("right_id").get<int>();
  const auto side = j.at("preferred").get<std::string>();
  if (side != "left" && side != "right") throw InputError("preferred must be left or right");
  p.preferred = side == "left" ? Side::kLeft : Side::kRight;
  if (j.contains("latency_ms") && !j.at("latency_ms").is_null()) {
    p.latency_ms = j.at("latency_ms").get<std::int64_t>();
  } else {
    p.latency_ms.reset();
  }
}

void to_json(json& j, const RankerState& r) {
  j = json{{"alpha", r.alpha},
           {"learn_rate", r.learn_rate},
           {"epochs", r.epochs},
           {"warm_start", r.warm_start},
           {"w", std::vector<double>(r.w.begin(), r.w.end())}};
}

void from_json(const json& j, RankerState& r) {
  r.alpha = j.at("alpha").get<double>();
  r.learn_rate = j.at("learn_rate").get<double>();
  r.epochs = j.at("epochs").get<int>();
  r.warm_start = j.at("warm_start").get<bool>();
  const auto w = j.at("w").get<std::vector<double>>();
  r.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

// ---------------------------------------------------------------- pool

PreparedCluster prepare_cluster(std::shared_ptr<const DocumentCluster> cluster, int pool_size,
                                std::uint64_t seed, const HeuristicParams& hu_params) {
  if (!cluster) throw InputError("no cluster given");
  PreparedCluster out;
  out.cluster = cluster;
  out.pool_seed = seed;
  auto pool = std::make_shared<std::vector<Summary>>(
      sample_pool(*cluster, pool_size, seed, &out.warnings));
  if (pool->size() < 2) {
    throw InputError("cluster '" + cluster->cluster_id + "' yields fewer than 2 distinct summaries");
  }
  out.features = pool_features(*cluster, *pool);
  out.hu = pool_hu(*cluster, *pool, hu_params);
  if (!cluster->references.empty()) {
    auto ustar = std::make_shared<UStar>(*cluster);
    out.pool_ustar.resize(static_cast<Eigen::Index>(pool->size()));
    for (std::size_t i = 0; i < pool->size(); ++i) {
      out.pool_ustar(static_cast<Eigen::Index>(i)) = (*ustar)((*pool)[i]);
    }
    out.ustar = std::move(ustar);
  }
  out.pool = std::move(pool);
  return out;
}

Oracle make_pool_oracle(const PreparedCluster& prepared, OracleSpec spec, std::uint64_t seed) {
  if (spec.kind == OracleKind::kHuman) {
    throw UnsupportedHere("human preferences are collected by the session service");
  }
  if (!prepared.has_references()) {
    throw InputError("simulated users need reference summaries");
  }
  spec.seed = seed;
  Eigen::VectorXd utility = prepared.pool_ustar;
  return Oracle(spec, [utility = std::move(utility)](int i) { return utility(i); });
}

// ---------------------------------------------------------------- APL

AplSession::AplSession(const PreparedCluster& prepared, const AprilConfig& config)
    : prepared_(&prepared), config_(config) {
  config_.validate();
  ctx_.features = &prepared.features;
  ctx_.seed = config.seed;
  ctx_.warnings = &warnings_;
  state_.alpha = config_.effective_alpha();
  state_.w = Eigen::VectorXd::Zero(prepared.features.cols());
}

bool AplSession::exhausted() const {
  const long n = prepared_->pool_size();
  return rounds_done() >= budget() || static_cast<long>(ctx_.asked.size()) >= n * (n - 1) / 2;
}

void AplSession::refit() {
  state_ = bt_fit(state_, ctx_.answered, prepared_->features);
  stale_ = false;
}

IndexPair AplSession::next_query() {
  if (pending_) return *pending_;
  if (rounds_done() >= budget()) throw Exhausted("query budget spent");
  // Only the score-driven strategies read the current weights; the others
  // skip refitting, which leaves the final ranker unchanged since every fit
  // restarts from zero on the full preference set.
  if (stale_ && (config_.strategy == Strategy::kUnc || config_.strategy == Strategy::kSbt)) {
    refit();
  }
  ctx_.w = state_.w;
  ctx_.round = rounds_done();
  pending_ = select_pair(config_.strategy, ctx_);
  return *pending_;
}

void AplSession::answer(const PreferenceRecord& pref) {
  const int n = prepared_->pool_size();
  if (pref.left_id < 0 || pref.right_id < 0 || pref.left_id >= n || pref.right_id >= n ||
      pref.left_id == pref.right_id) {
    throw InputError("preference refers to an invalid pair");
  }
  if (ctx_.asked.contains(pref.left_id, pref.right_id)) {
    throw InputError("pair already answered");
  }
  if (rounds_done() >= budget()) throw InputError("query budget spent");
  ctx_.record(pref);
  pending_.reset();
  stale_ = true;
}

const RankerState& AplSession::ranker_state() {
  if (stale_) refit();
  return state_;
}

std::shared_ptr<const BlendedRanker> AplSession::blended_ranker() {
  const RankerState& state = ranker_state();
  return std::make_shared<BlendedRanker>(*prepared_->cluster, state.w, state.alpha,
                                         prepared_->features, prepared_->hu);
}

void run_apl(AplSession& session, Oracle& oracle) {
  while (!session.exhausted()) {
    IndexPair pair;
    try {
      pair = session.next_query();
    } catch (const Exhausted&) {
      break;
    }
    session.answer(oracle.respond(session.rounds_done(), pair.first, pair.second));
  }
}

// ---------------------------------------------------------------- records

namespace {

json summary_json(const Summary& s, const DocumentCluster* cluster) {
  json j{{"sentence_ids", s.sentence_ids}, {"token_count", s.token_count}};
  if (cluster != nullptr) {
    j["summary_text"] = summary_text(*cluster, s);
    json sentences = json::array();
    for (int id : s.sentence_ids) {
      const Sentence& sent = cluster->sentences[static_cast<std::size_t>(id)];
      sentences.push_back({{"sentence_id", id},
                           {"doc_id", sent.doc_id},
                           {"document", cluster->documents[static_cast<std::size_t>(sent.doc_id)]},
                           {"position", sent.position},
                           {"text", sent.text}});
    }
    j["sentences"] = std::move(sentences);
  }
  return j;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json record_to_json(const SessionRecord& r, const DocumentCluster* cluster) {
  json j;
  j["session_id"] = r.session_id;
  j["cluster_id"] = r.cluster_id;
  j["method"] = r.method;
  j["status"] = r.status;
  j["config"] = r.config;
  j["preferences"] = r.preferences;
  j["ranker"] = r.ranker;
  j["summary"] = r.summary ? summary_json(*r.summary, cluster) : json(nullptr);
  json metrics{{"tau", optional_number(r.metrics.tau)},
               {"rho", optional_number(r.metrics.rho)},
               {"ustar", optional_number(r.metrics.ustar)}};
  if (r.metrics.rouge) {
    metrics["rouge"] = {{"r1", r.metrics.rouge->r1},
                        {"r2", r.metrics.rouge->r2},
                        {"rL", r.metrics.rouge->rL},
                        {"rSU4", r.metrics.rouge->rSU4}};
  } else {
    metrics["rouge"] = nullptr;
  }
  j["metrics"] = std::move(metrics);
  j["warnings"] = r.warnings;
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

SessionRecord record_from_json(const json& j) {
  SessionRecord r;
  r.session_id = j.at("session_id").get<std::string>();
  r.cluster_id = j.at("cluster_id").get<std::string>();
  r.method = j.value("method", std::string("april"));
  r.status = j.value("status", std::string("querying"));
  r.config = j.at("config").get<AprilConfig>();
  r.preferences = j.at("preferences").get<std::vector<PreferenceRecord>>();
  r.ranker = j.at("ranker").get<RankerState>();
  if (j.contains("summary") && !j.at("summary").is_null()) {
    Summary s;
    s.sentence_ids = j.at("summary").at("sentence_ids").get<std::vector<int>>();
    s.token_count = j.at("summary").at("token_count").get<int>();
    r.summary = std::move(s);
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    r.metrics.tau = read_optional(m, "tau");
    r.metrics.rho = read_optional(m, "rho");
    r.metrics.ustar = read_optional(m, "ustar");
    if (m.contains("rouge") && !m.at("rouge").is_null()) {
      const json& g = m.at("rouge");
      r.metrics.rouge = RougeScores{g.at("r1").get<double>(), g.at("r2").get<double>(),
                                    g.at("rL").get<double>(), g.at("rSU4").get<double>()};
    }
  }
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

// ---------------------------------------------------------------- runs

std::pair<double, double> rank_agreement(const PreparedCluster& prepared,
                                         const Eigen::VectorXd& scores) {
  if (!prepared.has_references()) throw InputError("ranking evaluation needs references");
  const Ranking learnt{scores};
  const Ranking gold{prepared.pool_ustar};
  return {kendall_tau(learnt, gold), spearman_rho(learnt, gold)};
}

MetricBlock summary_metrics(const PreparedCluster& prepared, const Summary& summary) {
  MetricBlock m;
  if (!prepared.has_references()) return m;
  m.rouge = prepared.ustar->rouge(summary);
  m.ustar = u_star_from(*m.rouge);
  return m;
}

namespace {

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

SessionRecord base_record(const PreparedCluster& prepared, const AprilConfig& config,
                          std::string method) {
  SessionRecord r;
  r.cluster_id = prepared.cluster->cluster_id;
  r.method = std::move(method);
  r.config = config;
  r.warnings = prepared.warnings;
  return r;
}

}  // namespace

SessionRecord april_run(const PreparedCluster& prepared, const AprilConfig& config,
                        Oracle& oracle) {
  SessionRecord record = base_record(prepared, config, "april");
  std::optional<AplSession> session;
  try {
    session.emplace(prepared, config);
    run_apl(*session, oracle);
    record.preferences = session->preferences();
    record.ranker = session->ranker_state();
    const auto ranker = session->blended_ranker();
    if (prepared.has_references()) {
      std::tie(record.metrics.tau, record.metrics.rho) =
          rank_agreement(prepared, ranker->pool_scores());
    }
    TrainConfig train;
    train.episodes = config.episodes;
    train.seed = config.seed;
    TrainResult result = rl_train(config.rl, *prepared.cluster, ranker_reward(ranker), train);
    const MetricBlock m = summary_metrics(prepared, result.summary);
    record.metrics.ustar = m.ustar;
    record.metrics.rouge = m.rouge;
    record.summary = std::move(result.summary);
    append(record.warnings, session->warnings());
    append(record.warnings, oracle.log());
    append(record.warnings, result.warnings);
    record.status = "done";
  } catch (const std::exception& e) {
    if (session) {
      record.preferences = session->preferences();
      append(record.warnings, session->warnings());
    }
    append(record.warnings, oracle.log());
    record.status = "failed";
    record.error = e.what();
  }
  return record;
}

SessionRecord april_run(const PreparedCluster& prepared, const AprilConfig& config) {
  Oracle oracle = make_pool_oracle(prepared, config.oracle, config.seed);
  return april_run(prepared, config, oracle);
}

std::pair<double, double> apl_eval(const PreparedCluster& prepared, const AprilConfig& config,
                                   Oracle& oracle) {
  if (!prepared.has_references()) throw InputError("ranking evaluation needs references");
  AplSession session(prepared, config);
  run_apl(session, oracle);
  return rank_agreement(prepared, session.blended_ranker()->pool_scores());
}

std::pair<double, double> apl_eval(const PreparedCluster& prepared, const AprilConfig& config) {
  Oracle oracle = make_pool_oracle(prepared, config.oracle, config.seed);
  return apl_eval(prepared, config, oracle);
}

SessionRecord sppi_session(const PreparedCluster& prepared, const AprilConfig& config) {
  SessionRecord record = base_record(prepared, config, "sppi");
  try {
    config.validate();
    Oracle oracle = make_pool_oracle(prepared, config.oracle, config.seed);
    SppiState start;
    start.w = Eigen::VectorXd::Zero(prepared.features.cols());
    if (config.budget == 0) start = sppi_pretrain_hu(prepared.features, prepared.hu, config.seed);
    SppiResult result = sppi_run(prepared.features, oracle, config.budget, config.seed, start);
    record.preferences = result.log;
    record.ranker.w = result.state.w;
    record.ranker.alpha = 1.0;
    std::tie(record.metrics.tau, record.metrics.rho) =
        rank_agreement(prepared, prepared.features * result.state.w);
    const Summary& best = (*prepared.pool)[static_cast<std::size_t>(result.best_index)];
    const MetricBlock m = summary_metrics(prepared, best);
    record.metrics.ustar = m.ustar;
    record.metrics.rouge = m.rouge;
    record.summary = best;
    append(record.warnings, oracle.log());
    record.status = "done";
  } catch (const std::exception& e) {
    record.status = "failed";
    record.error = e.what();
  }
  return record;
}

}  // namespace april
