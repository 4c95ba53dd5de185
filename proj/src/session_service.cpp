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

#include "april/session_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "april/errors.hpp"

namespace april {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- catalog

ClusterCatalog::ClusterCatalog(fs::path root, int length_budget)
    : root_(std::move(root)), length_budget_(length_budget) {
  if (!fs::is_directory(root_)) {
    throw InputError("cluster directory '" + root_.string() + "' does not exist");
  }
}

std::vector<std::string> ClusterCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::is_directory(entry.path() / "docs")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const DocumentCluster> ClusterCatalog::get(const std::string& id) {
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const auto ids_now = ids();
  if (id.empty() || std::find(ids_now.begin(), ids_now.end(), id) == ids_now.end()) {
    throw ServiceError(404, "unknown_cluster", "no cluster named '" + id + "'");
  }
  auto cluster = std::make_shared<const DocumentCluster>(load_cluster(root_ / id, length_budget_));
  cache_[id] = cluster;
  return cluster;
}

// ---------------------------------------------------------------- store

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path SessionStore::log_path(const std::string& id) const { return dir_ / (id + ".jsonl"); }
fs::path SessionStore::snapshot_path(const std::string& id) const {
  return dir_ / (id + ".json");
}

void SessionStore::append(const std::string& id, const json& event) {
  std::ofstream out(log_path(id), std::ios::app);
  out << event.dump() << "\n";
  out.flush();
  if (!out) throw InputError("cannot write session log for '" + id + "'");
}

void SessionStore::write_snapshot(const std::string& id, const json& record) {
  const fs::path tmp = dir_ / (id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << record.dump(2) << "\n";
    if (!out) throw InputError("cannot write session snapshot for '" + id + "'");
  }
  fs::rename(tmp, snapshot_path(id));
}

std::vector<std::string> SessionStore::session_ids() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<json> SessionStore::events(const std::string& id) const {
  std::ifstream in(log_path(id));
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception&) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // torn tail
      throw InputError("corrupt event in session log '" + id + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------- manager

struct SessionManager::Session {
  std::mutex mu;
  std::string id;
  std::string cluster_id;
  AprilConfig config;
  std::shared_ptr<const DocumentCluster> cluster;
  std::unique_ptr<PreparedCluster> prepared;
  std::unique_ptr<AplSession> apl;
  std::optional<Summary> summary;
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point served_at;
};

namespace {

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "s%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

std::string query_id(int round) { return "q" + std::to_string(round); }

json summary_view(const DocumentCluster& cluster, const Summary& s) {
  json sentences = json::array();
  for (int id : s.sentence_ids) {
    const Sentence& sent = cluster.sentences[static_cast<std::size_t>(id)];
    sentences.push_back({{"sentence_id", id},
                         {"doc_id", sent.doc_id},
                         {"document", cluster.documents[static_cast<std::size_t>(sent.doc_id)]},
                         {"position", sent.position},
                         {"text", sent.text}});
  }
  return {{"summary_text", summary_text(cluster, s)},
          {"token_count", s.token_count},
          {"sentences", std::move(sentences)}};
}

}  // namespace

SessionManager::SessionManager(std::shared_ptr<ClusterCatalog> catalog, fs::path store_dir)
    : catalog_(std::move(catalog)), store_(std::move(store_dir)) {}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::build(const std::string& id,
                                                               const std::string& cluster_id,
                                                               const AprilConfig& config) {
  auto s = std::make_shared<Session>();
  s->id = id;
  s->cluster_id = cluster_id;
  s->config = config;
  s->cluster = catalog_->get(cluster_id);
  s->prepared = std::make_unique<PreparedCluster>(
      prepare_cluster(s->cluster, config.pool_size, config.seed));
  s->apl = std::make_unique<AplSession>(*s->prepared, config);
  return s;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown_session", "no session '" + id + "'");
  return it->second;
}

json SessionManager::snapshot(Session& s) const {
  SessionRecord r;
  r.session_id = s.id;
  r.cluster_id = s.cluster_id;
  r.config = s.config;
  r.preferences = s.apl->preferences();
  r.ranker = s.apl->ranker_state();
  r.summary = s.summary;
  if (s.summary) r.metrics = summary_metrics(*s.prepared, *s.summary);
  r.warnings = s.prepared->warnings;
  r.warnings.insert(r.warnings.end(), s.apl->warnings().begin(), s.apl->warnings().end());
  r.warnings.insert(r.warnings.end(), s.warnings.begin(), s.warnings.end());
  r.status = s.summary ? "done" : "querying";
  return record_to_json(r, s.cluster.get());
}

int SessionManager::restore() {
  int restored = 0;
  for (const auto& id : store_.session_ids()) {
    const auto events = store_.events(id);
    if (events.empty() || events.front().value("event", "") != "created") continue;
    const json& created = events.front();
    auto s = build(id, created.at("cluster_id").get<std::string>(),
                   created.at("config").get<AprilConfig>());
    for (std::size_t k = 1; k < events.size(); ++k) {
      const json& e = events[k];
      const std::string kind = e.value("event", "");
      if (kind == "preference") {
        s->apl->answer(e.at("record").get<PreferenceRecord>());
      } else if (kind == "trained") {
        Summary summary;
        summary.sentence_ids = e.at("sentence_ids").get<std::vector<int>>();
        summary.token_count = e.at("token_count").get<int>();
        s->summary = std::move(summary);
      }
    }
    {
      std::lock_guard lock(mu_);
      sessions_[id] = s;
    }
    ++restored;
  }
  return restored;
}

json SessionManager::create(const json& body) {
  if (!body.is_object() || !body.contains("cluster_id") || !body.at("cluster_id").is_string()) {
    throw ServiceError(400, "bad_request", "body needs a string cluster_id");
  }
  const std::string cluster_id = body.at("cluster_id").get<std::string>();
  json cfg_json = body.value("config", json::object());
  if (!cfg_json.is_object()) throw ServiceError(400, "bad_request", "config must be an object");
  cfg_json["oracle"] = "HUMAN";
  AprilConfig config;
  try {
    config = cfg_json.get<AprilConfig>();
  } catch (const json::exception& e) {
    throw ServiceError(400, "bad_config", e.what());
  } catch (const InputError& e) {
    throw ServiceError(400, "bad_config", e.what());
  }
  const std::string id = new_session_id();
  std::shared_ptr<Session> s;
  try {
    s = build(id, cluster_id, config);
  } catch (const InputError& e) {
    throw ServiceError(422, "bad_cluster", e.what());
  }
  store_.append(id, {{"event", "created"}, {"cluster_id", cluster_id}, {"config", config}});
  {
    std::lock_guard lock(s->mu);
    store_.write_snapshot(id, snapshot(*s));
  }
  {
    std::lock_guard lock(mu_);
    sessions_[id] = s;
  }
  return {{"session_id", id}};
}

json SessionManager::query(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->summary) throw ServiceError(409, "session_finished", "session already trained");
  const bool fresh = !s->apl->pending().has_value();
  IndexPair pair;
  try {
    pair = s->apl->next_query();
  } catch (const Exhausted& e) {
    throw ServiceError(409, "budget_exhausted", e.what());
  }
  if (fresh) s->served_at = std::chrono::steady_clock::now();
  const auto& pool = *s->prepared->pool;
  json left = summary_view(*s->cluster, pool[static_cast<std::size_t>(pair.first)]);
  json right = summary_view(*s->cluster, pool[static_cast<std::size_t>(pair.second)]);
  left["pool_index"] = pair.first;
  right["pool_index"] = pair.second;
  return {{"query_id", query_id(s->apl->rounds_done())},
          {"round", s->apl->rounds_done()},
          {"budget", s->apl->budget()},
          {"rounds_remaining", s->apl->rounds_remaining()},
          {"left", std::move(left)},
          {"right", std::move(right)}};
}

json SessionManager::prefer(const std::string& id, const json& body) {
  if (!body.is_object() || !body.contains("query_id") || !body.at("query_id").is_string() ||
      !body.contains("preferred") || !body.at("preferred").is_string()) {
    throw ServiceError(400, "bad_request", "body needs string query_id and preferred");
  }
  const std::string preferred = body.at("preferred").get<std::string>();
  if (preferred != "left" && preferred != "right") {
    throw ServiceError(400, "bad_request", "preferred must be \"left\" or \"right\"");
  }
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->summary) throw ServiceError(409, "session_finished", "session already trained");
  const auto pending = s->apl->pending();
  const std::string expected = query_id(s->apl->rounds_done());
  if (!pending || body.at("query_id").get<std::string>() != expected) {
    throw ServiceError(409, "stale_query",
                       "query '" + body.at("query_id").get<std::string>() +
                           "' is not the open query; fetch the current one");
  }
  PreferenceRecord rec;
  rec.round = s->apl->rounds_done();
  rec.left_id = pending->first;
  rec.right_id = pending->second;
  rec.preferred = preferred == "left" ? Side::kLeft : Side::kRight;
  rec.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - s->served_at)
                       .count();
  store_.append(id, {{"event", "preference"}, {"query_id", expected}, {"record", rec}});
  s->apl->answer(rec);
  store_.write_snapshot(id, snapshot(*s));
  return {{"accepted", true}, {"rounds_remaining", s->apl->rounds_remaining()}};
}

json SessionManager::train(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (!s->summary) {
    TrainConfig cfg;
    cfg.episodes = s->config.episodes;
    cfg.seed = s->config.seed;
    TrainResult result;
    try {
      result = rl_train(s->config.rl, *s->cluster, ranker_reward(s->apl->blended_ranker()), cfg);
    } catch (const NumericalError& e) {
      throw ServiceError(500, "training_failed", e.what());
    }
    s->warnings.insert(s->warnings.end(), result.warnings.begin(), result.warnings.end());
    store_.append(id, {{"event", "trained"},
                       {"sentence_ids", result.summary.sentence_ids},
                       {"token_count", result.summary.token_count}});
    s->summary = std::move(result.summary);
    store_.write_snapshot(id, snapshot(*s));
  }
  return {{"status", "done"}};
}

json SessionManager::summary(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (!s->summary) throw ServiceError(409, "not_trained", "train the session first");
  return summary_view(*s->cluster, *s->summary);
}

json SessionManager::record(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return snapshot(*s);
}

// ---------------------------------------------------------------- HTTP

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const InputError& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ServiceError(400, "bad_json", e.what());
  }
}

}  // namespace

SessionService::SessionService(std::shared_ptr<SessionManager> manager)
    : manager_(std::move(manager)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

SessionService::~SessionService() { stop(); }

void SessionService::install_routes() {
  auto& m = manager_;
  server_->Post("/sessions", guarded([m](const httplib::Request& req, httplib::Response& res) {
                  send_json(res, 201, m->create(parse_body(req)));
                }));
  server_->Get(R"(/sessions/([^/]+)/query)",
               guarded([m](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, m->query(req.matches[1]));
               }));
  server_->Post(R"(/sessions/([^/]+)/preference)",
                guarded([m](const httplib::Request& req, httplib::Response& res) {
                  send_json(res, 200, m->prefer(req.matches[1], parse_body(req)));
                }));
  server_->Post(R"(/sessions/([^/]+)/train)",
                guarded([m](const httplib::Request& req, httplib::Response& res) {
                  send_json(res, 200, m->train(req.matches[1]));
                }));
  server_->Get(R"(/sessions/([^/]+)/summary)",
               guarded([m](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, m->summary(req.matches[1]));
               }));
  server_->Get(R"(/sessions/([^/]+))",
               guarded([m](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, m->record(req.matches[1]));
               }));
}

int SessionService::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) :
                    (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw InputError("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void SessionService::run(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw InputError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void SessionService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace april
