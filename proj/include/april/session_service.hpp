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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "april/corpus.hpp"
#include "april/pipeline.hpp"

namespace httplib {
class Server;
}

namespace april {

/// Request failure with an HTTP status and a machine-readable code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

/// Clusters servable by id: every sub-folder of `root` with a docs/ folder.
/// Loaded on first use and shared read-only.
class ClusterCatalog {
 public:
  ClusterCatalog(std::filesystem::path root, int length_budget = kDefaultBudget);

  std::vector<std::string> ids() const;
  /// Throws ServiceError 404 for unknown ids.
  std::shared_ptr<const DocumentCluster> get(const std::string& id);

 private:
  std::filesystem::path root_;
  int length_budget_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const DocumentCluster>> cache_;
};

/// Append-only event log per session (`<id>.jsonl`) plus a snapshot of
/// the latest record (`<id>.json`, replaced atomically).
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  void append(const std::string& session_id, const nlohmann::json& event);
  void write_snapshot(const std::string& session_id, const nlohmann::json& record);
  std::vector<std::string> session_ids() const;
  /// Events in order; a torn final line is ignored.
  std::vector<nlohmann::json> events(const std::string& session_id) const;
  std::filesystem::path log_path(const std::string& session_id) const;
  std::filesystem::path snapshot_path(const std::string& session_id) const;

 private:
  std::filesystem::path dir_;
};

/// Live preference sessions. Each session is serialised by its own lock;
/// different sessions proceed concurrently.
class SessionManager {
 public:
  SessionManager(std::shared_ptr<ClusterCatalog> catalog, std::filesystem::path store_dir);
  ~SessionManager();

  /// Rebuilds every session found in the store by replaying its log.
  /// Returns the number restored.
  int restore();

  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json query(const std::string& id);
  nlohmann::json prefer(const std::string& id, const nlohmann::json& body);
  nlohmann::json train(const std::string& id);
  nlohmann::json summary(const std::string& id);
  nlohmann::json record(const std::string& id);

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<Session> build(const std::string& id, const std::string& cluster_id,
                                 const AprilConfig& config);
  nlohmann::json snapshot(Session& s) const;

  std::shared_ptr<ClusterCatalog> catalog_;
  SessionStore store_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// HTTP front end over a SessionManager.
class SessionService {
 public:
  explicit SessionService(std::shared_ptr<SessionManager> manager);
  ~SessionService();

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port or throws InputError.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  void install_routes();

  std::shared_ptr<SessionManager> manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace april
