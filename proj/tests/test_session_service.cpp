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

#include <atomic>
#include <fstream>
#include <memory>
#include <thread>

#include "april/pipeline.hpp"
#include "april/session_service.hpp"
#include "support.hpp"

// After Eigen: the socket headers define names that clash with its internals.
#include <httplib.h>

using namespace april;
using nlohmann::json;

namespace {

const json kCreateBody = {{"cluster_id", "tiny-01"},
                          {"config", {{"budget", 10}, {"pool_size", 60}, {"episodes", 200}, {"seed", 4}}}};

// A manager over the bundled fixtures plus an HTTP server on a free port.
struct Harness {
  std::shared_ptr<SessionManager> manager;
  std::unique_ptr<SessionService> service;
  std::unique_ptr<httplib::Client> client;

  explicit Harness(const std::filesystem::path& store) {
    auto catalog = std::make_shared<ClusterCatalog>(april::testing::fixture(""));
    manager = std::make_shared<SessionManager>(catalog, store);
    manager->restore();
    service = std::make_unique<SessionService>(manager);
    const int port = service->start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client->Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CAPTURE(res->body);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect) {
    auto res = client->Get(path);
    REQUIRE(res);
    CAPTURE(res->body);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }

  // Answers the open query, always preferring the left summary.
  void answer_one(const std::string& id) {
    const json q = get("/sessions/" + id + "/query", 200);
    post("/sessions/" + id + "/preference", {{"query_id", q["query_id"]}, {"preferred", "left"}}, 200);
  }
};

int count_events(const std::filesystem::path& log, const std::string& kind) {
  std::ifstream in(log);
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && json::parse(line).value("event", "") == kind) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("a full session: create, ten answers, train, summary") {
  Harness h(april::testing::scratch_dir("service-full"));
  const std::string id = h.post("/sessions", kCreateBody, 201)["session_id"];

  const json q = h.get("/sessions/" + id + "/query", 200);
  CHECK(q["query_id"] == "q0");
  CHECK(q["budget"] == 10);
  CHECK(q["left"]["pool_index"] != q["right"]["pool_index"]);
  CHECK_FALSE(q["left"]["sentences"].empty());

  for (int k = 0; k < 10; ++k) h.answer_one(id);
  const json done = h.get("/sessions/" + id + "/query", 409);
  CHECK(done["error"]["code"] == "budget_exhausted");
  h.get("/sessions/" + id + "/summary", 409);

  CHECK(h.post("/sessions/" + id + "/train", json::object(), 200)["status"] == "done");
  const json summary = h.get("/sessions/" + id + "/summary", 200);
  CHECK(summary["token_count"].get<int>() <= 100);
  CHECK_FALSE(summary["sentences"].empty());
  CHECK_FALSE(summary["summary_text"].get<std::string>().empty());

  const json record = h.get("/sessions/" + id, 200);
  CHECK(record["status"] == "done");
  CHECK(record["preferences"].size() == 10);
  CHECK(record["config"]["oracle"] == "HUMAN");
  // The cluster has references, so the summary is scored.
  CHECK(record["metrics"]["ustar"].is_number());
}

TEST_CASE("answers must name the open query") {
  Harness h(april::testing::scratch_dir("service-stale"));
  const std::string id = h.post("/sessions", kCreateBody, 201)["session_id"];
  const json q = h.get("/sessions/" + id + "/query", 200);
  const json body = {{"query_id", q["query_id"]}, {"preferred", "right"}};
  h.post("/sessions/" + id + "/preference", body, 200);
  CHECK(h.post("/sessions/" + id + "/preference", body, 409)["error"]["code"] == "stale_query");
}

TEST_CASE("two simultaneous answers to one query log exactly one preference") {
  const auto store = april::testing::scratch_dir("service-race");
  Harness h(store);
  const std::string id = h.post("/sessions", kCreateBody, 201)["session_id"];
  const json q = h.get("/sessions/" + id + "/query", 200);
  const std::string body = json{{"query_id", q["query_id"]}, {"preferred", "left"}}.dump();
  const int port = h.client->port();
  std::atomic<int> ok{0};
  std::atomic<int> conflict{0};
  std::vector<std::thread> threads;
  for (int k = 0; k < 2; ++k) {
    threads.emplace_back([&] {
      httplib::Client c("127.0.0.1", port);
      auto res = c.Post("/sessions/" + id + "/preference", body, "application/json");
      if (res && res->status == 200) ++ok;
      if (res && res->status == 409) ++conflict;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 1);
  CHECK(count_events(store / (id + ".jsonl"), "preference") == 1);
}

TEST_CASE("sessions survive a restart") {
  const auto store = april::testing::scratch_dir("service-restart");
  std::string id;
  json before;
  {
    Harness h(store);
    id = h.post("/sessions", kCreateBody, 201)["session_id"];
    for (int k = 0; k < 4; ++k) h.answer_one(id);
    h.get("/sessions/" + id + "/query", 200);  // leave a query open
    before = h.get("/sessions/" + id, 200);
  }
  Harness h(store);
  CHECK(h.get("/sessions/" + id, 200) == before);
  const json q = h.get("/sessions/" + id + "/query", 200);
  CHECK(q["query_id"] == "q4");
  CHECK(q["rounds_remaining"] == 6);
  h.answer_one(id);
  CHECK(h.get("/sessions/" + id, 200)["preferences"].size() == 5);
}

TEST_CASE("replaying the logged answers offline reproduces the ranker") {
  const auto store = april::testing::scratch_dir("service-replay");
  Harness h(store);
  const std::string id = h.post("/sessions", kCreateBody, 201)["session_id"];
  for (int k = 0; k < 6; ++k) h.answer_one(id);
  const SessionRecord record = record_from_json(h.get("/sessions/" + id, 200));

  auto cluster = std::make_shared<const DocumentCluster>(load_cluster(april::testing::fixture("tiny-01")));
  const PreparedCluster prepared = prepare_cluster(cluster, record.config.pool_size, record.config.seed);
  AplSession replay(prepared, record.config);
  for (const auto& p : record.preferences) replay.answer(p);
  CHECK(replay.ranker_state().w == record.ranker.w);
}

TEST_CASE("errors carry a status and a code") {
  Harness h(april::testing::scratch_dir("service-errors"));
  CHECK(h.get("/sessions/nope", 404)["error"]["code"] == "unknown_session");
  CHECK(h.get("/sessions/nope/query", 404)["error"]["code"] == "unknown_session");
  CHECK(h.post("/sessions", {{"cluster_id", "no-such-cluster"}}, 404)["error"]["code"] ==
        "unknown_cluster");
  CHECK(h.post("/sessions", {{"config", json::object()}}, 400)["error"]["code"] == "bad_request");
  CHECK(h.post("/sessions", {{"cluster_id", "tiny-01"}, {"config", {{"budget", -3}}}}, 400)["error"]["code"] ==
        "bad_config");

  auto res = h.client->Post("/sessions", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"]["code"] == "bad_json");

  const std::string id = h.post("/sessions", kCreateBody, 201)["session_id"];
  const json q = h.get("/sessions/" + id + "/query", 200);
  CHECK(h.post("/sessions/" + id + "/preference", {{"query_id", q["query_id"]}, {"preferred", "middle"}}, 400)
            ["error"]["code"] == "bad_request");
  h.post("/sessions/" + id + "/train", json::object(), 200);
  CHECK(h.get("/sessions/" + id + "/query", 409)["error"]["code"] == "session_finished");
}
