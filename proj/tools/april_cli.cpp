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

// Command-line front end: cluster inspection, simulated experiments,
// reports and the live session service.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

#include "april/errors.hpp"
#include "april/grid.hpp"
#include "april/pipeline.hpp"
#include "april/session_service.hpp"

namespace {

using nlohmann::json;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> pool_size;
  std::optional<int> budget;  // summary length in tokens
};

april::Manifest manifest_with_overrides(const std::string& path, const GlobalFlags& g) {
  april::Manifest m = april::load_manifest(path);
  if (g.seed) m.seeds = {*g.seed};
  if (g.pool_size) m.pool_size = *g.pool_size;
  if (g.budget) m.length_budget = *g.budget;
  m.validate();
  return m;
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw april::InputError("cannot write '" + path + "'");
  return file;
}

int cmd_ingest(const std::string& dir, const GlobalFlags& g) {
  const auto cluster = std::make_shared<const april::DocumentCluster>(
      april::load_cluster(dir, g.budget.value_or(april::kDefaultBudget)));
  long tokens = 0;
  for (const auto& s : cluster->sentences) tokens += static_cast<long>(s.tokens.size());
  json vocab = json::array();
  for (std::size_t k = 0; k < cluster->vocab.size() && k < 10; ++k) {
    if (cluster->vocab[k].is_sentinel()) break;
    vocab.push_back({{"bigram", cluster->vocab[k].first + " " + cluster->vocab[k].second},
                     {"df", cluster->vocab_df[k]}});
  }
  std::vector<std::string> warnings;
  const auto pool = april::sample_pool(*cluster, g.pool_size.value_or(1000),
                                       g.seed.value_or(0), &warnings);
  json out{{"cluster_id", cluster->cluster_id},
           {"documents", cluster->num_documents()},
           {"sentences", cluster->num_sentences()},
           {"tokens", tokens},
           {"references", cluster->references.size()},
           {"length_budget", cluster->length_budget},
           {"top_bigrams", vocab},
           {"pool_size", pool.size()},
           {"warnings", warnings}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

// Every (cluster, oracle, april method, budget, seed) as one session record
// per line.
int cmd_run(const std::string& path, const std::string& out_path, const GlobalFlags& g) {
  const april::Manifest m = manifest_with_overrides(path, g);
  std::ofstream file;
  std::ostream& out = output(out_path, file);
  int failures = 0;
  for (const auto& set : m.cluster_sets) {
    for (const auto& cpath : set.clusters) {
      const auto cluster = std::make_shared<const april::DocumentCluster>(
          april::load_cluster(cpath, m.length_budget));
      for (std::uint64_t seed : m.seeds) {
        const april::PreparedCluster prepared = april::prepare_cluster(cluster, m.pool_size, seed);
        for (const auto& oracle : m.oracles) {
          for (const auto& method : m.methods) {
            for (int budget : m.budgets) {
              april::AprilConfig cfg;
              cfg.budget = budget;
              cfg.strategy = method.strategy;
              cfg.rl = method.rl;
              cfg.oracle = oracle;
              cfg.episodes = m.episodes;
              cfg.pool_size = m.pool_size;
              cfg.alpha = m.alpha;
              cfg.seed = seed;
              april::SessionRecord r;
              if (method.kind == april::MethodSpec::Kind::kSppi) {
                r = april::sppi_session(prepared, cfg);
              } else if (method.kind == april::MethodSpec::Kind::kApril) {
                r = april::april_run(prepared, cfg);
              } else {
                continue;  // ranking-only methods belong to apl-eval
              }
              r.session_id = set.name + "/" + cluster->cluster_id + "/" + oracle.label() + "/" +
                             method.label() + "/T" + std::to_string(budget) + "/s" +
                             std::to_string(seed);
              if (r.status == "failed") ++failures;
              out << april::record_to_json(r, cluster.get()).dump() << "\n";
            }
          }
        }
      }
    }
  }
  return failures == 0 ? 0 : 1;
}

int write_grid_outputs(const std::vector<april::GridRow>& rows, const std::string& csv_path,
                       const std::string& md_path) {
  {
    std::ofstream file;
    std::ostream& out = output(csv_path, file);
    april::write_csv(out, rows);
  }
  if (!csv_path.empty() && csv_path != "-") {
    std::ofstream timings(csv_path + ".timings.csv");
    april::write_timings(timings, rows);
  }
  if (!md_path.empty()) {
    std::ofstream file;
    output(md_path, file) << april::markdown_report(rows);
  }
  int failures = 0;
  for (const auto& r : rows) failures += r.failures;
  if (failures > 0) std::cerr << failures << " run(s) failed; see the error column\n";
  return 0;
}

april::GridOptions grid_options(int threads, bool quiet) {
  april::GridOptions o;
  o.threads = threads;
  if (!quiet) o.progress = [](const std::string& job) { std::cerr << "done: " << job << "\n"; };
  return o;
}

int cmd_grid(const std::string& path, const std::string& csv_path, const std::string& md_path,
             int threads, bool quiet, const GlobalFlags& g) {
  const april::Manifest m = manifest_with_overrides(path, g);
  return write_grid_outputs(april::run_grid(m, grid_options(threads, quiet)), csv_path, md_path);
}

int cmd_apl_eval(const std::string& path, const std::string& csv_path, int threads, bool quiet,
                 const GlobalFlags& g) {
  april::Manifest m = manifest_with_overrides(path, g);
  std::vector<april::MethodSpec> apl;
  for (const auto& method : m.methods) {
    if (method.kind == april::MethodSpec::Kind::kApl) apl.push_back(method);
  }
  if (apl.empty()) {
    for (const char* s : {"apl:rnd", "apl:sbt", "apl:unc", "apl:jn"}) {
      apl.push_back(april::MethodSpec::parse(s));
    }
  }
  m.methods = apl;
  const auto rows = april::run_grid(m, grid_options(threads, quiet));
  if (!csv_path.empty()) {
    std::ofstream file;
    april::write_csv(output(csv_path, file), rows);
  }
  std::cout << april::markdown_report(rows);
  return 0;
}

int cmd_report(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw april::InputError("cannot read '" + csv_path + "'");
  const auto rows = april::read_csv(in);
  std::ofstream file;
  output(out_path, file) << april::markdown_report(rows);
  return 0;
}

april::SessionService* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

int cmd_serve(const std::string& bind, const std::string& store, const std::string& clusters,
              const GlobalFlags& g) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw april::InputError("--bind expects host:port");
  const std::string host = bind.substr(0, colon);
  const int port = std::stoi(bind.substr(colon + 1));
  auto catalog = std::make_shared<april::ClusterCatalog>(
      clusters, g.budget.value_or(april::kDefaultBudget));
  auto manager = std::make_shared<april::SessionManager>(catalog, store);
  const int restored = manager->restore();
  april::SessionService service(manager);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving " << catalog->ids().size() << " cluster(s) on " << host << ":" << port
            << " (" << restored << " session(s) restored)\n";
  service.run(host, port);
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive extractive summarisation from pairwise preferences"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  GlobalFlags g;
  std::uint64_t seed = 0;
  int pool_size = 0;
  int budget = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Run seed (replaces the manifest's seed list)");
  auto* pool_opt = app.add_option("--pool-size", pool_size, "Candidate pool size")
                       ->check(CLI::Range(2, 1'000'000));
  auto* budget_opt = app.add_option("--budget", budget, "Summary length budget in tokens")
                         ->check(CLI::Range(1, 100'000));

  std::string dir, manifest, csv, md, out, bind = "127.0.0.1:8080", store = "sessions",
                                          clusters = "fixtures";
  int threads = 0;
  bool quiet = false;

  auto* ingest = app.add_subcommand("ingest", "Load a cluster directory and print its statistics");
  ingest->add_option("dir", dir, "Cluster directory (docs/, optional refs/)")->required();

  auto* apl = app.add_subcommand("apl-eval", "Ranking quality of the preference phase only");
  apl->add_option("manifest", manifest, "Experiment manifest (JSON)")->required();
  apl->add_option("--csv", csv, "Also write the results table here");
  apl->add_option("--threads", threads, "Worker threads (0: all cores)");
  apl->add_flag("--quiet", quiet, "No progress output");

  auto* run = app.add_subcommand("run", "Run every configuration once; one JSON record per line");
  run->add_option("manifest", manifest, "Experiment manifest (JSON)")->required();
  run->add_option("--out", out, "Output file (default: stdout)");

  auto* grid = app.add_subcommand("grid", "Run an experiment grid and write the results table");
  grid->add_option("manifest", manifest, "Experiment manifest (JSON)")->required();
  grid->add_option("--out", csv, "Results CSV (wall times go to <out>.timings.csv)")->required();
  grid->add_option("--markdown", md, "Also write a Markdown report here");
  grid->add_option("--threads", threads, "Worker threads (0: all cores)");
  grid->add_flag("--quiet", quiet, "No progress output");

  auto* serve = app.add_subcommand("serve", "Serve live preference sessions over HTTP");
  serve->add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  serve->add_option("--store", store, "Session log directory")->capture_default_str();
  serve->add_option("--clusters", clusters, "Directory of servable clusters")->capture_default_str();

  auto* report = app.add_subcommand("report", "Render a results CSV as Markdown");
  report->add_option("csv", csv, "Results CSV")->required();
  report->add_option("--out", out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;
  if (*pool_opt) g.pool_size = pool_size;
  if (*budget_opt) g.budget = budget;

  try {
    if (*ingest) return cmd_ingest(dir, g);
    if (*apl) return cmd_apl_eval(manifest, csv, threads, quiet, g);
    if (*run) return cmd_run(manifest, out, g);
    if (*grid) return cmd_grid(manifest, csv, md, threads, quiet, g);
    if (*serve) return cmd_serve(bind, store, clusters, g);
    if (*report) return cmd_report(csv, out);
  } catch (const april::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
