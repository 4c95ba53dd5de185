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

#include "april/grid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "april/errors.hpp"

namespace april {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- methods

MethodSpec MethodSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ':')) parts.push_back(part);
  if (parts.empty()) throw InputError("empty method");
  MethodSpec m;
  const std::string& head = parts[0];
  if (head == "april") {
    m.kind = Kind::kApril;
    if (parts.size() > 3) throw InputError("bad method '" + text + "'");
    if (parts.size() > 1) m.strategy = parse_strategy(parts[1]);
    if (parts.size() > 2) m.rl = parse_rl(parts[2]);
  } else if (head == "apl") {
    m.kind = Kind::kApl;
    if (parts.size() > 2) throw InputError("bad method '" + text + "'");
    if (parts.size() > 1) m.strategy = parse_strategy(parts[1]);
  } else if (head == "sppi") {
    m.kind = Kind::kSppi;
    if (parts.size() > 1) throw InputError("bad method '" + text + "'");
  } else {
    throw InputError("unknown method '" + text + "' (expected april, apl or sppi)");
  }
  return m;
}

std::string MethodSpec::label() const {
  switch (kind) {
    case Kind::kApril: return "april:" + to_string(strategy) + ":" + to_string(rl);
    case Kind::kApl: return "apl:" + to_string(strategy);
    case Kind::kSppi: return "sppi";
  }
  return "?";
}

// ---------------------------------------------------------------- manifest

void Manifest::validate() const {
  if (cluster_sets.empty()) throw InputError("manifest lists no cluster sets");
  for (const auto& set : cluster_sets) {
    if (set.clusters.empty()) throw InputError("cluster set '" + set.name + "' is empty");
  }
  if (oracles.empty()) throw InputError("manifest lists no oracles");
  if (methods.empty()) throw InputError("manifest lists no methods");
  if (budgets.empty()) throw InputError("manifest lists no budgets");
  if (seeds.empty()) throw InputError("manifest lists no seeds");
  for (int b : budgets) {
    if (b < 0) throw InputError("query budgets must be non-negative");
  }
  for (const auto& o : oracles) {
    if (o.kind == OracleKind::kHuman) throw InputError("grids need simulated oracles");
  }
  if (pool_size < 2) throw InputError("pool_size must be at least 2");
  if (episodes < 1) throw InputError("episodes must be at least 1");
  if (length_budget < 1) throw InputError("length_budget must be positive");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
}

namespace {

std::vector<fs::path> expand_cluster_path(const fs::path& p) {
  if (fs::is_directory(p / "docs")) return {p};
  if (!fs::is_directory(p)) throw InputError("no cluster at '" + p.string() + "'");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(p)) {
    if (entry.is_directory() && fs::is_directory(entry.path() / "docs")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw InputError("no clusters under '" + p.string() + "'");
  return out;
}

}  // namespace

Manifest parse_manifest(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InputError("manifest must be a JSON object");
  Manifest m;
  try {
    for (const auto& [name, paths] : j.at("cluster_sets").items()) {
      ClusterSet set;
      set.name = name;
      for (const auto& p : paths) {
        for (auto& c : expand_cluster_path(base_dir / p.get<std::string>())) {
          set.clusters.push_back(std::move(c));
        }
      }
      m.cluster_sets.push_back(std::move(set));
    }
    for (const auto& o : j.at("oracles")) m.oracles.push_back(OracleSpec::parse(o.get<std::string>()));
    for (const auto& x : j.at("methods")) m.methods.push_back(MethodSpec::parse(x.get<std::string>()));
    m.budgets = j.at("budgets").get<std::vector<int>>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.pool_size = j.value("pool_size", m.pool_size);
    m.episodes = j.value("episodes", m.episodes);
    m.length_budget = j.value("length_budget", m.length_budget);
    if (j.contains("alpha") && !j.at("alpha").is_null()) m.alpha = j.at("alpha").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad manifest: ") + e.what());
  }
  m.validate();
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read manifest '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_manifest(j, path.parent_path());
}

// ---------------------------------------------------------------- running

Stat summarise(const std::vector<double>& values) {
  Stat s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(sq / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

namespace {

struct RunOutcome {
  MetricBlock metrics;
  std::optional<std::string> error;
  double seconds = 0.0;
};

RunOutcome run_one(const PreparedCluster& prepared, const Manifest& manifest,
                   const OracleSpec& oracle, const MethodSpec& method, int budget,
                   std::uint64_t seed) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    AprilConfig cfg;
    cfg.budget = budget;
    cfg.strategy = method.strategy;
    cfg.rl = method.rl;
    cfg.oracle = oracle;
    cfg.episodes = manifest.episodes;
    cfg.pool_size = manifest.pool_size;
    cfg.alpha = manifest.alpha;
    cfg.seed = seed;
    switch (method.kind) {
      case MethodSpec::Kind::kApril:
      case MethodSpec::Kind::kSppi: {
        const SessionRecord r = method.kind == MethodSpec::Kind::kApril
                                    ? april_run(prepared, cfg)
                                    : sppi_session(prepared, cfg);
        out.metrics = r.metrics;
        out.error = r.error;
        break;
      }
      case MethodSpec::Kind::kApl: {
        const auto [tau, rho] = apl_eval(prepared, cfg);
        out.metrics.tau = tau;
        out.metrics.rho = rho;
        break;
      }
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

std::vector<GridRow> run_grid(const Manifest& manifest, const GridOptions& options) {
  manifest.validate();
  const std::size_t n_oracles = manifest.oracles.size();
  const std::size_t n_methods = manifest.methods.size();
  const std::size_t n_budgets = manifest.budgets.size();
  const std::size_t n_seeds = manifest.seeds.size();
  const std::size_t cells_per_set = n_oracles * n_methods * n_budgets;

  // Clusters are loaded once and shared read-only by all jobs.
  std::map<fs::path, std::shared_ptr<const DocumentCluster>> clusters;
  std::map<fs::path, std::string> load_errors;
  for (const auto& set : manifest.cluster_sets) {
    for (const auto& path : set.clusters) {
      if (clusters.count(path) || load_errors.count(path)) continue;
      try {
        clusters[path] = std::make_shared<const DocumentCluster>(
            load_cluster(path, manifest.length_budget));
      } catch (const std::exception& e) {
        load_errors[path] = e.what();
      }
    }
  }

  struct Job {
    std::size_t set;
    std::size_t cluster;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  // outcomes[set][cell][cluster * n_seeds + seed]
  std::vector<std::vector<std::vector<RunOutcome>>> outcomes(manifest.cluster_sets.size());
  for (std::size_t s = 0; s < manifest.cluster_sets.size(); ++s) {
    const std::size_t n_clusters = manifest.cluster_sets[s].clusters.size();
    outcomes[s].assign(cells_per_set, std::vector<RunOutcome>(n_clusters * n_seeds));
    for (std::size_t c = 0; c < n_clusters; ++c) {
      for (std::size_t k = 0; k < n_seeds; ++k) jobs.push_back({s, c, k});
    }
  }

  auto run_job = [&](const Job& job) {
    const fs::path& path = manifest.cluster_sets[job.set].clusters[job.cluster];
    const std::uint64_t seed = manifest.seeds[job.seed];
    const std::size_t slot = job.cluster * n_seeds + job.seed;
    std::optional<PreparedCluster> prepared;
    std::string prepare_error;
    if (auto it = load_errors.find(path); it != load_errors.end()) {
      prepare_error = it->second;
    } else {
      try {
        prepared = prepare_cluster(clusters.at(path), manifest.pool_size, seed);
      } catch (const std::exception& e) {
        prepare_error = e.what();
      }
    }
    std::size_t cell = 0;
    for (std::size_t o = 0; o < n_oracles; ++o) {
      for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t b = 0; b < n_budgets; ++b, ++cell) {
          RunOutcome& out = outcomes[job.set][cell][slot];
          if (!prepared) {
            out.error = prepare_error;
            continue;
          }
          out = run_one(*prepared, manifest, manifest.oracles[o], manifest.methods[m],
                        manifest.budgets[b], seed);
        }
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(options.threads > 0 ? options.threads : hw, std::max<std::size_t>(1, jobs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      run_job(jobs[i]);
      if (options.progress) {
        const Job& job = jobs[i];
        std::lock_guard lock(progress_mu);
        options.progress(manifest.cluster_sets[job.set].clusters[job.cluster].filename().string() +
                         " seed " + std::to_string(manifest.seeds[job.seed]));
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<GridRow> rows;
  for (std::size_t s = 0; s < manifest.cluster_sets.size(); ++s) {
    std::size_t cell = 0;
    for (std::size_t o = 0; o < n_oracles; ++o) {
      for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t b = 0; b < n_budgets; ++b, ++cell) {
          GridRow row;
          row.cluster_set = manifest.cluster_sets[s].name;
          row.oracle = manifest.oracles[o].label();
          row.method = manifest.methods[m].label();
          row.budget = manifest.budgets[b];
          std::vector<double> tau, rho, ustar, r1, r2, rl, rsu4;
          for (const RunOutcome& out : outcomes[s][cell]) {
            ++row.runs;
            row.wall_seconds += out.seconds;
            if (out.error) {
              ++row.failures;
              if (row.error.empty()) row.error = *out.error;
              continue;
            }
            const MetricBlock& mb = out.metrics;
            if (mb.tau) tau.push_back(*mb.tau);
            if (mb.rho) rho.push_back(*mb.rho);
            if (mb.ustar) ustar.push_back(*mb.ustar);
            if (mb.rouge) {
              r1.push_back(mb.rouge->r1);
              r2.push_back(mb.rouge->r2);
              rl.push_back(mb.rouge->rL);
              rsu4.push_back(mb.rouge->rSU4);
            }
          }
          row.tau = summarise(tau);
          row.rho = summarise(rho);
          row.ustar = summarise(ustar);
          row.r1 = summarise(r1);
          row.r2 = summarise(r2);
          row.rl = summarise(rl);
          row.rsu4 = summarise(rsu4);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------- CSV

namespace {

const char* const kMetricNames[] = {"tau", "rho", "ustar", "r1", "r2", "rl", "rsu4"};

std::vector<Stat*> stats_of(GridRow& row) {
  return {&row.tau, &row.rho, &row.ustar, &row.r1, &row.r2, &row.rl, &row.rsu4};
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("bad number '" + s + "' in results table");
  }
}

}  // namespace

std::string csv_header() {
  std::string h = "cluster_set,oracle,method,budget,runs,failures";
  for (const char* name : kMetricNames) {
    h += std::string(",") + name + "_mean," + name + "_stderr";
  }
  return h + ",error";
}

void write_csv(std::ostream& out, const std::vector<GridRow>& rows) {
  out << csv_header() << "\n";
  for (GridRow row : rows) {
    out << quote(row.cluster_set) << ',' << quote(row.oracle) << ',' << quote(row.method) << ','
        << row.budget << ',' << row.runs << ',' << row.failures;
    for (const Stat* s : stats_of(row)) {
      if (s->n > 0) {
        out << ',' << fixed6(s->mean) << ',' << fixed6(s->stderr_);
      } else {
        out << ",,";
      }
    }
    out << ',' << quote(row.error) << "\n";
  }
}

std::vector<GridRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty results table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw InputError("results table has unexpected columns");
  const std::size_t n_fields = split_csv_line(line).size();
  std::vector<GridRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != n_fields) throw InputError("results row has " + std::to_string(f.size()) + " fields");
    GridRow row;
    row.cluster_set = f[0];
    row.oracle = f[1];
    row.method = f[2];
    row.budget = static_cast<int>(parse_number(f[3]));
    row.runs = static_cast<int>(parse_number(f[4]));
    row.failures = static_cast<int>(parse_number(f[5]));
    std::size_t k = 6;
    for (Stat* s : stats_of(row)) {
      if (!f[k].empty()) {
        s->mean = parse_number(f[k]);
        s->stderr_ = parse_number(f[k + 1]);
        s->n = row.runs - row.failures;
      }
      k += 2;
    }
    row.error = f[k];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_timings(std::ostream& out, const std::vector<GridRow>& rows) {
  out << "cluster_set,oracle,method,budget,runs,wall_seconds\n";
  for (const GridRow& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", row.wall_seconds);
    out << quote(row.cluster_set) << ',' << quote(row.oracle) << ',' << quote(row.method) << ','
        << row.budget << ',' << row.runs << ',' << buf << "\n";
  }
}

// ---------------------------------------------------------------- Markdown

namespace {

std::string cell(const Stat& s, bool three_places) {
  if (s.n == 0) return "–";
  char buf[64];
  std::snprintf(buf, sizeof(buf), three_places ? "%.3f" : "%.2f", s.mean);
  return buf;
}

bool ranking_only(const std::string& method) { return method.rfind("apl", 0) == 0; }

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

std::string markdown_report(const std::vector<GridRow>& rows) {
  std::vector<std::string> sets;
  for (const auto& r : rows) push_unique(sets, r.cluster_set);
  std::ostringstream md;
  md << "# Results\n";
  for (const auto& set : sets) {
    std::vector<int> budgets;
    std::vector<std::string> oracles;
    std::vector<std::string> methods;
    for (const auto& r : rows) {
      if (r.cluster_set != set) continue;
      push_unique(budgets, r.budget);
      push_unique(oracles, r.oracle);
      push_unique(methods, r.method);
    }
    md << "\n## Cluster set `" << set << "`\n";
    for (int budget : budgets) {
      md << "\n### Query budget T = " << budget << "\n\n| Oracle |";
      std::string rule = "| --- |";
      for (const auto& m : methods) {
        if (ranking_only(m)) {
          md << ' ' << m << " τ | " << m << " ρ |";
          rule += " ---: | ---: |";
        } else {
          md << ' ' << m << " U* | " << m << " R1 | " << m << " R2 | " << m << " RSU4 |";
          rule += " ---: | ---: | ---: | ---: |";
        }
      }
      md << "\n" << rule << "\n";
      for (const auto& oracle : oracles) {
        md << "| " << oracle << " |";
        for (const auto& m : methods) {
          const GridRow* row = nullptr;
          for (const auto& r : rows) {
            if (r.cluster_set == set && r.budget == budget && r.oracle == oracle && r.method == m) {
              row = &r;
            }
          }
          const int cols = ranking_only(m) ? 2 : 4;
          if (row == nullptr) {
            for (int c = 0; c < cols; ++c) md << " |";
            continue;
          }
          if (ranking_only(m)) {
            md << ' ' << cell(row->tau, true) << " | " << cell(row->rho, true) << " |";
          } else {
            md << ' ' << cell(row->ustar, false) << " | " << cell(row->r1, true) << " | "
               << cell(row->r2, true) << " | " << cell(row->rsu4, true) << " |";
          }
        }
        md << "\n";
      }
    }
    int failures = 0;
    for (const auto& r : rows) {
      if (r.cluster_set == set) failures += r.failures;
    }
    if (failures > 0) md << "\n" << failures << " run(s) failed; see the error column of the CSV.\n";
  }
  return md.str();
}

}  // namespace april
