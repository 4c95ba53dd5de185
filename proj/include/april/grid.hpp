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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "april/oracle.hpp"
#include "april/pipeline.hpp"
#include "april/querystrat.hpp"
#include "april/rlagents.hpp"

namespace april {

/// One compared system. Textual forms: "april[:strategy[:rl]]" (both
/// phases, defaults unc and td), "apl[:strategy]" (ranking quality of the
/// preference phase only) and "sppi".
struct MethodSpec {
  enum class Kind { kApril, kApl, kSppi };
  Kind kind = Kind::kApril;
  Strategy strategy = Strategy::kUnc;
  RlAlgorithm rl = RlAlgorithm::kTd;

  static MethodSpec parse(const std::string& text);
  /// Canonical text, e.g. "april:unc:td", "apl:sbt", "sppi".
  std::string label() const;
};

struct ClusterSet {
  std::string name;
  std::vector<std::filesystem::path> clusters;
};

/// Experiment description, read from a JSON file:
///
///   {
///     "cluster_sets": {"synth": ["../fixtures/synth-01", "../fixtures"]},
///     "oracles": ["PO", "CNO-0.1", "LNO-1"],
///     "methods": ["april:unc:td", "sppi", "apl:rnd"],
///     "budgets": [10, 100],
///     "seeds": [0, 1, 2, 3, 4],
///     "pool_size": 1000, "episodes": 5000, "length_budget": 100,
///     "alpha": null
///   }
///
/// Cluster paths are relative to the manifest. A path without a docs/
/// folder stands for all its sub-folders that have one, in name order.
struct Manifest {
  std::vector<ClusterSet> cluster_sets;
  std::vector<OracleSpec> oracles;
  std::vector<MethodSpec> methods;
  std::vector<int> budgets;
  std::vector<std::uint64_t> seeds;
  int pool_size = 1000;
  int episodes = 5000;
  int length_budget = kDefaultBudget;
  std::optional<double> alpha;

  /// Throws InputError on empty lists or bad values.
  void validate() const;
};

Manifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Mean and standard error over the runs of a cell that produced the metric.
struct Stat {
  int n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stat summarise(const std::vector<double>& values);

/// One results row: a (cluster set, oracle, method, budget) cell averaged
/// over its clusters and seeds.
struct GridRow {
  std::string cluster_set;
  std::string oracle;
  std::string method;
  int budget = 0;
  int runs = 0;
  int failures = 0;
  Stat tau, rho, ustar, r1, r2, rl, rsu4;
  std::string error;          // first failure message, if any
  double wall_seconds = 0.0;  // total over the cell's runs; kept out of the CSV
};

struct GridOptions {
  int threads = 0;  // 0: one per hardware thread
  std::function<void(const std::string&)> progress;  // optional, called per job
};

/// Runs every cell. Jobs (cluster, seed) run in parallel; rows come back in
/// manifest order regardless of execution order. A failed run is counted
/// in its row and the grid carries on.
std::vector<GridRow> run_grid(const Manifest& manifest, const GridOptions& options = {});

/// Results table. Columns, in order: cluster_set, oracle, method, budget,
/// runs, failures, then mean and stderr of tau, rho, ustar, r1, r2, rl,
/// rsu4, then error. Numbers use six decimals; missing metrics are empty.
void write_csv(std::ostream& out, const std::vector<GridRow>& rows);
std::vector<GridRow> read_csv(std::istream& in);
std::string csv_header();

/// Wall time per cell: cluster_set, oracle, method, budget, runs,
/// wall_seconds.
void write_timings(std::ostream& out, const std::vector<GridRow>& rows);

/// One table per cluster set and budget: oracles as rows, methods as
/// columns (tau and rho for ranking-only methods, U* and ROUGE otherwise).
std::string markdown_report(const std::vector<GridRow>& rows);

}  // namespace april
