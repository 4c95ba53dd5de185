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

#include "april/oracle.hpp"

#include <cmath>
#include <sstream>

#include "april/errors.hpp"
#include "april/random.hpp"

namespace april {
namespace {

std::string format_param(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

RougeConfig ustar_config(const DocumentCluster& cluster) {
  RougeConfig config;
  config.truncate_to = cluster.length_budget;
  return config;
}

const DocumentCluster& require_references(const DocumentCluster& cluster) {
  if (cluster.references.empty()) {
    throw InputError("cluster " + cluster.cluster_id + " has no reference summaries");
  }
  return cluster;
}

}  // namespace

OracleSpec OracleSpec::perfect(std::uint64_t seed) {
  return OracleSpec{OracleKind::kPerfect, 0.0, 1.0, seed};
}

OracleSpec OracleSpec::constant_noise(double c, std::uint64_t seed) {
  return OracleSpec{OracleKind::kConstantNoise, c, 1.0, seed};
}

OracleSpec OracleSpec::logistic_noise(double m, std::uint64_t seed) {
  return OracleSpec{OracleKind::kLogisticNoise, 0.0, m, seed};
}

OracleSpec OracleSpec::human() { return OracleSpec{OracleKind::kHuman, 0.0, 1.0, 0}; }

void OracleSpec::validate() const {
  if (kind == OracleKind::kConstantNoise && !(c >= 0.0 && c <= 1.0)) {
    throw InputError("constant-noise oracle needs c in [0, 1]");
  }
  if (kind == OracleKind::kLogisticNoise && !(m > 0.0 && std::isfinite(m))) {
    throw InputError("logistic-noise oracle needs m > 0");
  }
}

std::string OracleSpec::label() const {
  switch (kind) {
    case OracleKind::kPerfect: return "PO";
    case OracleKind::kConstantNoise: return "CNO-" + format_param(c);
    case OracleKind::kLogisticNoise: return "LNO-" + format_param(m);
    case OracleKind::kHuman: return "HUMAN";
  }
  return "?";
}

OracleSpec OracleSpec::parse(const std::string& label) {
  auto param = [&](std::size_t prefix) {
    try {
      std::size_t used = 0;
      const double v = std::stod(label.substr(prefix), &used);
      if (used != label.size() - prefix) throw InputError("");
      return v;
    } catch (const std::exception&) {
      throw InputError("bad oracle label '" + label + "'");
    }
  };
  OracleSpec spec;
  if (label == "PO") {
    spec = perfect();
  } else if (label == "HUMAN") {
    spec = human();
  } else if (label.rfind("CNO-", 0) == 0) {
    spec = constant_noise(param(4));
  } else if (label.rfind("LNO-", 0) == 0) {
    spec = logistic_noise(param(4));
  } else {
    throw InputError("unknown oracle '" + label + "' (expected PO, CNO-<c>, LNO-<m>)");
  }
  spec.validate();
  return spec;
}

double u_star_from(const RougeScores& s) {
  return s.r1 / 0.47 + s.r2 / 0.22 + s.rSU4 / 0.18;
}

UStar::UStar(const DocumentCluster& cluster)
    : cluster_(&require_references(cluster)),
      scorer_(cluster.references, ustar_config(cluster)) {}

RougeScores UStar::rouge(const Summary& summary) const {
  std::vector<int> key = canonical_ids(summary);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const RougeScores scores = scorer_.score_all(summary_tokens(*cluster_, summary));
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(std::move(key), scores);
  return scores;
}

double UStar::operator()(const Summary& summary) const {
  return u_star_from(rouge(summary));
}

double u_star(const DocumentCluster& cluster, const Summary& summary) {
  require_references(cluster);
  return u_star_from(
      rouge_all(summary_tokens(cluster, summary), cluster.references, ustar_config(cluster)));
}

Side simulated_response(const OracleSpec& spec, double u_left, double u_right, int round,
                        std::vector<std::string>* log) {
  Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(round));
  auto perfect = [&] {
    if (u_left == u_right && log != nullptr) {
      log->push_back("round " + std::to_string(round) + ": equal U*, answered left");
    }
    return u_left >= u_right ? Side::kLeft : Side::kRight;
  };
  switch (spec.kind) {
    case OracleKind::kPerfect:
      return perfect();
    case OracleKind::kConstantNoise:
      if (uniform01(rng) < spec.c) {
        return uniform01(rng) < 0.5 ? Side::kLeft : Side::kRight;
      }
      return perfect();
    case OracleKind::kLogisticNoise: {
      const double p_left = 1.0 / (1.0 + std::exp((u_right - u_left) / spec.m));
      return uniform01(rng) < p_left ? Side::kLeft : Side::kRight;
    }
    case OracleKind::kHuman:
      break;
  }
  throw UnsupportedHere("human preferences are collected by the session service");
}

Oracle::Oracle(OracleSpec spec, Utility utility)
    : spec_(spec), utility_(std::move(utility)) {
  spec_.validate();
}

PreferenceRecord Oracle::respond(int round, int left_id, int right_id) {
  if (spec_.kind == OracleKind::kHuman) {
    throw UnsupportedHere("human preferences are collected by the session service");
  }
  if (left_id == right_id) throw InputError("cannot compare a summary with itself");
  ++calls_;
  PreferenceRecord rec;
  rec.round = round;
  rec.left_id = left_id;
  rec.right_id = right_id;
  rec.preferred =
      simulated_response(spec_, utility_(left_id), utility_(right_id), round, &log_);
  return rec;
}

Oracle make_ustar_oracle(const OracleSpec& spec, std::shared_ptr<const UStar> ustar,
                         std::shared_ptr<const std::vector<Summary>> pool) {
  return Oracle(spec, [ustar = std::move(ustar), pool = std::move(pool)](int i) {
    return (*ustar)((*pool)[static_cast<std::size_t>(i)]);
  });
}

}  // namespace april
