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

#include "april/rlagents.hpp"

#include <Eigen/LU>

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "april/errors.hpp"

namespace april {
namespace {

constexpr std::uint64_t kBehaviourStream = 0x7d01;
constexpr std::uint64_t kLstdInitStream = 0x7d02;
constexpr double kRidge = 1e-9;
constexpr double kMinRcond = 1e-15;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// Draft summary with its raw bigram counts kept up to date, so lookahead
// values of every Insert cost only the inserted sentence's nonzeros.
class Draft {
 public:
  explicit Draft(const DocumentCluster& cluster)
      : cluster_(&cluster),
        counts_(Eigen::VectorXd::Zero(kFeatureDim)),
        used_(static_cast<std::size_t>(cluster.num_sentences()), 0) {}

  const Summary& summary() const { return summary_; }

  void insert(int id) {
    for (const SparseCount& sc : cluster_->sentence_bigrams[static_cast<std::size_t>(id)]) {
      const double c = counts_(sc.index);
      sq_norm_ += 2.0 * c * sc.count + static_cast<double>(sc.count) * sc.count;
      counts_(sc.index) = c + sc.count;
    }
    used_[static_cast<std::size_t>(id)] = 1;
    summary_.sentence_ids.push_back(id);
    summary_.token_count += cluster_->sentence_length(id);
  }

  Eigen::VectorXd psi() const {
    Eigen::VectorXd out(kStateDim);
    if (sq_norm_ > 0.0) {
      out.head(kFeatureDim) = counts_ / std::sqrt(sq_norm_);
    } else {
      out.head(kFeatureDim).setZero();
    }
    out(kFeatureDim) = 1.0;
    out(kFeatureDim + 1) = length_ratio(summary_.token_count);
    return out;
  }

  // Legal actions in legal_actions() order (inserts by id, Terminate last)
  // with their lookahead values. Terminate is encoded as -1.
  void lookahead(const ValueFn& value, std::vector<int>& actions,
                 std::vector<double>& values) const {
    actions.clear();
    values.clear();
    const Eigen::VectorXd& theta = value.theta;
    const double base = theta.head(kFeatureDim).dot(counts_);
    const double bias = theta(kFeatureDim);
    const double len_w = theta(kFeatureDim + 1);
    const int budget = cluster_->length_budget;
    for (int id = 0; id < cluster_->num_sentences(); ++id) {
      if (used_[static_cast<std::size_t>(id)]) continue;
      const int tokens = summary_.token_count + cluster_->sentence_length(id);
      if (tokens > budget) continue;
      double dot = base;
      double sq = sq_norm_;
      for (const SparseCount& sc : cluster_->sentence_bigrams[static_cast<std::size_t>(id)]) {
        dot += theta(sc.index) * sc.count;
        sq += 2.0 * counts_(sc.index) * sc.count + static_cast<double>(sc.count) * sc.count;
      }
      const double phi_term = sq > 0.0 ? dot / std::sqrt(sq) : 0.0;
      actions.push_back(id);
      values.push_back(phi_term + bias + len_w * length_ratio(tokens));
    }
    const double own = sq_norm_ > 0.0 ? base / std::sqrt(sq_norm_) : 0.0;
    actions.push_back(-1);
    values.push_back(own + bias + len_w * length_ratio(summary_.token_count));
  }

 private:
  double length_ratio(int tokens) const {
    return static_cast<double>(tokens) / static_cast<double>(cluster_->length_budget);
  }

  const DocumentCluster* cluster_;
  Eigen::VectorXd counts_;
  double sq_norm_ = 0.0;
  std::vector<char> used_;
  Summary summary_;
};

std::size_t argmax_first(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

std::size_t softmax_pick(const std::vector<double>& values, double temperature, Rng& rng) {
  Eigen::VectorXd logits(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    logits(static_cast<Eigen::Index>(k)) = values[k] / temperature;
  }
  return sample_cdf(softmax_cdf(logits), rng);
}

void check_cluster(const DocumentCluster& cluster) {
  if (cluster.num_sentences() == 0) throw InputError("cluster has no sentences");
  if (cluster.length_budget <= 0) throw InputError("length budget must be positive");
}

// One behaviour-policy episode. `on_step(psi, psi_next, reward, terminal)`
// sees every transition; psi_next is unused on the terminal step.
template <typename OnStep>
double run_episode(const DocumentCluster& cluster, const ValueFn& value, double temperature,
                   const RewardFn& reward, Rng& rng, OnStep&& on_step) {
  Draft draft(cluster);
  Eigen::VectorXd psi = draft.psi();
  std::vector<int> actions;
  std::vector<double> values;
  while (true) {
    draft.lookahead(value, actions, values);
    const int action = actions[softmax_pick(values, temperature, rng)];
    if (action < 0) {
      const double r = reward(draft.summary());
      if (!std::isfinite(r)) throw NumericalError("reward '" + reward.source + "' is not finite");
      on_step(psi, psi, r, true);
      return r;
    }
    draft.insert(action);
    Eigen::VectorXd next = draft.psi();
    on_step(psi, next, 0.0, false);
    psi = std::move(next);
  }
}

}  // namespace

std::string ValueFn::to_text() const {
  std::ostringstream out;
  out << "april-value 1\ntheta " << theta.size();
  for (Eigen::Index k = 0; k < theta.size(); ++k) out << ' ' << format_double(theta(k));
  out << "\n";
  return out.str();
}

ValueFn ValueFn::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string key;
  std::string value;
  in >> key >> value;
  if (key != "april-value" || value != "1") throw InputError("not an april-value v1 record");
  long n = 0;
  in >> key >> n;
  if (!in || key != "theta" || n < 0) throw InputError("bad value record");
  ValueFn out;
  out.theta.resize(n);
  for (long k = 0; k < n; ++k) {
    in >> value;
    double v = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (!in || ec != std::errc() || end != value.data() + value.size()) {
      throw InputError("bad number in value record");
    }
    out.theta(k) = v;
  }
  return out;
}

std::string to_string(RlAlgorithm a) { return a == RlAlgorithm::kTd ? "td" : "lstd"; }

RlAlgorithm parse_rl(const std::string& name) {
  std::string lower = name;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "td") return RlAlgorithm::kTd;
  if (lower == "lstd") return RlAlgorithm::kLstd;
  throw InputError("unknown RL algorithm '" + name + "'");
}

void TrainConfig::validate() const {
  if (episodes < 1) throw InputError("episodes must be at least 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  if (!(step_size > 0.0) || !(step_decay >= 0.0)) throw InputError("bad step size schedule");
  if (!(temperature_start > 0.0) || !(temperature_end > 0.0)) {
    throw InputError("temperatures must be positive");
  }
  if (lstd_solve_every < 1) throw InputError("lstd_solve_every must be at least 1");
}

double TrainConfig::temperature(int episode) const {
  if (episodes <= 1) return temperature_start;
  const double t = static_cast<double>(episode) / static_cast<double>(episodes - 1);
  return temperature_start + (temperature_end - temperature_start) * t;
}

double TrainConfig::step(int episode) const {
  return step_size / (1.0 + step_decay * static_cast<double>(episode));
}

Eigen::VectorXd state_features(const DocumentCluster& cluster, const Summary& draft) {
  Eigen::VectorXd out(kStateDim);
  out.head(kFeatureDim) = featurise(cluster, draft);
  out(kFeatureDim) = 1.0;
  out(kFeatureDim + 1) =
      static_cast<double>(draft.token_count) / static_cast<double>(cluster.length_budget);
  return out;
}

Summary greedy_rollout(const DocumentCluster& cluster, const ValueFn& value) {
  check_cluster(cluster);
  Draft draft(cluster);
  std::vector<int> actions;
  std::vector<double> values;
  while (true) {
    draft.lookahead(value, actions, values);
    const int action = actions[argmax_first(values)];
    if (action < 0) return draft.summary();
    draft.insert(action);
  }
}

Summary softmax_rollout(const DocumentCluster& cluster, const ValueFn& value,
                        double temperature, Rng& rng) {
  check_cluster(cluster);
  if (!(temperature > 0.0)) throw InputError("temperature must be positive");
  Draft draft(cluster);
  std::vector<int> actions;
  std::vector<double> values;
  while (true) {
    draft.lookahead(value, actions, values);
    const int action = actions[softmax_pick(values, temperature, rng)];
    if (action < 0) return draft.summary();
    draft.insert(action);
  }
}

TrainResult td_train(const DocumentCluster& cluster, const RewardFn& reward,
                     const TrainConfig& cfg) {
  cfg.validate();
  check_cluster(cluster);
  TrainResult result;
  result.episode_rewards.reserve(static_cast<std::size_t>(cfg.episodes));
  Rng rng = make_rng(cfg.seed, kBehaviourStream);
  Eigen::VectorXd& theta = result.value.theta;
  Eigen::VectorXd trace(kStateDim);

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    trace.setZero();
    const double step = cfg.step(episode);
    const double r = run_episode(
        cluster, result.value, cfg.temperature(episode), reward, rng,
        [&](const Eigen::VectorXd& psi, const Eigen::VectorXd& next, double reward_now,
            bool terminal) {
          const double v = theta.dot(psi);
          const double v_next = terminal ? 0.0 : theta.dot(next);
          const double delta = reward_now + v_next - v;
          trace = cfg.lambda * trace + psi;
          theta.noalias() += (step * delta) * trace;
        });
    if (!theta.allFinite()) {
      throw NumericalError("TD value weights stopped being finite in episode " +
                           std::to_string(episode));
    }
    result.episode_rewards.push_back(r);
  }
  result.summary = greedy_rollout(cluster, result.value);
  return result;
}

Eigen::MatrixXd lstd_initial_matrix(int dim, Rng& rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) a(k, k) = uniform01(rng);
  return a;
}

namespace {

Eigen::VectorXd lstd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int episode,
                           std::vector<std::string>& warnings) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rcond = lu.rcond();
  Eigen::VectorXd theta;
  if (std::isfinite(rcond) && rcond > kMinRcond) {
    theta = lu.solve(b);
    if (theta.allFinite()) return theta;
  }
  warnings.push_back("episode " + std::to_string(episode) +
                     ": LSTD matrix near singular (rcond " + format_double(rcond) +
                     "), solving with a 1e-9 ridge");
  const Eigen::MatrixXd ridged =
      a + kRidge * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu2(ridged);
  rcond = lu2.rcond();
  if (std::isfinite(rcond) && rcond > kMinRcond) {
    theta = lu2.solve(b);
    if (theta.allFinite()) return theta;
  }
  throw NumericalError("LSTD matrix singular in episode " + std::to_string(episode) +
                       " (reciprocal condition estimate " + format_double(rcond) + ")");
}

}  // namespace

TrainResult lstd_train(const DocumentCluster& cluster, const RewardFn& reward,
                       const TrainConfig& cfg) {
  cfg.validate();
  check_cluster(cluster);
  TrainResult result;
  result.episode_rewards.reserve(static_cast<std::size_t>(cfg.episodes));
  Rng init_rng = make_rng(cfg.seed, kLstdInitStream);
  Eigen::MatrixXd a = lstd_initial_matrix(kStateDim, init_rng);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(kStateDim);
  Rng rng = make_rng(cfg.seed, kBehaviourStream);
  Eigen::VectorXd trace(kStateDim);

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    trace.setZero();
    const double r = run_episode(
        cluster, result.value, cfg.temperature(episode), reward, rng,
        [&](const Eigen::VectorXd& psi, const Eigen::VectorXd& next, double reward_now,
            bool terminal) {
          trace = cfg.lambda * trace + psi;
          if (terminal) {
            a.noalias() += trace * psi.transpose();
          } else {
            a.noalias() += trace * (psi - next).transpose();
          }
          b.noalias() += reward_now * trace;
        });
    result.episode_rewards.push_back(r);
    if ((episode + 1) % cfg.lstd_solve_every == 0 || episode + 1 == cfg.episodes) {
      result.value.theta = lstd_solve(a, b, episode, result.warnings);
    }
  }
  result.summary = greedy_rollout(cluster, result.value);
  return result;
}

TrainResult rl_train(RlAlgorithm algorithm, const DocumentCluster& cluster,
                     const RewardFn& reward, const TrainConfig& cfg) {
  return algorithm == RlAlgorithm::kTd ? td_train(cluster, reward, cfg)
                                       : lstd_train(cluster, reward, cfg);
}

}  // namespace april
