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

#include "april/ranker.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "april/errors.hpp"

namespace april {
namespace {

constexpr int kMaxHalvings = 20;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw InputError("bad number '" + s + "' in ranker state");
  }
  return v;
}

}  // namespace

std::string RankerState::to_text() const {
  std::ostringstream out;
  out << "april-ranker 1\n";
  out << "alpha " << format_double(alpha) << "\n";
  out << "learn_rate " << format_double(learn_rate) << "\n";
  out << "epochs " << epochs << "\n";
  out << "warm_start " << (warm_start ? 1 : 0) << "\n";
  out << "w " << w.size();
  for (Eigen::Index k = 0; k < w.size(); ++k) out << ' ' << format_double(w(k));
  out << "\n";
  return out.str();
}

RankerState RankerState::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string key;
  std::string value;
  in >> key >> value;
  if (key != "april-ranker" || value != "1") {
    throw InputError("not an april-ranker v1 record");
  }
  RankerState state;
  while (in >> key) {
    if (key == "w") {
      long n = 0;
      in >> n;
      if (!in || n < 0) throw InputError("bad weight vector length");
      state.w.resize(n);
      for (long k = 0; k < n; ++k) {
        in >> value;
        state.w(k) = parse_double(value);
      }
    } else {
      in >> value;
      if (key == "alpha") {
        state.alpha = parse_double(value);
      } else if (key == "learn_rate") {
        state.learn_rate = parse_double(value);
      } else if (key == "epochs") {
        state.epochs = static_cast<int>(parse_double(value));
      } else if (key == "warm_start") {
        state.warm_start = value == "1";
      } else {
        throw InputError("unknown ranker field '" + key + "'");
      }
    }
    if (!in) throw InputError("truncated ranker record");
  }
  return state;
}

Eigen::MatrixXd preference_differences(std::span<const PreferenceRecord> prefs,
                                       const Eigen::MatrixXd& features) {
  Eigen::MatrixXd diffs(static_cast<Eigen::Index>(prefs.size()), features.cols());
  for (std::size_t i = 0; i < prefs.size(); ++i) {
    const auto& p = prefs[i];
    if (p.left_id < 0 || p.right_id < 0 || p.left_id >= features.rows() ||
        p.right_id >= features.rows()) {
      throw InputError("preference refers to a summary outside the pool");
    }
    diffs.row(static_cast<Eigen::Index>(i)) = features.row(p.winner()) - features.row(p.loser());
  }
  return diffs;
}

double bt_loss(const Eigen::VectorXd& w, std::span<const PreferenceRecord> prefs,
               const Eigen::MatrixXd& features) {
  return bt_loss(w, preference_differences(prefs, features));
}

RankerState bt_fit(const RankerState& state, std::span<const PreferenceRecord> prefs,
                   const Eigen::MatrixXd& features) {
  RankerState out = state;
  if (!state.warm_start || out.w.size() != features.cols()) {
    out.w = Eigen::VectorXd::Zero(features.cols());
  }
  if (prefs.empty()) return out;

  const Eigen::MatrixXd diffs = preference_differences(prefs, features);
  double step = state.learn_rate;
  Eigen::VectorXd margins = diffs * out.w;
  auto loss_of = [](const Eigen::VectorXd& m) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) loss += softplus(-m(i));
    return loss;
  };
  double loss = loss_of(margins);
  if (!std::isfinite(loss)) throw NumericalError("Bradley-Terry loss is not finite");

  for (int epoch = 0; epoch < state.epochs; ++epoch) {
    const Eigen::VectorXd weights = margins.unaryExpr([](double m) { return -logistic(-m); });
    const Eigen::VectorXd grad = diffs.transpose() * weights;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      Eigen::VectorXd candidate = out.w - step * grad;
      Eigen::VectorXd cand_margins = diffs * candidate;
      const double cand_loss = loss_of(cand_margins);
      if (std::isfinite(cand_loss) && cand_loss <= loss) {
        out.w = std::move(candidate);
        margins = std::move(cand_margins);
        loss = cand_loss;
        accepted = true;
        break;
      }
      if (halving == kMaxHalvings && !std::isfinite(cand_loss)) {
        throw NumericalError("Bradley-Terry loss is not finite at epoch " +
                             std::to_string(epoch));
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return out;
}

double alpha_schedule(int budget) {
  if (budget <= 10) return 0.3;
  if (budget >= 100) return 0.7;
  const double t = (std::log(static_cast<double>(budget)) - std::log(10.0)) /
                   (std::log(100.0) - std::log(10.0));
  return 0.3 + 0.4 * t;
}

Eigen::VectorXd pool_hu(const DocumentCluster& cluster, std::span<const Summary> pool,
                        const HeuristicParams& params) {
  return hu_rank(cluster, pool, params).scores;
}

BlendedRanker::BlendedRanker(const DocumentCluster& cluster, Eigen::VectorXd w, double alpha,
                             Eigen::MatrixXd pool_features, Eigen::VectorXd pool_hu,
                             HeuristicParams hu_params)
    : cluster_(&cluster), w_(std::move(w)), alpha_(alpha), hu_params_(hu_params) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  const Eigen::Index n = pool_features.rows();
  if (n == 0 || pool_hu.size() != n) throw InputError("pool features and HU disagree");
  if (w_.size() != pool_features.cols()) throw InputError("weight dimension mismatch");

  // Pool members go through the same dot product as out-of-pool summaries
  // so a pooled summary reproduces its own score bit for bit.
  Eigen::VectorXd bt(n);
  FeatureVector row(pool_features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    row = pool_features.row(i).transpose();
    bt(i) = w_.dot(row);
  }
  bt_lo_ = bt.minCoeff();
  bt_hi_ = bt.maxCoeff();
  hu_lo_ = pool_hu.minCoeff();
  hu_hi_ = pool_hu.maxCoeff();

  pool_scores_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pool_scores_(i) = alpha_ * minmax(bt(i), bt_lo_, bt_hi_) +
                      (1.0 - alpha_) * minmax(pool_hu(i), hu_lo_, hu_hi_);
  }
  sorted_scores_.assign(pool_scores_.begin(), pool_scores_.end());
  std::sort(sorted_scores_.begin(), sorted_scores_.end());
}

double BlendedRanker::blended(const FeatureVector& phi, double hu) const {
  return alpha_ * minmax(w_.dot(phi), bt_lo_, bt_hi_) +
         (1.0 - alpha_) * minmax(hu, hu_lo_, hu_hi_);
}

double BlendedRanker::blended_score(int pool_index) const {
  if (pool_index < 0 || pool_index >= pool_scores_.size()) {
    throw InputError("pool index " + std::to_string(pool_index) + " out of range");
  }
  return pool_scores_(pool_index);
}

double BlendedRanker::rank_reward(const FeatureVector& phi, double hu) const {
  const double score = blended(phi, hu);
  const auto lower = std::lower_bound(sorted_scores_.begin(), sorted_scores_.end(), score);
  return static_cast<double>(lower - sorted_scores_.begin()) /
         static_cast<double>(sorted_scores_.size());
}

double BlendedRanker::rank_reward(const Summary& summary) const {
  const Eigen::VectorXd counts = bigram_counts(*cluster_, summary);
  const double norm = counts.norm();
  const FeatureVector phi = norm > 0.0 ? FeatureVector(counts / norm) : counts;
  return rank_reward(phi, hu_score_counts(*cluster_, counts, summary.token_count, hu_params_));
}

}  // namespace april
