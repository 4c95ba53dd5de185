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

#include <algorithm>
#include <cmath>

#include "april/sppi.hpp"
#include "support.hpp"

using namespace april;
using april::testing::gaussian_matrix;

namespace {

// Number of pool items whose utility beats item k.
int items_above(const Eigen::VectorXd& u, int k) {
  return static_cast<int>((u.array() > u(k)).count());
}

}  // namespace

TEST_CASE("SPPI gradient is zero when the sampled pair costs nothing") {
  const Eigen::MatrixXd f = gaussian_matrix(10, 4, 1);
  const GibbsPairSampler sampler(Eigen::VectorXd::Zero(10));
  Rng rng = make_rng(2);
  CHECK(sppi_gradient_estimate(f, sampler, {0, 1}, 0.0, 32, rng).isZero());
}

TEST_CASE("SPPI gradient estimate is unbiased for the exact expected-loss gradient") {
  // Loss of (i, j) is 1 when j has the higher planted utility. The exact
  // gradient of sum_ij p_ij * loss_ij with p_ij ~ exp(w'(phi_i - phi_j)) is
  // sum_ij p_ij * loss_ij * (psi_ij - E_p[psi]).
  const int n = 10;
  const Eigen::MatrixXd f = gaussian_matrix(n, 4, 3);
  const Eigen::VectorXd w = gaussian_matrix(4, 1, 4).col(0) * 0.3;
  const Eigen::VectorXd utility = f * gaussian_matrix(4, 1, 5).col(0);
  const Eigen::VectorXd s = f * w;

  double z = 0.0;
  Eigen::VectorXd mean_psi = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double e = std::exp(s(i) - s(j));
      z += e;
      mean_psi += e * (f.row(i) - f.row(j)).transpose();
    }
  }
  mean_psi /= z;
  Eigen::VectorXd exact = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || utility(j) <= utility(i)) continue;
      const double p = std::exp(s(i) - s(j)) / z;
      exact += p * ((f.row(i) - f.row(j)).transpose() - mean_psi);
    }
  }

  const GibbsPairSampler sampler(s);
  Rng rng = make_rng(6);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  const int rounds = 10000;
  for (int k = 0; k < rounds; ++k) {
    const IndexPair pair = *sampler.sample(rng);
    const double delta = utility(pair.second) > utility(pair.first) ? 1.0 : 0.0;
    sum += sppi_gradient_estimate(f, sampler, pair, delta, 32, rng);
  }
  const Eigen::VectorXd estimate = sum / rounds;
  CAPTURE(exact.transpose());
  CAPTURE(estimate.transpose());
  CHECK((estimate - exact).norm() / exact.norm() <= 0.05);
}

TEST_CASE("SPPI step size schedule") {
  SppiState s;
  CHECK(s.gamma() == 0.1);
  s.t = 90;
  CHECK(s.gamma() == 0.01);
}

TEST_CASE("SPPI argmax: lowest index on ties, so w = 0 picks item 0") {
  const Eigen::MatrixXd f = gaussian_matrix(7, kFeatureDim, 7);
  CHECK(sppi_argmax(f, Eigen::VectorXd::Zero(kFeatureDim)) == 0);
  Eigen::MatrixXd g(3, 1);
  g << 1.0, 3.0, 3.0;
  CHECK(sppi_argmax(g, Eigen::VectorXd::Ones(1)) == 1);
}

TEST_CASE("SPPI with no rounds returns the start state and one oracle-free argmax") {
  const Eigen::MatrixXd f = gaussian_matrix(20, kFeatureDim, 8);
  Oracle oracle(OracleSpec::perfect(), [](int) { return 0.0; });
  const SppiResult r = sppi_run(f, oracle, 0, 1);
  CHECK(r.best_index == 0);
  CHECK(r.log.empty());
  CHECK(oracle.calls() == 0);
}

TEST_CASE("SPPI learns a planted linear utility") {
  // Pool of 100 with a linear utility; after 500 perfect answers the
  // argmax should sit in the top 10% for at least 16 of 20 seeds.
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd f = gaussian_matrix(100, 10, 500 + seed);
    const Eigen::VectorXd u = f * gaussian_matrix(10, 1, 600 + seed).col(0);
    Oracle oracle(OracleSpec::perfect(seed), [&u](int k) { return u(k); });
    SppiState start;
    start.w = Eigen::VectorXd::Zero(10);
    const SppiResult r = sppi_run(f, oracle, 500, seed, start);
    CHECK(r.log.size() == 500);
    CHECK(oracle.calls() == 500);
    CHECK(r.state.t == 500);
    good += items_above(u, r.best_index) < 10 ? 1 : 0;
  }
  CHECK(good >= 16);
}

TEST_CASE("SPPI is deterministic under a seed") {
  const Eigen::MatrixXd f = gaussian_matrix(50, 10, 9);
  const Eigen::VectorXd u = f.col(0);
  SppiState start;
  start.w = Eigen::VectorXd::Zero(10);
  Oracle a(OracleSpec::perfect(), [&u](int k) { return u(k); });
  Oracle b(OracleSpec::perfect(), [&u](int k) { return u(k); });
  const SppiResult ra = sppi_run(f, a, 60, 4, start);
  const SppiResult rb = sppi_run(f, b, 60, 4, start);
  CHECK(ra.state.w == rb.state.w);
  CHECK(ra.best_index == rb.best_index);
  REQUIRE(ra.log.size() == rb.log.size());
  for (std::size_t k = 0; k < ra.log.size(); ++k) {
    CHECK(ra.log[k].left_id == rb.log[k].left_id);
    CHECK(ra.log[k].right_id == rb.log[k].right_id);
  }
}

TEST_CASE("heuristic pretraining points the argmax at high-heuristic items") {
  const Eigen::MatrixXd f = gaussian_matrix(100, kFeatureDim, 10);
  const Eigen::VectorXd hu = f.leftCols(5).rowwise().sum();
  const SppiState s = sppi_pretrain_hu(f, hu, 3);
  CHECK(s.t == 5000);
  CHECK(items_above(hu, sppi_argmax(f, s.w)) < 25);
}
