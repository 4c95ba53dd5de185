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

#include <cmath>

#include "april/errors.hpp"
#include "april/oracle.hpp"
#include "support.hpp"

using namespace april;

namespace {

// Share of answers agreeing with the left item being better.
double left_rate(const OracleSpec& spec, double u_left, double u_right, int n) {
  int left = 0;
  for (int round = 0; round < n; ++round) {
    left += simulated_response(spec, u_left, u_right, round) == Side::kLeft ? 1 : 0;
  }
  return static_cast<double>(left) / n;
}

}  // namespace

TEST_CASE("U* weights: recalls .47, .22, .18 give 3") {
  RougeScores s;
  s.r1 = 0.47;
  s.r2 = 0.22;
  s.rSU4 = 0.18;
  s.rL = 0.9;  // not part of U*
  CHECK(u_star_from(s) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(u_star_from(RougeScores{}) == 0.0);
}

TEST_CASE("U* of a summary equal to the sole reference") {
  const auto c = make_cluster("t",
                              {{"a.txt", "The mill burned on Tuesday night. Nobody was hurt."}},
                              {"The mill burned on Tuesday night."});
  const UStar ustar(c);
  const Summary s = make_summary(c, {0});
  const double expected = 1.0 / 0.47 + 1.0 / 0.22 + 1.0 / 0.18;
  CHECK(ustar(s) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(12.23).epsilon(1e-3));
  CHECK(u_star(c, s) == ustar(s));
  // No overlap at all.
  CHECK(ustar(make_summary(c, {1})) == 0.0);
  CHECK(ustar(Summary{}) == 0.0);
}

TEST_CASE("U* needs references") {
  const auto c = make_cluster("t", {{"a.txt", "Some text here."}}, {});
  CHECK_THROWS_AS(UStar{c}, InputError);
}

TEST_CASE("oracle spec labels round-trip and validate") {
  for (const char* label : {"PO", "CNO-0.1", "CNO-0.3", "LNO-0.3", "LNO-1", "HUMAN"}) {
    CHECK(OracleSpec::parse(label).label() == label);
  }
  CHECK_THROWS_AS(OracleSpec::parse("XYZ"), InputError);
  CHECK_THROWS_AS(OracleSpec::constant_noise(1.5).validate(), InputError);
  CHECK_THROWS_AS(OracleSpec::logistic_noise(0.0).validate(), InputError);
}

TEST_CASE("perfect oracle prefers the higher U* and breaks ties to the left") {
  const auto po = OracleSpec::perfect(3);
  CHECK(simulated_response(po, 2.0, 1.0, 0) == Side::kLeft);
  CHECK(simulated_response(po, 1.0, 2.0, 0) == Side::kRight);
  std::vector<std::string> log;
  CHECK(simulated_response(po, 1.5, 1.5, 4, &log) == Side::kLeft);
  CHECK(log.size() == 1);
}

TEST_CASE("constant noise with c = 0 behaves exactly like the perfect oracle") {
  const auto cno = OracleSpec::constant_noise(0.0, 11);
  const auto po = OracleSpec::perfect(11);
  Rng rng = make_rng(5);
  for (int round = 0; round < 2000; ++round) {
    const double a = uniform01(rng), b = uniform01(rng);
    CHECK(simulated_response(cno, a, b, round) == simulated_response(po, a, b, round));
  }
}

TEST_CASE("constant noise: anti-U* answers at rate c / 2") {
  for (double c : {0.1, 0.3}) {
    const auto spec = OracleSpec::constant_noise(c, 99);
    // Left is better, so right answers are the anti-U* ones.
    const double anti = 1.0 - left_rate(spec, 2.0, 1.0, 100000);
    CHECK(std::abs(anti - c / 2.0) <= 0.01);
  }
}

TEST_CASE("logistic noise follows (1 + exp[(U*_j - U*_i) / m])^-1") {
  for (double m : {0.3, 1.0}) {
    const auto spec = OracleSpec::logistic_noise(m, 17);
    for (double gap : {0.1, 0.5, 1.0}) {
      const double expected = 1.0 / (1.0 + std::exp(-gap / m));
      CHECK(std::abs(left_rate(spec, 1.0 + gap, 1.0, 100000) - expected) <= 0.01);
    }
  }
  // A gap equal to m prefers the better summary with probability 1/(1+e^-1).
  const auto lno = OracleSpec::logistic_noise(0.3, 2);
  CHECK(std::abs(left_rate(lno, 1.3, 1.0, 100000) - 0.731) <= 0.01);
}

TEST_CASE("responses are deterministic in seed and round") {
  const auto spec = OracleSpec::logistic_noise(1.0, 8);
  for (int round = 0; round < 50; ++round) {
    CHECK(simulated_response(spec, 1.2, 1.0, round) == simulated_response(spec, 1.2, 1.0, round));
  }
}

TEST_CASE("Oracle over a pool: records, call counts, errors") {
  const std::vector<double> u{0.5, 2.0, 1.0};
  Oracle oracle(OracleSpec::perfect(), [&](int i) { return u[static_cast<std::size_t>(i)]; });
  const PreferenceRecord r = oracle.respond(0, 0, 1);
  CHECK(r.preferred == Side::kRight);
  CHECK(r.winner() == 1);
  CHECK(r.loser() == 0);
  CHECK(oracle.calls() == 1);
  CHECK_THROWS_AS(oracle.respond(1, 2, 2), InputError);

  Oracle human(OracleSpec::human(), [](int) { return 0.0; });
  CHECK_THROWS_AS(human.respond(0, 0, 1), UnsupportedHere);
}
