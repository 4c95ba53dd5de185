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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "april/errors.hpp"
#include "april/evalmetrics.hpp"

namespace april {
namespace {

void check_items(const Ranking& a, const Ranking& b, std::span<const int> items) {
  if (items.size() < 2) throw InputError("rank correlation needs at least 2 items");
  for (int item : items) {
    for (const Ranking* r : {&a, &b}) {
      if (item < 0 || item >= r->scores.size() || std::isnan(r->scores(item))) {
        throw InputError("item " + std::to_string(item) + " missing from a ranking");
      }
    }
  }
}

std::vector<int> all_items(const Ranking& a, const Ranking& b) {
  if (a.scores.size() != b.scores.size()) {
    throw InputError("rankings cover different item counts");
  }
  std::vector<int> items(static_cast<std::size_t>(a.scores.size()));
  std::iota(items.begin(), items.end(), 0);
  return items;
}

}  // namespace

std::vector<int> Ranking::order(std::span<const int> items) const {
  std::vector<int> out(items.begin(), items.end());
  std::sort(out.begin(), out.end(), [this](int x, int y) { return prefers(x, y); });
  return out;
}

double kendall_tau(const Ranking& a, const Ranking& b, std::span<const int> items) {
  check_items(a, b, items);
  long concordant = 0;
  long discordant = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (a.prefers(items[i], items[j]) == b.prefers(items[i], items[j])) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n = static_cast<double>(items.size());
  return static_cast<double>(concordant - discordant) / (n * (n - 1.0) / 2.0);
}

double spearman_rho(const Ranking& a, const Ranking& b, std::span<const int> items) {
  check_items(a, b, items);
  const std::vector<int> order_a = a.order(items);
  const std::vector<int> order_b = b.order(items);
  // Item ids may be sparse; map them to their slot in `items`.
  std::vector<int> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end());
  auto slot = [&](int item) {
    return std::lower_bound(sorted.begin(), sorted.end(), item) - sorted.begin();
  };
  std::vector<double> pos_a(items.size());
  std::vector<double> pos_b(items.size());
  for (std::size_t p = 0; p < items.size(); ++p) {
    pos_a[static_cast<std::size_t>(slot(order_a[p]))] = static_cast<double>(p);
    pos_b[static_cast<std::size_t>(slot(order_b[p]))] = static_cast<double>(p);
  }
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const double d = pos_a[k] - pos_b[k];
    sum_sq += d * d;
  }
  const double n = static_cast<double>(items.size());
  return 1.0 - 6.0 * sum_sq / (n * (n * n - 1.0));
}

double kendall_tau(const Ranking& a, const Ranking& b) {
  const auto items = all_items(a, b);
  return kendall_tau(a, b, items);
}

double spearman_rho(const Ranking& a, const Ranking& b) {
  const auto items = all_items(a, b);
  return spearman_rho(a, b, items);
}

}  // namespace april
