// Copyright 2026 The advscc Authors.
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

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "advscc/core_model.hpp"
#include "advscc/divergence.hpp"
#include "advscc/error.hpp"
#include "advscc/random.hpp"

namespace advscc {

inline constexpr double kPropertySlack = 1e-10;

struct DivergenceReport {
  std::size_t trials = 0;
  std::size_t receding_applicable = 0, receding_passed = 0;
  std::size_t symmetric_passed = 0;
  std::size_t convex_passed = 0;
  std::size_t transfer_passed = 0;  // D(t(Q,j,k)) >= D(Q) for p_j <= p_k

  bool all_passed() const {
    return receding_passed == receding_applicable && symmetric_passed == trials &&
           convex_passed == trials && transfer_passed == trials;
  }
};

namespace detail {

// Random pmf on n events whose last two events share one probability.
inline Pmf pmf_with_tie(std::size_t n, Rng& rng) {
  auto v = uniform_simplex(n, rng);
  for (auto& x : v) x = 0.5 * x + 0.1;
  v[n - 1] = v[n - 2];
  double total = 0.0;
  for (double x : v) total += x;
  for (auto& x : v) x /= total;
  return Pmf::from_values(v);
}

}  // namespace detail

// Randomised checks of the receding, 2-symmetric and convexity properties,
// plus mass transfers toward the less likely event.
inline DivergenceReport divergence_property_battery(const DivergenceKind& kind, std::size_t trials,
                                                    std::size_t n_events, Rng& rng) {
  detail::require(n_events >= 3, ErrorCode::kInvalidArgument, "need at least three events");
  detail::require(trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  DivergenceReport rep;
  rep.trials = trials;
  std::uniform_int_distribution<std::size_t> pick(0, n_events - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t a = n_events - 2, b = n_events - 1;

  for (std::size_t t = 0; t < trials; ++t) {
    const Pmf p = detail::pmf_with_tie(n_events, rng);
    const auto x = uniform_simplex(n_events, rng);
    const double dx = evaluate(kind, x, p);

    std::size_t j = pick(rng), k = pick(rng);
    while (k == j || p[j] == p[k]) k = pick(rng);
    if (p[j] > p[k]) std::swap(j, k);
    const double moved = evaluate(kind, transfer(x, j, k), p);
    if (p[j] < p[k] && x[k] > 0.0) {
      ++rep.receding_applicable;
      if (moved > dx - kPropertySlack) ++rep.receding_passed;
    }
    if (moved >= dx - kPropertySlack) ++rep.transfer_passed;

    if (std::fabs(evaluate(kind, transfer(x, a, b), p) - evaluate(kind, transfer(x, b, a), p)) <=
        kPropertySlack)
      ++rep.symmetric_passed;

    const auto y = uniform_simplex(n_events, rng);
    const double w = unit(rng);
    std::vector<double> mix(n_events);
    for (std::size_t i = 0; i < n_events; ++i) mix[i] = w * x[i] + (1 - w) * y[i];
    if (evaluate(kind, mix, p) <= w * dx + (1 - w) * evaluate(kind, y, p) + kPropertySlack)
      ++rep.convex_passed;
  }
  return rep;
}

}  // namespace advscc
