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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "advscc/core_model.hpp"
#include "advscc/divergence.hpp"
#include "advscc/error.hpp"
#include "advscc/game_spec.hpp"
#include "advscc/level_sets.hpp"
#include "advscc/random.hpp"

namespace advscc {

enum class ResponseMode { kStructured, kBrute, kUnrestricted };

inline const char* to_string(ResponseMode m) {
  switch (m) {
    case ResponseMode::kStructured: return "structured";
    case ResponseMode::kBrute: return "brute";
    case ResponseMode::kUnrestricted: return "unrestricted";
  }
  return "unknown";
}

inline ResponseMode response_mode_from_string(const std::string& s) {
  if (s == "structured") return ResponseMode::kStructured;
  if (s == "brute") return ResponseMode::kBrute;
  if (s == "unrestricted") return ResponseMode::kUnrestricted;
  throw Error(ErrorCode::kParse, "unknown oracle mode '" + s + "'");
}

struct BestResponse {
  std::vector<double> q;  // over surviving events
  double value = 0.0;     // rho(r, q)
  ResponseMode mode = ResponseMode::kStructured;

  // (event, mass) pairs with nonzero mass.
  std::vector<std::pair<std::size_t, double>> support() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] > 0.0) out.emplace_back(i, q[i]);
    return out;
  }
};

namespace detail {

// Rates over surviving events; accepts either event space.
inline std::vector<double> surviving_rates(const RejectionFunction& r, const Pmf& p) {
  if (r.size() == p.size()) return {r.rates().begin(), r.rates().end()};
  require(r.size() == p.original_size(), ErrorCode::kDimensionMismatch,
          "rejection function has " + std::to_string(r.size()) + " events, expected " +
              std::to_string(p.size()) + " or " + std::to_string(p.original_size()));
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = r[p.support()[i]];
  return out;
}

inline std::size_t lowest_argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

// Against an adversary free to pick any Q: a point mass on the least
// rejected event.
inline BestResponse unrestricted_best_response(const RejectionFunction& r, const Pmf& p) {
  const auto rates = detail::surviving_rates(r, p);
  BestResponse out;
  out.mode = ResponseMode::kUnrestricted;
  out.q.assign(rates.size(), 0.0);
  const std::size_t j = detail::lowest_argmin(rates);
  out.q[j] = 1.0;
  out.value = rates[j];
  return out;
}

// Minimum of rho(r, Q) over Q with D_P(Q) >= lambda, searched over point
// masses and two-point mixtures on the constraint boundary.
inline BestResponse best_response(const RejectionFunction& r, const GameSpec& spec) {
  const Pmf& p = spec.p;
  const auto rates = detail::surviving_rates(r, p);
  const auto point = point_mass_divergences(spec.divergence, p);
  const double lambda = spec.lambda;
  detail::require(*std::max_element(point.begin(), point.end()) >= lambda - kBoundaryTolerance,
                  ErrorCode::kAdversaryInfeasible,
                  "no distribution reaches divergence " + std::to_string(lambda));

  BestResponse out;
  out.mode = ResponseMode::kStructured;
  out.value = std::numeric_limits<double>::infinity();
  std::size_t best_j = 0, best_k = 0;
  double best_q = 1.0;

  for (std::size_t j = 0; j < p.size(); ++j) {
    if (point[j] >= lambda - kBoundaryTolerance && rates[j] < out.value) {
      out.value = rates[j];
      best_j = best_k = j;
      best_q = 1.0;
    }
  }

  // Roots depend only on the two probabilities, so pair level sets and use
  // the least rejected member of each.
  const auto part = partition_level_sets(p);
  std::vector<std::size_t> cheapest(part.count());
  std::vector<ConstraintClass> cls(part.count());
  for (std::size_t s = 0; s < part.count(); ++s) {
    const auto& members = part.sets[s].members;
    cheapest[s] = members.front();
    for (std::size_t e : members)
      if (rates[e] < rates[cheapest[s]]) cheapest[s] = e;
    cls[s] = classify_divergence(point[members.front()], lambda);
  }
  MixtureDivergence g(spec.divergence, p);
  for (std::size_t l = 0; l < part.count(); ++l) {
    if (cls[l] != ConstraintClass::kL) continue;
    for (std::size_t h = 0; h < part.count(); ++h) {
      if (cls[h] != ConstraintClass::kH) continue;
      const std::size_t j = cheapest[l];
      const std::size_t k = cheapest[h];
      if (rates[j] <= rates[k]) continue;  // the point mass on j is no worse
      const double q = g.root(part.sets[l].members.front(), part.sets[h].members.front(), lambda);
      const double value = q * rates[j] + (1.0 - q) * rates[k];
      if (value < out.value) {
        out.value = value;
        best_j = j;
        best_k = k;
        best_q = q;
      }
    }
  }

  out.q.assign(p.size(), 0.0);
  out.q[best_j] += best_q;
  if (best_k != best_j) out.q[best_k] += 1.0 - best_q;
  return out;
}

inline constexpr std::size_t kBruteForceMaxEvents = 5;

// Exhaustive search over the lattice {k / resolution} of the simplex.
inline BestResponse brute_force_best_response(const RejectionFunction& r, const GameSpec& spec,
                                              int resolution) {
  const Pmf& p = spec.p;
  const std::size_t n = p.size();
  detail::require(n <= kBruteForceMaxEvents, ErrorCode::kTooLarge,
                  "brute force supports at most 5 events, got " + std::to_string(n));
  detail::require(resolution >= 100, ErrorCode::kInvalidArgument, "resolution must be >= 100");
  const auto rates = detail::surviving_rates(r, p);
  const auto R = static_cast<std::size_t>(resolution);

  // Separable objective and constraint: tabulate each coordinate once.
  std::vector<std::vector<double>> dterm(n, std::vector<double>(R + 1));
  std::vector<std::vector<double>> rterm(n, std::vector<double>(R + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k <= R; ++k) {
      const double x = static_cast<double>(k) / resolution;
      dterm[i][k] = spec.divergence.term(x, p[i]);
      rterm[i][k] = x * rates[i];
    }
  }

  const double threshold = spec.lambda - kBoundaryTolerance;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> counts(n, 0), best_counts;

  auto recurse = [&](auto&& self, std::size_t i, std::size_t remaining, double d,
                     double rho) -> void {
    if (i + 1 == n) {
      counts[i] = remaining;
      if (d + dterm[i][remaining] >= threshold && rho + rterm[i][remaining] < best) {
        best = rho + rterm[i][remaining];
        best_counts = counts;
      }
      return;
    }
    if (i + 2 == n) {
      const auto& da = dterm[i];
      const auto& db = dterm[i + 1];
      const auto& ra = rterm[i];
      const auto& rb = rterm[i + 1];
      for (std::size_t k = 0; k <= remaining; ++k) {
        const std::size_t rest = remaining - k;
        const double value = rho + ra[k] + rb[rest];
        if (value < best && d + da[k] + db[rest] >= threshold) {
          best = value;
          counts[i] = k;
          counts[i + 1] = rest;
          best_counts = counts;
        }
      }
      return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
      counts[i] = k;
      self(self, i + 1, remaining - k, d + dterm[i][k], rho + rterm[i][k]);
    }
  };
  recurse(recurse, 0, R, 0.0, 0.0);

  detail::require(!best_counts.empty(), ErrorCode::kNoFeasiblePoint,
                  "no lattice point reaches the divergence constraint; refine the resolution");
  BestResponse out;
  out.mode = ResponseMode::kBrute;
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.q[i] = static_cast<double>(best_counts[i]) / resolution;
  out.value = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.value += out.q[i] * rates[i];
  return out;
}

// Pass counts for the transfer constructions behind Properties A, B and C.
struct PropertyReport {
  std::size_t trials = 0;
  std::size_t sampled = 0;           // trials that found Q in the constraint set
  std::size_t membership_passed = 0;  // D(Q') >= max(lambda, D(Q)) - 1e-10
  std::size_t a_applicable = 0, a_passed = 0;
  std::size_t b_applicable = 0, b_passed = 0;
  std::size_t c_applicable = 0, c_passed = 0;

  bool all_passed() const {
    return membership_passed == sampled && a_passed == a_applicable &&
           b_passed == b_applicable && c_passed == c_applicable;
  }
};

inline constexpr std::size_t kMaxRejectionAttempts = 100000;

// Rejection sampler for Q uniform on the simplex conditioned on
// D_P(Q) >= lambda. Returns an empty vector after too many misses.
inline std::vector<double> sample_constrained(const GameSpec& spec, Rng& rng) {
  for (std::size_t attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    auto q = uniform_simplex(spec.p.size(), rng);
    if (evaluate(spec.divergence, q, spec.p) >= spec.lambda) return q;
  }
  return {};
}

inline PropertyReport property_abc_transfer_check(const GameSpec& spec, std::size_t trials,
                                                  Rng& rng) {
  detail::require(trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  const Pmf& p = spec.p;
  const DivergenceKind& kind = spec.divergence;
  PropertyReport rep;
  rep.trials = trials;
  if (p.size() < 2) return rep;
  std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);

  for (std::size_t t = 0; t < trials; ++t) {
    const auto q = sample_constrained(spec, rng);
    if (q.empty()) continue;
    ++rep.sampled;
    std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    while (k == j) k = pick(rng);
    if (p[j] > p[k]) std::swap(j, k);  // j is the less likely event

    const double dq = evaluate(kind, q, p);
    const auto moved = transfer(q, j, k);
    const double dmoved = evaluate(kind, moved, p);
    const bool member = dmoved >= spec.lambda - 1e-10 && dmoved >= dq - 1e-10;
    if (member) ++rep.membership_passed;

    const bool level = std::fabs(p[j] - p[k]) <= kLevelTolerance;
    if (!level && q[j] < q[k]) {
      ++rep.a_applicable;
      if (member && q[j] + moved[j] >= q[k] + moved[k]) ++rep.a_passed;
    }
    if (q[j] / p[j] < q[k] / p[k]) {
      ++rep.b_applicable;
      if (member && moved[j] / p[j] >= moved[k] / p[k]) ++rep.b_passed;
    }
    if (level) {
      ++rep.c_applicable;
      auto swapped = q;
      std::swap(swapped[j], swapped[k]);
      const double ds = evaluate(kind, swapped, p);
      if (ds >= spec.lambda - 1e-10 && std::fabs(ds - dq) <= 1e-10) ++rep.c_passed;
    }
  }
  return rep;
}

}  // namespace advscc
