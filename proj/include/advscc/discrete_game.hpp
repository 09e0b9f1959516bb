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
#include <optional>
#include <string>
#include <vector>

#include "advscc/adversary_oracle.hpp"
#include "advscc/core_model.hpp"
#include "advscc/error.hpp"
#include "advscc/game_spec.hpp"
#include "advscc/level_sets.hpp"
#include "advscc/lp_solver.hpp"

namespace advscc {

// Rates closer than this to the minimum count as attaining it.
inline constexpr double kMinRateTolerance = 1e-9;
// A vulnerable LP optimum must sit this close to the constant rule.
inline constexpr double kConstantRuleTolerance = 1e-6;

struct PairConstraint {
  std::size_t l = 0;  // level set in L
  std::size_t h = 0;  // level set in H
  double q = 0.0;     // mixture weight on l meeting the constraint
};

struct SolveOutcome {
  GameStatus status = GameStatus::kSolved;
  LevelSetPartition partition;
  ConstraintClasses classes;
  std::vector<double> r_levels;
  RejectionFunction r_events;     // original event space, null events rejected
  std::optional<double> z;        // empty when no adversary is feasible
  std::vector<double> witness_q;  // over surviving events
  bool vulnerable = false;

  std::optional<double> type2() const {
    if (!z) return std::nullopt;
    return 1.0 - *z;
  }
};

struct HardOutcome {
  GameStatus status = GameStatus::kSolved;
  RejectionFunction r;                 // original event space
  std::vector<std::size_t> rejected;   // original indices of rejected events
  double rejected_mass = 0.0;
  std::optional<double> value;
  std::vector<double> witness_q;

  std::optional<double> type2() const {
    if (!value) return std::nullopt;
    return 1.0 - *value;
  }
};

struct DualOutcome {
  GameStatus status = GameStatus::kSolved;
  LevelSetPartition partition;
  ConstraintClasses classes;
  std::vector<double> r_levels;
  RejectionFunction r_events;
  double z_i = 0.0;  // optimal type I error
  bool vulnerable = false;
};

namespace detail {

inline std::vector<PairConstraint> pair_constraints(const LevelSetPartition& part,
                                                    const ConstraintClasses& classes,
                                                    const GameSpec& spec) {
  MixtureDivergence g(spec.divergence, spec.p);
  std::vector<PairConstraint> out;
  for (std::size_t l : classes.members_of(ConstraintClass::kL)) {
    for (std::size_t h : classes.members_of(ConstraintClass::kH)) {
      out.push_back({l, h,
                     g.root(part.sets[l].members.front(), part.sets[h].members.front(),
                            spec.lambda)});
    }
  }
  return out;
}

inline std::vector<double> expand_levels(const LevelSetPartition& part,
                                         const std::vector<double>& r_levels) {
  std::vector<double> out(part.set_of.size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = r_levels[part.set_of[e]];
  return out;
}

inline std::vector<double> clamp_unit(const std::vector<double>& x, std::size_t count) {
  std::vector<double> out(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(count));
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

// Whether the least rejected level sets include one the adversary can fully
// occupy.
inline bool levels_vulnerable(const std::vector<double>& r_levels,
                              const ConstraintClasses& classes) {
  const double lo = *std::min_element(r_levels.begin(), r_levels.end());
  for (std::size_t i = 0; i < r_levels.size(); ++i)
    if (r_levels[i] <= lo + kMinRateTolerance && classes.cls[i] != ConstraintClass::kH)
      return true;
  return false;
}

// Shared feasible region: monotone rates in [0,1] plus the adversary
// constraints rho_i >= bound, with bound = z (variable `zcol`) or a constant.
inline void add_game_rows(LinearProgram& lp, const LevelSetPartition& part,
                          const ConstraintClasses& classes,
                          const std::vector<PairConstraint>& pairs, std::optional<std::size_t> zcol,
                          double constant) {
  const std::size_t n = lp.num_vars();
  const std::size_t K = part.count();
  auto row = [&] { return std::vector<double>(n, 0.0); };

  auto first = row();
  first[0] = 1.0;
  lp.add_le(first, 1.0);
  for (std::size_t i = 0; i + 1 < K; ++i) {
    auto a = row();
    a[i + 1] = 1.0;
    a[i] = -1.0;
    lp.add_le(a, 0.0);
  }
  auto bound_row = [&](std::vector<double> a) {
    if (zcol) {
      for (auto& v : a) v = -v;
      a[*zcol] = 1.0;
      lp.add_le(a, 0.0);
    } else {
      lp.add_ge(a, constant);
    }
  };
  auto w = row();
  w[*classes.w] = 1.0;
  bound_row(w);
  for (std::size_t m : classes.members_of(ConstraintClass::kM)) {
    auto a = row();
    a[m] = 1.0;
    bound_row(a);
  }
  for (const auto& pc : pairs) {
    auto a = row();
    a[pc.l] += pc.q;
    a[pc.h] += 1.0 - pc.q;
    bound_row(a);
  }
}

}  // namespace detail

// Optimal soft rejection function against the divergence-constrained
// adversary, computed at level-set granularity by linear programming.
inline SolveOutcome solve_soft(const GameSpec& spec) {
  const Pmf& p = spec.p;
  SolveOutcome out;
  out.partition = partition_level_sets(p);
  out.classes = classify_level_sets(out.partition, spec.divergence, spec.lambda, p);
  out.status = out.classes.status;
  const std::size_t K = out.partition.count();

  if (out.status != GameStatus::kSolved) {
    out.r_levels.assign(K, spec.delta);
    out.r_events = uniform_soft_rejector(p, spec.delta);
    if (out.status == GameStatus::kConstraintVacuous) {
      out.z = spec.delta;
      out.vulnerable = true;
      out.witness_q.assign(p.size(), 0.0);
      out.witness_q[0] = 1.0;
    }
    return out;
  }

  const auto pairs = detail::pair_constraints(out.partition, out.classes, spec);
  LinearProgram lp(K + 1, LinearProgram::Sense::kMaximize);
  lp.set_objective(K, 1.0);
  std::vector<double> mass(K + 1, 0.0);
  for (std::size_t i = 0; i < K; ++i) mass[i] = out.partition.sets[i].mass;
  lp.add_eq(mass, spec.delta);
  detail::add_game_rows(lp, out.partition, out.classes, pairs, K, 0.0);

  const LpSolution sol = solve_lp(lp);
  detail::require(sol.status == LpStatus::kOptimal, ErrorCode::kInternal,
                  std::string("soft game LP ended ") + to_string(sol.status));
  out.r_levels = detail::clamp_unit(sol.x, K);
  out.z = sol.x[K];
  detail::require(*out.z >= spec.delta - 1e-8, ErrorCode::kInternal,
                  "LP value below the constant rule");

  out.vulnerable = detail::levels_vulnerable(out.r_levels, out.classes);
  if (out.vulnerable) {
    for (double v : out.r_levels)
      detail::require(std::fabs(v - spec.delta) <= kConstantRuleTolerance, ErrorCode::kInternal,
                      "vulnerable optimum differs from the constant rule");
    out.r_levels.assign(K, spec.delta);
    out.z = spec.delta;
  }
  const auto rates = detail::expand_levels(out.partition, out.r_levels);
  out.r_events = expand_to_original(RejectionFunction::soft(rates), p);
  out.witness_q = best_response(RejectionFunction::soft(rates), spec).q;
  return out;
}

// Low-density rejection: reject events in ascending probability while the
// rejected mass stays within delta.
inline HardOutcome solve_hard_ldrs(const GameSpec& spec) {
  const Pmf& p = spec.p;
  HardOutcome out;
  std::vector<double> rates(p.size(), 0.0);
  double cumulative = 0.0;
  for (std::size_t e : p.ascending_order()) {
    if (cumulative + p[e] > spec.delta + kLevelTolerance) break;
    cumulative += p[e];
    rates[e] = 1.0;
  }
  out.rejected_mass = cumulative;
  for (std::size_t e = 0; e < p.size(); ++e)
    if (rates[e] == 1.0) out.rejected.push_back(p.support()[e]);
  out.r = expand_to_original(RejectionFunction::hard(rates), p);

  const auto part = partition_level_sets(p);
  out.status = classify_level_sets(part, spec.divergence, spec.lambda, p).status;
  if (out.status == GameStatus::kAdversaryInfeasible) return out;
  const BestResponse br = best_response(RejectionFunction::hard(rates), spec);
  out.value = br.value;
  out.witness_q = br.q;
  return out;
}

// Minimum type I error subject to a worst-case adversary pass rate of at
// most delta_q.
inline DualOutcome solve_dual(const DualSpec& spec) {
  const Pmf& p = spec.p;
  const double target = 1.0 - spec.delta_q;
  DualOutcome out;
  out.partition = partition_level_sets(p);
  out.classes = classify_level_sets(out.partition, spec.divergence, spec.lambda, p);
  out.status = out.classes.status;
  const std::size_t K = out.partition.count();

  auto finish = [&](std::vector<double> r_levels) {
    out.r_levels = std::move(r_levels);
    out.r_events = expand_to_original(
        RejectionFunction::soft(detail::expand_levels(out.partition, out.r_levels)), p);
  };
  if (out.status == GameStatus::kConstraintVacuous) {
    finish(std::vector<double>(K, target));
    out.z_i = target;
    out.vulnerable = true;
    return out;
  }
  if (out.status == GameStatus::kAdversaryInfeasible) {
    finish(std::vector<double>(K, 0.0));
    out.z_i = 0.0;
    return out;
  }

  // delta is unused by the pair roots; any value in (0,1) builds the spec.
  const GameSpec game(p, 0.5, spec.lambda, spec.divergence);
  const auto pairs = detail::pair_constraints(out.partition, out.classes, game);
  LinearProgram lp(K + 1, LinearProgram::Sense::kMinimize);
  lp.set_objective(K, 1.0);
  std::vector<double> mass(K + 1, 0.0);
  for (std::size_t i = 0; i < K; ++i) mass[i] = out.partition.sets[i].mass;
  mass[K] = -1.0;
  lp.add_le(mass, 0.0);
  detail::add_game_rows(lp, out.partition, out.classes, pairs, std::nullopt, target);

  const LpSolution sol = solve_lp(lp);
  detail::require(sol.status == LpStatus::kOptimal, ErrorCode::kInternal,
                  std::string("dual game LP ended ") + to_string(sol.status));
  auto r_levels = detail::clamp_unit(sol.x, K);
  out.z_i = sol.x[K];
  out.vulnerable = detail::levels_vulnerable(r_levels, out.classes);
  if (out.vulnerable) {
    for (double v : r_levels)
      detail::require(std::fabs(v - target) <= kConstantRuleTolerance, ErrorCode::kInternal,
                      "vulnerable dual optimum differs from the constant rule");
    r_levels.assign(K, target);
    out.z_i = target;
  }
  finish(std::move(r_levels));
  return out;
}

}  // namespace advscc
