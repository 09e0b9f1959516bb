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

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "advscc/core_model.hpp"
#include "advscc/divergence.hpp"
#include "advscc/error.hpp"

namespace advscc {

inline constexpr double kLevelTolerance = 1e-12;
// |D^S_P - lambda| within this counts as meeting the constraint with equality.
inline constexpr double kBoundaryTolerance = 1e-10;

// Events sharing one target probability.
struct LevelSet {
  std::vector<std::size_t> members;  // surviving-event indices, ascending
  double prob = 0.0;                 // p^(S): per-event probability
  double mass = 0.0;                 // |S| p^(S), summed exactly over members

  std::size_t size() const noexcept { return members.size(); }
};

struct LevelSetPartition {
  std::vector<LevelSet> sets;          // strictly ascending in prob
  std::vector<std::size_t> set_of;     // event -> level-set index

  std::size_t count() const noexcept { return sets.size(); }
};

// Groups events whose probabilities differ by at most `tol` (chained over
// the ascending order).
inline LevelSetPartition partition_level_sets(const Pmf& p, double tol = kLevelTolerance) {
  detail::require(tol >= 0.0, ErrorCode::kInvalidArgument, "negative grouping tolerance");
  LevelSetPartition part;
  part.set_of.assign(p.size(), 0);
  const auto order = p.ascending_order();
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t e = order[pos];
    if (pos == 0 || p[e] - p[order[pos - 1]] > tol) part.sets.emplace_back();
    LevelSet& s = part.sets.back();
    s.members.push_back(e);
    s.mass += p[e];
    part.set_of[e] = part.sets.size() - 1;
  }
  for (auto& s : part.sets) {
    std::sort(s.members.begin(), s.members.end());
    s.prob = s.mass / static_cast<double>(s.size());
  }
  return part;
}

enum class ConstraintClass { kL, kM, kH };

inline const char* to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::kL: return "L";
    case ConstraintClass::kM: return "M";
    case ConstraintClass::kH: return "H";
  }
  return "?";
}

enum class GameStatus { kSolved, kConstraintVacuous, kAdversaryInfeasible };

inline const char* to_string(GameStatus s) {
  switch (s) {
    case GameStatus::kSolved: return "solved";
    case GameStatus::kConstraintVacuous: return "constraint_vacuous";
    case GameStatus::kAdversaryInfeasible: return "adversary_infeasible";
  }
  return "unknown";
}

inline GameStatus game_status_from_string(const std::string& s) {
  if (s == "solved") return GameStatus::kSolved;
  if (s == "constraint_vacuous") return GameStatus::kConstraintVacuous;
  if (s == "adversary_infeasible") return GameStatus::kAdversaryInfeasible;
  throw Error(ErrorCode::kParse, "unknown status '" + s + "'");
}

struct ConstraintClasses {
  std::vector<double> divergence;       // D^S_P per level set
  std::vector<ConstraintClass> cls;
  std::optional<std::size_t> w;         // largest index in L u M
  GameStatus status = GameStatus::kSolved;

  std::vector<std::size_t> members_of(ConstraintClass c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cls.size(); ++i)
      if (cls[i] == c) out.push_back(i);
    return out;
  }
};

inline ConstraintClass classify_divergence(double d, double lambda) {
  if (d > lambda + kBoundaryTolerance) return ConstraintClass::kL;
  if (d < lambda - kBoundaryTolerance) return ConstraintClass::kH;
  return ConstraintClass::kM;
}

inline ConstraintClasses classify_level_sets(const LevelSetPartition& part,
                                             const DivergenceKind& kind, double lambda,
                                             const Pmf& p) {
  detail::require(lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be non-negative");
  ConstraintClasses out;
  const auto point = point_mass_divergences(kind, p);
  for (std::size_t i = 0; i < part.count(); ++i) {
    // The smallest member has the largest divergence when grouping is loose.
    const double d = point[part.sets[i].members.front()];
    out.divergence.push_back(d);
    out.cls.push_back(classify_divergence(d, lambda));
    if (out.cls.back() != ConstraintClass::kH) out.w = i;
  }
  if (out.cls.back() != ConstraintClass::kH) {
    out.status = GameStatus::kConstraintVacuous;
  } else if (out.cls.front() == ConstraintClass::kH) {
    out.status = GameStatus::kAdversaryInfeasible;
  }
  return out;
}

// Divergence of two-point mixtures q X^(j) + (1-q) X^(k), evaluated in O(1)
// after an O(N) setup.
class MixtureDivergence {
 public:
  MixtureDivergence(const DivergenceKind& kind, const Pmf& p) : kind_(kind), p_(p) {
    zero_terms_.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      zero_terms_[i] = kind.term(0.0, p[i]);
      base_ += zero_terms_[i];
    }
  }

  double operator()(std::size_t j, std::size_t k, double q) const {
    return base_ - zero_terms_[j] - zero_terms_[k] + kind_.term(q, p_[j]) +
           kind_.term(1.0 - q, p_[k]);
  }

  // The unique q in (0,1) with D = lambda, for D(X^(j)) > lambda > D(X^(k)).
  // Returns the upper end of the final bracket, so the mixture meets the
  // constraint.
  double root(std::size_t j, std::size_t k, double lambda) const {
    double lo = 0.0;
    double hi = 1.0;
    const double g0 = (*this)(j, k, lo);
    const double g1 = (*this)(j, k, hi);
    detail::require(g0 < lambda && g1 > lambda, ErrorCode::kNotBracketed,
                    "mixture divergence does not bracket lambda (g(0)=" + std::to_string(g0) +
                        ", g(1)=" + std::to_string(g1) + ")");
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if ((*this)(j, k, mid) >= lambda) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

 private:
  const DivergenceKind& kind_;
  const Pmf& p_;
  std::vector<double> zero_terms_;
  double base_ = 0.0;
};

// q_lambda^(l,h) for level sets l in L and h in H, using their first members.
inline double pair_root(const LevelSetPartition& part, std::size_t l, std::size_t h,
                        const DivergenceKind& kind, double lambda, const Pmf& p) {
  detail::require(l < part.count() && h < part.count(), ErrorCode::kIndexOutOfRange,
                  "level-set index out of range");
  MixtureDivergence g(kind, p);
  return g.root(part.sets[l].members.front(), part.sets[h].members.front(), lambda);
}

}  // namespace advscc
