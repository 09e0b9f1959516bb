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
#include <string>
#include <utility>

#include "advscc/core_model.hpp"
#include "advscc/divergence.hpp"

namespace advscc {

// One constrained-game instance: the learner must keep rho(r, P) <= delta
// and the adversary plays any Q with D_P(Q) >= lambda.
struct GameSpec {
  Pmf p;
  double delta;
  double lambda;
  DivergenceKind divergence;

  GameSpec(Pmf p_, double delta_, double lambda_, DivergenceKind divergence_)
      : p(std::move(p_)), delta(delta_), lambda(lambda_), divergence(std::move(divergence_)) {
    detail::require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
                    "delta must lie in (0,1), got " + std::to_string(delta));
    detail::require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kInvalidArgument,
                    "lambda must be finite and non-negative");
  }
};

// The dual game fixes the tolerated adversary pass rate delta_q instead of
// the type I budget.
struct DualSpec {
  Pmf p;
  double delta_q;
  double lambda;
  DivergenceKind divergence;

  DualSpec(Pmf p_, double delta_q_, double lambda_, DivergenceKind divergence_)
      : p(std::move(p_)), delta_q(delta_q_), lambda(lambda_),
        divergence(std::move(divergence_)) {
    detail::require(delta_q > 0.0 && delta_q < 1.0, ErrorCode::kInvalidArgument,
                    "delta_q must lie in (0,1), got " + std::to_string(delta_q));
    detail::require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kInvalidArgument,
                    "lambda must be finite and non-negative");
  }
};

}  // namespace advscc
