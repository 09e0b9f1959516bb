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
#include <random>
#include <string>
#include <vector>

#include "advscc/error.hpp"
#include "advscc/random.hpp"

namespace advscc {

struct QuantileIndex {
  std::size_t lower = 0;   // 1-based order statistic k
  std::size_t upper = 0;   // k + 1 (equal to lower on the fall-back branch)
  double beta = 0.0;       // probability of taking `upper`
  bool fallback = false;
};

// Randomised order-statistic index of the unbiased quantile estimator.
inline QuantileIndex umvufb_index(std::size_t n, double mu) {
  detail::require(mu > 0.0 && mu < 1.0, ErrorCode::kMuOutOfRange,
                  "quantile level must lie in (0,1), got " + std::to_string(mu));
  detail::require(n >= 1, ErrorCode::kEmptySample, "no values");
  const double nd = static_cast<double>(n);
  QuantileIndex idx;
  if (nd >= std::max(mu / (1.0 - mu), (1.0 - mu) / mu)) {
    const double pos = (nd + 1.0) * mu;
    const double k = std::floor(pos);
    idx.beta = pos - k;
    idx.lower = std::clamp(static_cast<std::size_t>(k), std::size_t{1}, n);
    idx.upper = std::min(idx.lower + 1, n);
    if (idx.upper == idx.lower) idx.beta = 0.0;
  } else {
    idx.fallback = true;
    idx.lower = idx.upper =
        std::clamp(static_cast<std::size_t>(std::ceil(nd * mu)), std::size_t{1}, n);
  }
  return idx;
}

// Draws the index; one uniform is consumed on every call so the stream does
// not depend on the branch taken.
inline std::size_t draw_index(const QuantileIndex& idx, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < idx.beta ? idx.upper : idx.lower;
}

inline double umvufb_quantile(std::vector<double> values, double mu, Rng& rng) {
  detail::require(!values.empty(), ErrorCode::kEmptySample, "no values");
  const std::size_t i = draw_index(umvufb_index(values.size(), mu), rng);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(i - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

}  // namespace advscc
