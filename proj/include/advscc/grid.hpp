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
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "advscc/error.hpp"
#include "advscc/random.hpp"

namespace advscc {

using Point = std::vector<double>;
using Points = std::vector<Point>;
using CellKey = std::vector<std::int64_t>;

struct GridSpec {
  Point origin;
  double pitch = 1.0;

  std::size_t dim() const noexcept { return origin.size(); }
};

namespace detail {

inline std::size_t require_points(const Points& pts) {
  require(!pts.empty(), ErrorCode::kEmptySample, "empty sample");
  const std::size_t d = pts.front().size();
  require(d > 0, ErrorCode::kDimensionMismatch, "points have no coordinates");
  for (const auto& x : pts) {
    require(x.size() == d, ErrorCode::kDimensionMismatch, "points of mixed dimension");
    for (double v : x) require(std::isfinite(v), ErrorCode::kNonFinite, "non-finite coordinate");
  }
  return d;
}

}  // namespace detail

// Lower-left corner index floor((x - x0) / g) of the cell containing x.
inline CellKey grid_key(const Point& x, const GridSpec& grid) {
  detail::require(x.size() == grid.dim(), ErrorCode::kDimensionMismatch,
                  "point has " + std::to_string(x.size()) + " coordinates, grid has " +
                      std::to_string(grid.dim()));
  CellKey key(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require(std::isfinite(x[i]), ErrorCode::kNonFinite, "non-finite coordinate");
    const double c = std::floor((x[i] - grid.origin[i]) / grid.pitch);
    detail::require(std::fabs(c) < 9e18, ErrorCode::kNonFinite, "cell index overflows");
    key[i] = static_cast<std::int64_t>(c);
  }
  return key;
}

// Sorted keys of cells holding at least `min_count` sample points.
inline std::vector<CellKey> covered_cells(const Points& sample, const GridSpec& grid,
                                          std::size_t min_count = 1) {
  detail::require_points(sample);
  detail::require(min_count >= 1, ErrorCode::kInvalidArgument, "min_count must be >= 1");
  std::map<CellKey, std::size_t> counts;
  for (const auto& x : sample) ++counts[grid_key(x, grid)];
  std::vector<CellKey> out;
  for (const auto& [key, c] : counts)
    if (c >= min_count) out.push_back(key);
  return out;
}

inline bool is_covered(const std::vector<CellKey>& cells, const CellKey& key) {
  return std::binary_search(cells.begin(), cells.end(), key);
}

// Uniform draws from the union of the given cells.
inline Points sample_synthetic(const std::vector<CellKey>& cells, const GridSpec& grid,
                               std::size_t count, Rng& rng) {
  detail::require(!cells.empty(), ErrorCode::kEmptyCells, "no covered cells to sample from");
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> offset(0.0, 1.0);
  Points out(count, Point(grid.dim()));
  for (auto& o : out) {
    const CellKey& a = cells[pick(rng)];
    for (std::size_t i = 0; i < grid.dim(); ++i)
      o[i] = grid.origin[i] + grid.pitch * (static_cast<double>(a[i]) + offset(rng));
  }
  return out;
}

inline Point lower_corner(const Points& pts) {
  Point lo = pts.front();
  for (const auto& x : pts)
    for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = std::min(lo[i], x[i]);
  return lo;
}

// Diagonal of the bounding box.
inline double data_diameter(const Points& pts) {
  detail::require_points(pts);
  Point lo = pts.front(), hi = pts.front();
  for (const auto& x : pts) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

// Number of cells containing exactly one sample point.
inline std::size_t singleton_cells(const Points& sample, const GridSpec& grid) {
  std::map<CellKey, std::size_t> counts;
  for (const auto& x : sample) ++counts[grid_key(x, grid)];
  std::size_t n1 = 0;
  for (const auto& kv : counts) n1 += kv.second == 1;
  return n1;
}

// c * n^(-1/(d+2)) with c a quarter of the diameter.
inline double default_pitch(const Points& sample) {
  const std::size_t d = detail::require_points(sample);
  const double diam = data_diameter(sample);
  if (diam <= 0.0) return 1.0;
  return 0.25 * diam *
         std::pow(static_cast<double>(sample.size()), -1.0 / static_cast<double>(d + 2));
}

// Smallest pitch (to 1% relative precision) leaving at most `t` singleton
// cells, searched geometrically over [diam / n, 2 diam] with the grid
// anchored at the sample's lower corner.
inline double select_grid_pitch(const Points& sample, std::size_t t) {
  detail::require_points(sample);
  const double diam = data_diameter(sample);
  if (diam <= 0.0) return 1.0;
  GridSpec grid{lower_corner(sample), 0.0};
  auto ok = [&](double g) {
    grid.pitch = g;
    return singleton_cells(sample, grid) <= t;
  };
  double lo = diam / static_cast<double>(sample.size());
  double hi = 2.0 * diam;
  if (ok(lo)) return lo;
  if (!ok(hi)) return hi;
  while (hi > 1.01 * lo) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace advscc
