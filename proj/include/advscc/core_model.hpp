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
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "advscc/error.hpp"

namespace advscc {

inline constexpr double kInputSumTolerance = 1e-9;

// Finite target distribution with strictly positive masses.
//
// Zero-mass events given at construction are removed; their original
// positions are kept so rejection functions can be mapped back to the full
// event space (null events are always rejected).
class Pmf {
 public:
  // Validates `values`, strips zero entries and renormalises the remainder.
  static Pmf from_values(std::span<const double> values) {
    detail::require(!values.empty(), ErrorCode::kEmpty, "empty probability vector");
    long double total = 0.0L;
    for (double v : values) {
      detail::require(std::isfinite(v), ErrorCode::kInvalidArgument,
                      "non-finite probability");
      detail::require(v >= 0.0, ErrorCode::kNegativeMass,
                      "negative probability " + std::to_string(v));
      total += v;
    }
    detail::require(total > 0.0L, ErrorCode::kEmpty, "all probabilities are zero");
    detail::require(std::fabs(static_cast<double>(total - 1.0L)) <= kInputSumTolerance,
                    ErrorCode::kSumNotOne,
                    "probabilities sum to " + std::to_string(static_cast<double>(total)));

    Pmf pmf;
    pmf.original_size_ = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 0.0) {
        pmf.support_.push_back(i);
        pmf.probs_.push_back(values[i]);
      } else {
        pmf.stripped_.push_back(i);
      }
    }
    // Leave exact input alone when it already sums to one up to rounding.
    if (std::fabs(static_cast<double>(total - 1.0L)) > 8 * 1.1e-16) {
      for (auto& p : pmf.probs_) p = static_cast<double>(static_cast<long double>(p) / total);
    }
    return pmf;
  }

  std::size_t size() const noexcept { return probs_.size(); }
  std::size_t original_size() const noexcept { return original_size_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  // Original indices of the surviving events, in order.
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  // Original indices of zero-mass events.
  const std::vector<std::size_t>& stripped() const noexcept { return stripped_; }

  double min() const { return *std::min_element(probs_.begin(), probs_.end()); }
  double max() const { return *std::max_element(probs_.begin(), probs_.end()); }

  // Surviving event indices sorted by ascending probability, ties by index.
  std::vector<std::size_t> ascending_order() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs_[a] < probs_[b]; });
    return order;
  }

  // Distribution over the original event space (zeros restored).
  std::vector<double> full() const {
    std::vector<double> out(original_size_, 0.0);
    for (std::size_t i = 0; i < size(); ++i) out[support_[i]] = probs_[i];
    return out;
  }

 private:
  Pmf() = default;

  std::vector<double> probs_;
  std::vector<std::size_t> support_;
  std::vector<std::size_t> stripped_;
  std::size_t original_size_ = 0;
};

inline Pmf make_pmf(std::span<const double> values) { return Pmf::from_values(values); }
inline Pmf make_pmf(std::initializer_list<double> values) {
  return Pmf::from_values(std::span<const double>(values.begin(), values.size()));
}

enum class RejectionKind { kSoft, kHard };

// Per-event rejection probabilities.
class RejectionFunction {
 public:
  RejectionFunction() = default;

  RejectionFunction(std::vector<double> rates, RejectionKind kind)
      : rates_(std::move(rates)), kind_(kind) {
    for (double r : rates_) {
      detail::require(std::isfinite(r) && r >= 0.0 && r <= 1.0, ErrorCode::kInvalidArgument,
                      "rejection rate outside [0,1]: " + std::to_string(r));
      if (kind_ == RejectionKind::kHard) {
        detail::require(r == 0.0 || r == 1.0, ErrorCode::kInvalidArgument,
                        "hard rejection rate must be 0 or 1");
      }
    }
  }

  static RejectionFunction soft(std::vector<double> rates) {
    return {std::move(rates), RejectionKind::kSoft};
  }
  static RejectionFunction hard(std::vector<double> rates) {
    return {std::move(rates), RejectionKind::kHard};
  }

  std::size_t size() const noexcept { return rates_.size(); }
  double operator[](std::size_t i) const { return rates_[i]; }
  std::span<const double> rates() const noexcept { return rates_; }
  RejectionKind kind() const noexcept { return kind_; }

  double min_rate() const {
    return rates_.empty() ? 0.0 : *std::min_element(rates_.begin(), rates_.end());
  }

  // I_min(r): events attaining the minimum rate (within `tol`).
  std::vector<std::size_t> argmin(double tol = 0.0) const {
    const double lo = min_rate();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rates_.size(); ++i)
      if (rates_[i] <= lo + tol) out.push_back(i);
    return out;
  }

  friend bool operator==(const RejectionFunction&, const RejectionFunction&) = default;

 private:
  std::vector<double> rates_;
  RejectionKind kind_ = RejectionKind::kSoft;
};

// Expected rejection of `r` under distribution `d`: sum_i d_i r(i).
inline double rejection_rate(const RejectionFunction& r, std::span<const double> d) {
  detail::require(r.size() == d.size(), ErrorCode::kDimensionMismatch,
                  "rejection function has " + std::to_string(r.size()) +
                      " events, distribution has " + std::to_string(d.size()));
  double rate = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) rate += d[i] * r[i];
  return rate;
}

// Accepts either a function over the surviving events or over the original
// event space (zeros included).
inline double rejection_rate(const RejectionFunction& r, const Pmf& p) {
  if (r.size() == p.size()) return rejection_rate(r, p.probs());
  return rejection_rate(r, p.full());
}

// The constant-delta coin-flip rejector over the original event space.
inline RejectionFunction uniform_soft_rejector(const Pmf& p, double delta) {
  detail::require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
                  "delta must lie in (0,1)");
  std::vector<double> rates(p.original_size(), delta);
  for (std::size_t j : p.stripped()) rates[j] = 1.0;
  return RejectionFunction::soft(std::move(rates));
}

// Maps a rejection function over surviving events to the original event
// space; stripped events get rate 1.
inline RejectionFunction expand_to_original(const RejectionFunction& r, const Pmf& p) {
  detail::require(r.size() == p.size(), ErrorCode::kDimensionMismatch,
                  "expected a rejection function over surviving events");
  std::vector<double> rates(p.original_size(), 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) rates[p.support()[i]] = r[i];
  return {std::move(rates), r.kind()};
}

}  // namespace advscc
