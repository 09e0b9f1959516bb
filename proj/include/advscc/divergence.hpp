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
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advscc/core_model.hpp"
#include "advscc/error.hpp"

namespace advscc {

// Strictly convex scalar f on [0,1] generating the separable Bregman
// divergence sum_i f(q_i) - f(p_i) - f'(p_i) (q_i - p_i).
struct ScalarGenerator {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

inline std::vector<std::string> builtin_generator_names() {
  return {"square", "xlogx", "exp", "quartic"};
}

inline ScalarGenerator builtin_generator(const std::string& name) {
  if (name == "square")
    return {name, [](double x) { return x * x; }, [](double x) { return 2.0 * x; }};
  if (name == "xlogx")
    return {name, [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
            [](double x) { return std::log(x) + 1.0; }};
  if (name == "exp")
    return {name, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
  if (name == "quartic")
    return {name, [](double x) { return x * x * x * x; },
            [](double x) { return 4.0 * x * x * x; }};
  throw Error(ErrorCode::kParse, "unknown Bregman generator '" + name + "'");
}

// Second differences on a 1e-3 grid over [0,1] must all be positive.
inline bool is_strictly_convex_on_unit(const ScalarGenerator& g) {
  constexpr int kSteps = 1000;
  constexpr double h = 1.0 / kSteps;
  for (int i = 1; i < kSteps; ++i) {
    const double x = i * h;
    const double d2 = g.value(x - h) - 2.0 * g.value(x) + g.value(x + h);
    if (!(d2 > 0.0)) return false;
  }
  return true;
}

// Divergence D_P(Q) used to constrain the adversary. All supported kinds
// are separable: D_P(Q) = sum_i term(q_i, p_i).
class DivergenceKind {
 public:
  enum class Family { kKl2, kSqEuclid, kBregman };

  static DivergenceKind kl2() { return DivergenceKind(Family::kKl2); }
  static DivergenceKind sq_euclid() { return DivergenceKind(Family::kSqEuclid); }
  static DivergenceKind bregman(ScalarGenerator generator) {
    detail::require(is_strictly_convex_on_unit(generator), ErrorCode::kInvalidArgument,
                    "generator '" + generator.name + "' is not strictly convex on [0,1]");
    DivergenceKind kind(Family::kBregman);
    kind.generator_ = std::move(generator);
    return kind;
  }

  // Accepts "kl2", "sqeuclid" or "bregman:<generator>".
  static DivergenceKind parse(const std::string& text) {
    if (text == "kl2") return kl2();
    if (text == "sqeuclid") return sq_euclid();
    const std::string prefix = "bregman:";
    if (text.rfind(prefix, 0) == 0) return bregman(builtin_generator(text.substr(prefix.size())));
    throw Error(ErrorCode::kParse, "unknown divergence '" + text + "'");
  }

  std::string name() const {
    switch (family_) {
      case Family::kKl2: return "kl2";
      case Family::kSqEuclid: return "sqeuclid";
      case Family::kBregman: return "bregman:" + generator_.name;
    }
    return "";
  }

  Family family() const noexcept { return family_; }

  // Contribution of one coordinate. KL uses base-2 logs and 0 log 0 = 0.
  double term(double q, double p) const {
    switch (family_) {
      case Family::kKl2:
        return q > 0.0 ? q * std::log2(q / p) : 0.0;
      case Family::kSqEuclid:
        return (q - p) * (q - p);
      case Family::kBregman:
        return generator_.value(q) - generator_.value(p) - generator_.derivative(p) * (q - p);
    }
    return 0.0;
  }

 private:
  explicit DivergenceKind(Family family) : family_(family) {}

  Family family_;
  ScalarGenerator generator_;
};

inline constexpr double kSimplexTolerance = 1e-9;

namespace detail {

inline void require_simplex(std::span<const double> q, std::size_t n) {
  require(q.size() == n, ErrorCode::kDimensionMismatch,
          "distribution has " + std::to_string(q.size()) + " entries, expected " +
              std::to_string(n));
  double total = 0.0;
  for (double v : q) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::kOffSimplex, "negative or non-finite entry");
    total += v;
  }
  require(std::fabs(total - 1.0) <= kSimplexTolerance, ErrorCode::kOffSimplex,
          "entries sum to " + std::to_string(total));
}

}  // namespace detail

inline double evaluate(const DivergenceKind& kind, std::span<const double> q, const Pmf& p) {
  detail::require_simplex(q, p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) total += kind.term(q[i], p[i]);
  return total > 0.0 ? total : 0.0;
}

// D_P(X^(j)) for the point mass on event j.
inline double point_mass_divergence(const DivergenceKind& kind, std::size_t j, const Pmf& p) {
  detail::require(j < p.size(), ErrorCode::kIndexOutOfRange,
                  "event " + std::to_string(j) + " out of range");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += kind.term(i == j ? 1.0 : 0.0, p[i]);
  return total > 0.0 ? total : 0.0;
}

inline std::vector<double> point_mass_divergences(const DivergenceKind& kind, const Pmf& p) {
  // sum_i term(0, p_i) is shared; each point mass swaps one term.
  double base = 0.0;
  std::vector<double> zero_terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    zero_terms[i] = kind.term(0.0, p[i]);
    base += zero_terms[i];
  }
  std::vector<double> out(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double d = base - zero_terms[j] + kind.term(1.0, p[j]);
    out[j] = d > 0.0 ? d : 0.0;
  }
  return out;
}

// Moves all mass of event `from` onto event `to`.
struct TransferSpec {
  std::size_t from = 0;
  std::size_t to = 0;
};

// t(X, a, b): transfers the mass of b onto a.
inline std::vector<double> transfer(std::span<const double> x, std::size_t to, std::size_t from) {
  detail::require(to < x.size() && from < x.size(), ErrorCode::kIndexOutOfRange,
                  "transfer index out of range");
  detail::require(to != from, ErrorCode::kInvalidArgument, "transfer requires distinct events");
  std::vector<double> out(x.begin(), x.end());
  out[to] = x[to] + x[from];
  out[from] = 0.0;
  return out;
}

struct TransferResult {
  std::vector<double> q;
  double value = 0.0;
};

inline TransferResult check_transfer_feasibility(const DivergenceKind& kind, const Pmf& p,
                                                 std::span<const double> q,
                                                 TransferSpec spec) {
  detail::require_simplex(q, p.size());
  TransferResult result;
  result.q = transfer(q, spec.to, spec.from);
  result.value = evaluate(kind, result.q, p);
  return result;
}

}  // namespace advscc
