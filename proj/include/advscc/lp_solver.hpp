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

// Dense two-phase primal simplex.
//
// The game LPs have at most a few hundred rows and ~50 columns, so a dense
// tableau is simpler and more predictable than a revised method. Pivoting
// uses Dantzig's rule and switches to Bland's rule after 10 (m + n)
// iterations, which rules out cycling on degenerate vertices. All ties are
// broken by lowest index, so identical input gives identical output.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "advscc/error.hpp"

namespace advscc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class LinearProgram {
 public:
  enum class Sense { kMaximize, kMinimize };

  explicit LinearProgram(std::size_t num_vars, Sense sense = Sense::kMaximize)
      : sense_(sense), objective_(num_vars, 0.0), lower_(num_vars, 0.0),
        upper_(num_vars, kInfinity) {}

  std::size_t num_vars() const noexcept { return objective_.size(); }
  Sense sense() const noexcept { return sense_; }

  void set_objective(std::size_t j, double c) { objective_.at(j) = c; }
  void set_bounds(std::size_t j, double lo, double hi) {
    detail::require(lo <= hi, ErrorCode::kInvalidArgument, "variable bounds with lo > hi");
    detail::require(!std::isnan(lo) && !std::isnan(hi) && lo != kInfinity && hi != -kInfinity,
                    ErrorCode::kInvalidArgument, "invalid variable bounds");
    lower_.at(j) = lo;
    upper_.at(j) = hi;
  }

  // row . x <= rhs
  void add_le(std::vector<double> row, double rhs) {
    check_row(row, rhs);
    le_rows_.push_back(std::move(row));
    le_rhs_.push_back(rhs);
  }
  // row . x >= rhs
  void add_ge(std::vector<double> row, double rhs) {
    for (auto& a : row) a = -a;
    add_le(std::move(row), -rhs);
  }
  // row . x == rhs
  void add_eq(std::vector<double> row, double rhs) {
    check_row(row, rhs);
    eq_rows_.push_back(std::move(row));
    eq_rhs_.push_back(rhs);
  }

  const std::vector<double>& objective() const noexcept { return objective_; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<std::vector<double>>& le_rows() const noexcept { return le_rows_; }
  const std::vector<double>& le_rhs() const noexcept { return le_rhs_; }
  const std::vector<std::vector<double>>& eq_rows() const noexcept { return eq_rows_; }
  const std::vector<double>& eq_rhs() const noexcept { return eq_rhs_; }

  // Infinity-norm violation of all constraints and bounds at x.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    auto dot = [&](const std::vector<double>& row) {
      double s = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
      return s;
    };
    for (std::size_t i = 0; i < le_rows_.size(); ++i)
      worst = std::max(worst, dot(le_rows_[i]) - le_rhs_[i]);
    for (std::size_t i = 0; i < eq_rows_.size(); ++i)
      worst = std::max(worst, std::fabs(dot(eq_rows_[i]) - eq_rhs_[i]));
    for (std::size_t j = 0; j < num_vars(); ++j) {
      worst = std::max(worst, lower_[j] - x[j]);
      worst = std::max(worst, x[j] - upper_[j]);
    }
    return worst;
  }

  double objective_at(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) s += objective_[j] * x[j];
    return s;
  }

 private:
  void check_row(const std::vector<double>& row, double rhs) const {
    detail::require(row.size() == num_vars(), ErrorCode::kDimensionMismatch,
                    "constraint row has wrong length");
    for (double a : row)
      detail::require(std::isfinite(a), ErrorCode::kInvalidArgument, "non-finite coefficient");
    detail::require(std::isfinite(rhs), ErrorCode::kInvalidArgument, "non-finite right-hand side");
  }

  Sense sense_;
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::vector<double>> le_rows_;
  std::vector<double> le_rhs_;
  std::vector<std::vector<double>> eq_rows_;
  std::vector<double> eq_rhs_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

struct LpTolerances {
  double pivot = 1e-11;
  double feasibility = 1e-9;
  double optimality = 1e-10;
  double residual = 1e-8;
};

namespace detail {

class DenseTableau {
 public:
  DenseTableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double rhs(std::size_t i) const { return at(i, cols_); }
  // Row `rows_` holds reduced costs; its rhs slot holds -objective.
  double& cost(std::size_t j) { return at(rows_, j); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<std::size_t>& basis() noexcept { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Loads reduced costs for maximising c . y over the current basis.
  void load_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) cost(j) = j < cols_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost(j) -= cb * at(i, j);
    }
  }

  void drop_row(std::size_t r) {
    std::vector<double> next((rows_) * (cols_ + 1));
    std::size_t k = 0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0; j <= cols_; ++j) next[k * (cols_ + 1) + j] = at(i, j);
      ++k;
    }
    data_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Maximises the loaded cost row over columns with allowed[j] set.
inline PhaseResult run_simplex(DenseTableau& t, const std::vector<bool>& allowed,
                               const LpTolerances& tol, std::size_t& iterations) {
  const std::size_t bland_after = 10 * (t.rows() + t.cols());
  const std::size_t limit = 50 * (t.rows() + t.cols()) + 1000;
  std::size_t local = 0;
  for (;;) {
    const bool bland = local >= bland_after;
    std::size_t enter = t.cols();
    double best = tol.optimality;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (!allowed[j]) continue;
      const double d = t.cost(j);
      if (d > best) {
        enter = j;
        if (bland) break;
        best = d;
      }
    }
    if (enter == t.cols()) return PhaseResult::kOptimal;

    std::size_t leave = t.rows();
    if (bland) {
      // Textbook ratio test, ties to the lowest basic index.
      double best_ratio = kInfinity;
      for (std::size_t i = 0; i < t.rows(); ++i) {
        const double a = t.at(i, enter);
        if (a <= tol.pivot) continue;
        const double ratio = std::max(t.rhs(i), 0.0) / a;
        if (leave == t.rows() || ratio < best_ratio ||
            (ratio == best_ratio && t.basis()[i] < t.basis()[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    } else {
      // Harris two-pass test: bound the step with relaxed bounds, then take
      // the largest pivot among rows within the bound.
      double bound = kInfinity;
      for (std::size_t i = 0; i < t.rows(); ++i) {
        const double a = t.at(i, enter);
        if (a > tol.pivot) bound = std::min(bound, (std::max(t.rhs(i), 0.0) + tol.feasibility) / a);
      }
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < t.rows(); ++i) {
        const double a = t.at(i, enter);
        if (a <= tol.pivot || std::max(t.rhs(i), 0.0) / a > bound) continue;
        if (a > best_pivot || (a == best_pivot && t.basis()[i] < t.basis()[leave])) {
          leave = i;
          best_pivot = a;
        }
      }
    }
    if (leave == t.rows()) return PhaseResult::kUnbounded;

    t.pivot(leave, enter);
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (std::fabs(t.rhs(i)) < 1e-13) t.rhs(i) = 0.0;
    ++local;
    ++iterations;
    require(local <= limit, ErrorCode::kNumericalBreakdown, "simplex iteration limit exceeded");
  }
}

// x_j = offset + sum coef * y_col over the non-negative structural columns.
struct VariableMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {}) {
  const std::size_t n = lp.num_vars();

  // Shift or split variables so every structural column is y >= 0.
  std::vector<detail::VariableMap> vars(n);
  std::size_t ncols = 0;
  struct Row {
    std::vector<double> a;
    double b;
    bool equality;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // column, bound
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower()[j];
    const double hi = lp.upper()[j];
    if (std::isfinite(lo)) {
      vars[j] = {lo, {{ncols, 1.0}}};
      if (std::isfinite(hi)) upper_rows.emplace_back(ncols, hi - lo);
      ++ncols;
    } else if (std::isfinite(hi)) {
      vars[j] = {hi, {{ncols, -1.0}}};
      ++ncols;
    } else {
      vars[j] = {0.0, {{ncols, 1.0}, {ncols + 1, -1.0}}};
      ncols += 2;
    }
  }
  auto translate = [&](const std::vector<double>& a, double b, bool eq) {
    Row row{std::vector<double>(ncols, 0.0), b, eq};
    for (std::size_t j = 0; j < n; ++j) {
      if (a[j] == 0.0) continue;
      row.b -= a[j] * vars[j].offset;
      for (auto [col, coef] : vars[j].terms) row.a[col] += a[j] * coef;
    }
    return row;
  };
  for (std::size_t i = 0; i < lp.eq_rows().size(); ++i)
    rows.push_back(translate(lp.eq_rows()[i], lp.eq_rhs()[i], true));
  for (std::size_t i = 0; i < lp.le_rows().size(); ++i)
    rows.push_back(translate(lp.le_rows()[i], lp.le_rhs()[i], false));
  for (auto [col, bound] : upper_rows) {
    Row row{std::vector<double>(ncols, 0.0), bound, false};
    row.a[col] = 1.0;
    rows.push_back(std::move(row));
  }

  // Column layout: structural | slack/surplus | artificial.
  const std::size_t m = rows.size();
  std::size_t nslack = 0;
  std::size_t nart = 0;
  std::vector<int> sign(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].b < 0.0) sign[i] = -1;
    if (!rows[i].equality) ++nslack;
    if (rows[i].equality || sign[i] < 0) ++nart;
  }
  const std::size_t total = ncols + nslack + nart;
  detail::DenseTableau t(m, total);
  std::vector<bool> artificial(total, false);
  {
    std::size_t s = ncols;
    std::size_t a = ncols + nslack;
    for (std::size_t i = 0; i < m; ++i) {
      const double sg = sign[i];
      for (std::size_t j = 0; j < ncols; ++j) t.at(i, j) = sg * rows[i].a[j];
      t.rhs(i) = sg * rows[i].b;
      if (!rows[i].equality) {
        t.at(i, s) = sg;
        if (sg > 0) t.basis()[i] = s;
        ++s;
      }
      if (rows[i].equality || sg < 0) {
        t.at(i, a) = 1.0;
        artificial[a] = true;
        t.basis()[i] = a;
        ++a;
      }
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(total, true);

  if (nart > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = 0; j < total; ++j)
      if (artificial[j]) phase1[j] = -1.0;
    t.load_costs(phase1);
    detail::run_simplex(t, allowed, tol, sol.iterations);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (artificial[t.basis()[i]]) infeasibility += t.rhs(i);
    if (infeasibility > tol.feasibility) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (!artificial[t.basis()[i]]) {
        ++i;
        continue;
      }
      std::size_t col = total;
      double largest = tol.pivot;
      for (std::size_t j = 0; j < total; ++j) {
        if (!artificial[j] && std::fabs(t.at(i, j)) > largest) {
          col = j;
          largest = std::fabs(t.at(i, j));
        }
      }
      if (col == total) {
        t.drop_row(i);
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
    for (std::size_t j = 0; j < total; ++j)
      if (artificial[j]) allowed[j] = false;
  }

  const double dir = lp.sense() == LinearProgram::Sense::kMaximize ? 1.0 : -1.0;
  std::vector<double> phase2(total, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (auto [col, coef] : vars[j].terms) phase2[col] += dir * lp.objective()[j] * coef;
  t.load_costs(phase2);
  if (detail::run_simplex(t, allowed, tol, sol.iterations) == detail::PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  std::vector<double> y(total, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  sol.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = vars[j].offset;
    for (auto [col, coef] : vars[j].terms) v += coef * y[col];
    sol.x[j] = v;
  }
  sol.objective_value = lp.objective_at(sol.x);
  sol.status = LpStatus::kOptimal;
  const double violation = lp.max_violation(sol.x);
  detail::require(violation <= tol.residual, ErrorCode::kNumericalBreakdown,
                  "optimal vertex violates constraints by " + std::to_string(violation) + " (" + std::to_string(sol.iterations) + " pivots)");
  return sol;
}

}  // namespace advscc
