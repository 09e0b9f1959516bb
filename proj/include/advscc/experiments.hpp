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

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "advscc/core_model.hpp"
#include "advscc/discrete_game.hpp"
#include "advscc/divergence.hpp"
#include "advscc/error.hpp"
#include "advscc/game_spec.hpp"
#include "advscc/random.hpp"

namespace advscc {

// p_1 uniform in (0, 2^-lambda]; the other entries i.i.d. U(0,1] scaled to
// fill the remaining mass.
inline Pmf gen_arbitrary_pmf(std::size_t n_events, double lambda, Rng& rng) {
  detail::require(n_events >= 2, ErrorCode::kInvalidArgument, "need at least two events");
  std::vector<double> v(n_events);
  v[0] = std::exp2(-lambda) * uniform_open_closed(rng);
  double rest = 0.0;
  for (std::size_t i = 1; i < n_events; ++i) rest += (v[i] = uniform_open_closed(rng));
  const double scale = (1.0 - v[0]) / rest;
  for (std::size_t i = 1; i < n_events; ++i) v[i] *= scale;
  return Pmf::from_values(v);
}

inline constexpr double kGaussianRange = 10.0;
inline constexpr double kTinyMass = 1e-300;

// Centred Gaussian with scale sigma, binned over N equal cells of
// [-10, 10] and renormalised. Lower tail masses use erfc so that tiny bins
// keep their relative precision; the right half mirrors the left.
inline std::vector<double> discretized_gaussian(std::size_t n_events, double sigma) {
  detail::require(n_events >= 2 && sigma > 0.0, ErrorCode::kInvalidArgument,
                  "invalid discretized Gaussian");
  const double width = 2.0 * kGaussianRange / static_cast<double>(n_events);
  auto lower_tail = [&](double e) {  // P(X <= e) for e <= 0
    return 0.5 * std::erfc(-e / (sigma * std::sqrt(2.0)));
  };
  std::vector<double> v(n_events);
  const std::size_t half = n_events / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double lo = -kGaussianRange + width * static_cast<double>(i);
    const double hi = std::min(lo + width, 0.0);
    v[i] = lower_tail(hi) - lower_tail(lo);
    v[n_events - 1 - i] = v[i];
  }
  if (n_events % 2 == 1) v[half] = std::erf(0.5 * width / (sigma * std::sqrt(2.0)));
  double total = 0.0;
  for (double x : v) total += x;
  for (auto& x : v) x /= total;
  return v;
}

struct SigmaRange {
  double min = 0.0;
  double max = 0.0;
  bool bisected = false;  // false: max fell back to 10 * min
};

// sigma_min: smallest scale whose first bin keeps mass above 1e-300.
// sigma_max: scale whose first bin holds 2^-lambda, when reachable.
inline SigmaRange gaussian_sigma_range(std::size_t n_events, double lambda) {
  auto first = [&](double s) { return discretized_gaussian(n_events, s)[0]; };
  SigmaRange r;
  double lo = 1e-6, hi = 1e3;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (first(mid) > kTinyMass ? hi : lo) = mid;
  }
  r.min = hi;
  const double target = std::exp2(-lambda);
  const double far = 1e6;
  if (target < first(far) && first(r.min) <= target) {
    lo = r.min;
    hi = far;
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      (first(mid) > target ? hi : lo) = mid;
    }
    r.max = lo;
    r.bisected = true;
  } else {
    r.max = 10.0 * r.min;
  }
  return r;
}

inline Pmf gen_discretized_gaussian(std::size_t n_events, double lambda, Rng& rng) {
  detail::require(n_events >= 2, ErrorCode::kInvalidArgument, "need at least two events");
  const SigmaRange range = gaussian_sigma_range(n_events, lambda);
  std::uniform_real_distribution<double> u(range.min, range.max);
  return Pmf::from_values(discretized_gaussian(n_events, u(rng)));
}

enum class Family { kArbitrary, kGaussian };

inline const char* to_string(Family f) { return f == Family::kArbitrary ? "arbitrary" : "gaussian"; }

inline Family family_from_string(const std::string& s) {
  if (s == "arbitrary") return Family::kArbitrary;
  if (s == "gaussian") return Family::kGaussian;
  throw Error(ErrorCode::kParse, "unknown family '" + s + "'");
}

// 0.5, 1.0, ..., 12.5
inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 25; ++i) g.push_back(0.5 * i);
  return g;
}

struct SweepConfig {
  Family family = Family::kArbitrary;
  std::size_t n_events = 50;
  double delta = 0.05;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t reps = 50;
  std::uint64_t seed = 0;
  DivergenceKind divergence = DivergenceKind::kl2();
  std::size_t jobs = 1;
};

struct SweepRow {
  double lambda = 0.0;
  std::size_t rep = 0;
  std::optional<double> hard_err;
  std::optional<double> soft_err;
  std::string failure;
};

struct SweepSummary {
  double lambda = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_hard = 0.0, sem_hard = 0.0;
  double mean_soft = 0.0, sem_soft = 0.0;
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepRow> rows;  // lambda-major, then rep
  std::vector<SweepSummary> summary;
};

namespace detail {

inline std::pair<double, double> mean_sem(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

inline void run_instance(const SweepConfig& cfg, std::size_t li, SweepRow& row) {
  Rng rng = make_rng(cfg.seed, {li, row.rep});
  try {
    Pmf p = cfg.family == Family::kArbitrary ? gen_arbitrary_pmf(cfg.n_events, row.lambda, rng)
                                             : gen_discretized_gaussian(cfg.n_events, row.lambda, rng);
    const GameSpec spec(std::move(p), cfg.delta, row.lambda, cfg.divergence);
    const auto hard = solve_hard_ldrs(spec);
    const auto soft = solve_soft(spec);
    if (!hard.value || !soft.z) {
      row.failure = to_string(soft.status);
      return;
    }
    row.hard_err = 1.0 - *hard.value;
    row.soft_err = 1.0 - *soft.z;
  } catch (const Error& e) {
    row.failure = e.what();
  }
}

}  // namespace detail

// Solves the hard and soft games on random instances across the lambda
// grid. Every instance has its own derived seed, so results do not depend
// on the number of worker threads.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  detail::require(cfg.reps >= 1, ErrorCode::kInvalidArgument, "reps must be >= 1");
  detail::require(!cfg.lambda_grid.empty(), ErrorCode::kInvalidArgument, "empty lambda grid");
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    detail::require(cfg.lambda_grid[i] > 0.0 && std::isfinite(cfg.lambda_grid[i]),
                    ErrorCode::kInvalidArgument, "lambda values must be positive");
    detail::require(i == 0 || cfg.lambda_grid[i] > cfg.lambda_grid[i - 1],
                    ErrorCode::kInvalidArgument, "lambda grid must be ascending");
  }
  detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, ErrorCode::kInvalidArgument,
                  "delta must lie in (0,1)");

  SweepReport report;
  report.config = cfg;
  const std::size_t total = cfg.lambda_grid.size() * cfg.reps;
  report.rows.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    report.rows[i].lambda = cfg.lambda_grid[i / cfg.reps];
    report.rows[i].rep = i % cfg.reps;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      detail::run_instance(cfg, i / cfg.reps, report.rows[i]);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, total));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
    SweepSummary s;
    s.lambda = cfg.lambda_grid[li];
    std::vector<double> hard, soft;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const SweepRow& row = report.rows[li * cfg.reps + r];
      if (row.hard_err && row.soft_err) {
        hard.push_back(*row.hard_err);
        soft.push_back(*row.soft_err);
      } else {
        ++s.failures;
      }
    }
    s.count = hard.size();
    std::tie(s.mean_hard, s.sem_hard) = detail::mean_sem(hard);
    std::tie(s.mean_soft, s.sem_soft) = detail::mean_sem(soft);
    report.summary.push_back(s);
  }
  return report;
}

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string sweep_header(const SweepConfig& cfg) {
  std::ostringstream os;
  os << "# family=" << to_string(cfg.family) << " n_events=" << cfg.n_events
     << " delta=" << fmt(cfg.delta) << " reps=" << cfg.reps << " seed=" << cfg.seed
     << " divergence=" << cfg.divergence.name() << "\n";
  if (cfg.lambda_grid == default_lambda_grid())
    os << "# lambda grid read as 0.5 to 12.5 in steps of 0.5 (25 points)\n";
  return os.str();
}

}  // namespace detail

inline std::string raw_csv(const SweepReport& r) {
  std::ostringstream os;
  os << detail::sweep_header(r.config) << "lambda,family,rep,hard_err,soft_err\n";
  for (const auto& row : r.rows) {
    os << detail::fmt(row.lambda) << ',' << to_string(r.config.family) << ',' << row.rep << ','
       << (row.hard_err ? detail::fmt(*row.hard_err) : "nan") << ','
       << (row.soft_err ? detail::fmt(*row.soft_err) : "nan") << '\n';
  }
  return os.str();
}

inline std::string summary_csv(const SweepReport& r) {
  std::ostringstream os;
  os << detail::sweep_header(r.config) << "lambda,mean_hard,sem_hard,mean_soft,sem_soft\n";
  for (const auto& s : r.summary) {
    os << detail::fmt(s.lambda) << ',' << detail::fmt(s.mean_hard) << ',' << detail::fmt(s.sem_hard)
       << ',' << detail::fmt(s.mean_soft) << ',' << detail::fmt(s.sem_soft) << '\n';
  }
  return os.str();
}

}  // namespace advscc
