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
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "advscc/classifier.hpp"
#include "advscc/error.hpp"
#include "advscc/grid.hpp"
#include "advscc/quantile.hpp"
#include "advscc/random.hpp"

namespace advscc {

struct SccConfig {
  std::optional<double> pitch;                  // fixed cell side
  std::optional<std::size_t> pitch_singletons;  // select pitch with at most this many singleton cells
  std::size_t min_count = 1;
  bool negbinom = false;            // synthetic size ~ NB(n, 1/2) instead of n
  double validation_fraction = 0.0; // > 0: thresholds from a held-out split
  double theta_scale = 8.0;         // theta_n = theta_scale * n^(1/3)
  double jitter_m = 8.0;
  KernelConfig classifier;
};

struct Margins {
  double theta = 0.0;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
};

inline Margins margins_for(std::size_t n, double delta, double theta_scale) {
  detail::require(theta_scale > 0.0, ErrorCode::kInvalidArgument, "theta_scale must be positive");
  Margins m;
  m.theta = theta_scale * std::cbrt(static_cast<double>(n));
  m.delta_minus = delta - 1.0 / m.theta;
  m.delta_plus = delta + 1.0 / m.theta;
  return m;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct Thresholds {
  double t_minus = -std::numeric_limits<double>::infinity();
  double t_plus = std::numeric_limits<double>::infinity();
  double sigma = 0.0;
  double mu_minus = 0.0;
  double mu_plus = 0.0;
};

// Jitters the scores with N(0, sigma^2) noise and estimates the two
// threshold quantiles.
inline Thresholds fit_thresholds(const std::vector<double>& scores, const Margins& margins,
                                 double m, Rng& jitter_rng, Rng& estimator_rng) {
  detail::require(!scores.empty(), ErrorCode::kEmptySample, "no scores");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  Thresholds t;
  t.sigma = std::max(1e-12, 1e-9 * (*hi - *lo));
  std::normal_distribution<double> noise(0.0, t.sigma);
  std::vector<double> jittered(scores);
  for (auto& v : jittered) v += noise(jitter_rng);

  const double tail = normal_cdf(-m);
  const double body = normal_cdf(m);
  t.mu_minus = body * margins.delta_minus + 0.5 * tail;
  t.mu_plus = body * margins.delta_plus + 0.5 * tail;
  // Draw both estimator uniforms unconditionally to keep the stream aligned.
  if (margins.delta_minus > 0.0 && t.mu_minus < 1.0) {
    t.t_minus = umvufb_quantile(jittered, t.mu_minus, estimator_rng);
  } else {
    estimator_rng.discard(1);
  }
  if (t.mu_plus < 1.0) {
    t.t_plus = umvufb_quantile(jittered, t.mu_plus, estimator_rng);
  } else {
    estimator_rng.discard(1);
  }
  return t;
}

// Score test inside covered cells: inclusive cut-off when t- < t+.
inline bool reject_by_score(double h, double t_minus, double t_plus, double m, double sigma) {
  const double cut = t_minus - m * sigma;
  return t_minus < t_plus ? h <= cut : h < cut;
}

struct SccModel {
  GridSpec grid;
  std::vector<CellKey> covered;
  std::shared_ptr<const SoftClassifier> classifier;
  double delta = 0.0;
  Margins margins;
  double t_minus = 0.0;
  double t_plus = 0.0;
  double jitter_m = 8.0;
  double jitter_sigma = 0.0;
  std::size_t n_train = 0;
  std::size_t n_synthetic = 0;
  std::size_t min_count = 1;
  std::uint64_t seed = 0;

  bool inclusive() const noexcept { return t_minus < t_plus; }
};

inline bool reject(const SccModel& model, const Point& x) {
  detail::require(x.size() == model.grid.dim(), ErrorCode::kDimensionMismatch,
                  "point dimension does not match the model");
  if (!is_covered(model.covered, grid_key(x, model.grid))) return true;
  return reject_by_score(model.classifier->score(x), model.t_minus, model.t_plus, model.jitter_m,
                         model.jitter_sigma);
}

inline double reject_fraction(const SccModel& model, const Points& pts) {
  detail::require(!pts.empty(), ErrorCode::kEmptySample, "no points to evaluate");
  std::size_t count = 0;
  for (const auto& x : pts) count += reject(model, x);
  return static_cast<double>(count) / static_cast<double>(pts.size());
}

inline SccModel train_scc(const Points& sample, double delta, const SccConfig& cfg,
                          std::uint64_t seed) {
  const std::size_t d = detail::require_points(sample);
  detail::require(sample.size() >= 2, ErrorCode::kEmptySample, "need at least two points");
  detail::require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
                  "delta must lie in (0,1)");
  detail::require(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0,
                  ErrorCode::kInvalidArgument, "validation_fraction must lie in [0,1)");

  Points train = sample;
  Points holdout;
  if (cfg.validation_fraction > 0.0) {
    Rng split = make_rng(seed, {static_cast<std::uint64_t>(Stream::kValidation)});
    std::shuffle(train.begin(), train.end(), split);
    auto n_val = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(train.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, train.size() - 2);
    holdout.assign(train.end() - static_cast<std::ptrdiff_t>(n_val), train.end());
    train.resize(train.size() - n_val);
  }

  SccModel model;
  model.seed = seed;
  model.delta = delta;
  model.min_count = cfg.min_count;
  model.jitter_m = cfg.jitter_m;
  model.n_train = train.size();

  double pitch = 0.0;
  if (cfg.pitch) {
    pitch = *cfg.pitch;
  } else if (cfg.pitch_singletons) {
    pitch = select_grid_pitch(train, *cfg.pitch_singletons);
  } else {
    pitch = default_pitch(train);
  }
  detail::require(pitch > 0.0 && std::isfinite(pitch), ErrorCode::kInvalidArgument,
                  "grid pitch must be positive");
  Rng origin_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::kOrigin)});
  std::uniform_real_distribution<double> shift(0.0, 1.0);
  model.grid.pitch = pitch;
  model.grid.origin = lower_corner(train);
  for (std::size_t i = 0; i < d; ++i) model.grid.origin[i] -= pitch * shift(origin_rng);
  model.covered = covered_cells(train, model.grid, cfg.min_count);
  detail::require(!model.covered.empty(), ErrorCode::kEmptyCells,
                  "no cell reaches min_count points");

  Rng synth_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::kSynthetic)});
  std::size_t n_syn = train.size();
  if (cfg.negbinom) {
    std::negative_binomial_distribution<std::size_t> nb(train.size(), 0.5);
    n_syn = std::max<std::size_t>(1, nb(synth_rng));
  }
  model.n_synthetic = n_syn;
  const Points synthetic = sample_synthetic(model.covered, model.grid, n_syn, synth_rng);

  Rng clf_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::kClassifier)});
  model.classifier = std::make_shared<KernelLogisticClassifier>(
      fit_baseline_classifier(train, synthetic, cfg.classifier, clf_rng));

  const Points& scored = holdout.empty() ? train : holdout;
  std::vector<double> scores(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) scores[i] = model.classifier->score(scored[i]);
  model.margins = margins_for(scored.size(), delta, cfg.theta_scale);
  Rng jitter_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::kJitter)});
  Rng estimator_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::kEstimator)});
  const Thresholds t = fit_thresholds(scores, model.margins, cfg.jitter_m, jitter_rng, estimator_rng);
  model.t_minus = t.t_minus;
  model.t_plus = t.t_plus;
  model.jitter_sigma = t.sigma;
  return model;
}

}  // namespace advscc
