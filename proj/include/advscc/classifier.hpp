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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "advscc/error.hpp"
#include "advscc/grid.hpp"
#include "advscc/random.hpp"

namespace advscc {

// Real-valued score, larger meaning more like the target class.
class SoftClassifier {
 public:
  virtual ~SoftClassifier() = default;
  virtual double score(const Point& x) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string loss_name() const = 0;
};

enum class KernelSolver { kNewton, kGradient };

struct KernelConfig {
  KernelSolver solver = KernelSolver::kNewton;
  std::size_t max_centers = 200;
  double ridge = 1e-3;
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-6;
  std::optional<double> bandwidth;       // median pairwise distance if unset
  std::size_t bandwidth_sample = 1000;   // points used for the median
};

struct TrainingInfo {
  std::size_t iterations = 0;
  double final_loss = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
};

// h(x) = b + sum_c alpha_c exp(-|x - c|^2 / (2 s^2)), fitted to the
// logistic loss with a ridge penalty on alpha.
class KernelLogisticClassifier final : public SoftClassifier {
 public:
  KernelLogisticClassifier(Eigen::MatrixXd centers, Eigen::VectorXd alpha, double bias,
                           double bandwidth, TrainingInfo info = {})
      : centers_(std::move(centers)), alpha_(std::move(alpha)), bias_(bias),
        bandwidth_(bandwidth), info_(info) {
    detail::require(centers_.rows() == alpha_.size(), ErrorCode::kDimensionMismatch,
                    "one weight per kernel center expected");
    detail::require(bandwidth_ > 0.0 && std::isfinite(bandwidth_), ErrorCode::kInvalidArgument,
                    "kernel bandwidth must be positive");
  }

  double score(const Point& x) const override {
    detail::require(x.size() == dim(), ErrorCode::kDimensionMismatch,
                    "point dimension does not match the classifier");
    const double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    double h = bias_;
    for (Eigen::Index c = 0; c < centers_.rows(); ++c) {
      double d2 = 0.0;
      for (Eigen::Index k = 0; k < centers_.cols(); ++k) {
        const double diff = x[static_cast<std::size_t>(k)] - centers_(c, k);
        d2 += diff * diff;
      }
      h += alpha_[c] * std::exp(-d2 * inv);
    }
    return h;
  }

  std::size_t dim() const override { return static_cast<std::size_t>(centers_.cols()); }
  std::string loss_name() const override { return "logistic"; }

  const Eigen::MatrixXd& centers() const noexcept { return centers_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  double bias() const noexcept { return bias_; }
  double bandwidth() const noexcept { return bandwidth_; }
  const TrainingInfo& info() const noexcept { return info_; }

 private:
  Eigen::MatrixXd centers_;
  Eigen::VectorXd alpha_;
  double bias_;
  double bandwidth_;
  TrainingInfo info_;
};

namespace detail {

inline Eigen::MatrixXd to_matrix(const Points& pts) {
  const std::size_t d = pts.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = pts[i][k];
  return m;
}

inline Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                     double bandwidth) {
  const Eigen::VectorXd xn = x.rowwise().squaredNorm();
  const Eigen::VectorXd cn = centers.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * x * centers.transpose();
  d2.colwise() += xn;
  d2.rowwise() += cn.transpose();
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  return (-(d2.array().max(0.0)) * inv).exp().matrix();
}

// Median of pairwise distances among (a subsample of) the rows.
inline double median_pairwise_distance(const Eigen::MatrixXd& x, std::size_t max_points, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (idx.size() > max_points) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(max_points);
  }
  std::vector<double> d;
  d.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      d.push_back((x.row(idx[a]) - x.row(idx[b])).norm());
  if (d.empty()) return 0.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (*mid > 0.0) return *mid;
  // Heavy duplication: fall back to the mean of the nonzero distances.
  double total = 0.0;
  std::size_t count = 0;
  for (double v : d)
    if (v > 0.0) total += v, ++count;
  return count ? total / static_cast<double>(count) : 0.0;
}

inline double log1p_exp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace detail

// Positive class = target sample, negative class = synthetic background.
inline KernelLogisticClassifier fit_baseline_classifier(const Points& pos, const Points& neg,
                                                        const KernelConfig& cfg, Rng& rng) {
  detail::require(!pos.empty() && !neg.empty(), ErrorCode::kEmptySample,
                  "both classes need at least one point");
  const std::size_t d = detail::require_points(pos);
  detail::require(detail::require_points(neg) == d, ErrorCode::kDimensionMismatch,
                  "classes have different dimensions");
  detail::require(cfg.max_centers >= 1 && cfg.ridge > 0.0, ErrorCode::kInvalidArgument,
                  "invalid kernel configuration");

  Points all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  const Eigen::MatrixXd x = detail::to_matrix(all);
  const auto n = x.rows();
  Eigen::VectorXd y(n);
  y.head(static_cast<Eigen::Index>(pos.size())).setOnes();
  y.tail(static_cast<Eigen::Index>(neg.size())).setConstant(-1.0);

  bool identical = true;
  for (Eigen::Index i = 1; i < n && identical; ++i) identical = x.row(i) == x.row(0);
  detail::require(!identical, ErrorCode::kDegenerate, "all training points are identical");

  Eigen::MatrixXd centers;
  if (static_cast<std::size_t>(n) <= cfg.max_centers) {
    centers = x;
  } else {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(cfg.max_centers);
    std::sort(idx.begin(), idx.end());
    centers.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) centers.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  }
  const double bandwidth =
      cfg.bandwidth ? *cfg.bandwidth : detail::median_pairwise_distance(x, cfg.bandwidth_sample, rng);
  detail::require(bandwidth > 0.0, ErrorCode::kDegenerate, "zero kernel bandwidth");

  const Eigen::MatrixXd k = detail::kernel_matrix(x, centers, bandwidth);
  const auto c = k.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd a(n, c + 1);
  a << k, Eigen::VectorXd::Ones(n);

  auto objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    const Eigen::VectorXd margin = y.cwiseProduct(a * w);
    double loss = 0.0;
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      loss += detail::log1p_exp(-margin[i]);
      g[i] = -y[i] * detail::sigmoid(-margin[i]) * inv_n;
    }
    loss = loss * inv_n + 0.5 * cfg.ridge * w.head(c).squaredNorm();
    if (grad) {
      *grad = a.transpose() * g;
      grad->head(c) += cfg.ridge * w.head(c);
    }
    return loss;
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(c + 1);
  TrainingInfo info;
  if (cfg.solver == KernelSolver::kNewton) {
    // Damped Newton steps with backtracking on the objective.
    Eigen::VectorXd grad;
    double loss = objective(w, &grad);
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
      info.iterations = it;
      info.gradient_norm = grad.lpNorm<Eigen::Infinity>();
      if (info.gradient_norm <= cfg.gradient_tolerance) {
        info.converged = true;
        break;
      }
      const Eigen::VectorXd f = a * w;
      Eigen::VectorXd curv(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = detail::sigmoid(f[i]);
        curv[i] = s * (1.0 - s) * inv_n;
      }
      Eigen::MatrixXd hess = a.transpose() * curv.asDiagonal() * a;
      hess.diagonal().head(c).array() += cfg.ridge;
      hess.diagonal()[c] += 1e-12;
      const Eigen::VectorXd dir = hess.ldlt().solve(-grad);
      double t = 1.0;
      Eigen::VectorXd next_grad;
      double next = loss;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        next = objective(w + t * dir, &next_grad);
        if (next <= loss + 1e-4 * t * grad.dot(dir)) break;
      }
      if (!(next < loss)) break;  // no further progress in floating point
      w += t * dir;
      loss = next;
      grad = next_grad;
    }
    info.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    info.converged = info.gradient_norm <= cfg.gradient_tolerance;
    info.final_loss = loss;
    return KernelLogisticClassifier(centers, w.head(c), w[c], bandwidth, info);
  }

  // Nesterov-accelerated gradient descent with step 1/L.
  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double step = 1.0 / (0.25 * inv_n * eig.eigenvalues().maxCoeff() + cfg.ridge);
  Eigen::VectorXd prev = w, lookahead = w, grad;
  double tk = 1.0;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    objective(lookahead, &grad);
    info.iterations = it + 1;
    info.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    if (info.gradient_norm <= cfg.gradient_tolerance) {
      w = lookahead;
      info.converged = true;
      break;
    }
    prev = w;
    w = lookahead - step * grad;
    const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    lookahead = w + ((tk - 1.0) / tnext) * (w - prev);
    tk = tnext;
  }
  info.final_loss = objective(w, nullptr);
  return KernelLogisticClassifier(centers, w.head(c), w[c], bandwidth, info);
}

}  // namespace advscc
