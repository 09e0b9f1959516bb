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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "advscc/classifier.hpp"
#include "advscc/grid.hpp"
#include "advscc/quantile.hpp"
#include "advscc/scc.hpp"
#include "test_support.hpp"

namespace advscc {
namespace {

using testing::StandardNormal;

Points uniform_points(std::size_t n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Points out(n, Point(1));
  for (auto& x : out) x[0] = u(rng);
  return out;
}

// Probability that a random positive outranks a random negative.
double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double a : pos)
    for (double b : neg) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

double spearman(std::vector<double> a, std::vector<double> b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

TEST(Grid, KeyFloorConvention) {
  const GridSpec g{{0.0, 0.0}, 0.5};
  EXPECT_EQ(grid_key({1.2, -0.3}, g), (CellKey{2, -1}));
  const GridSpec g1{{0.0}, 0.5};
  EXPECT_EQ(grid_key({1.0}, g1), (CellKey{2}));
  const GridSpec g2{{3.0, -1.0}, 0.7};
  EXPECT_EQ(grid_key({3.0, -1.0}, g2), (CellKey{0, 0}));
  EXPECT_THROW(grid_key({NAN}, g1), Error);
  EXPECT_THROW(grid_key({1.0, 2.0}, g1), Error);
}

TEST(Grid, CoveredCellsAndFilter) {
  const GridSpec g{{0.0}, 1.0};
  const Points pts{{0.1}, {0.2}, {0.3}};
  EXPECT_EQ(covered_cells(pts, g, 1).size(), 1u);
  EXPECT_TRUE(covered_cells(pts, g, 4).empty());
  EXPECT_THROW(covered_cells(Points{}, g), Error);
}

TEST(Grid, UniformSampleCoversEveryCell) {
  Rng rng(61);
  const auto pts = uniform_points(1000, 0.0, 1.0, rng);
  EXPECT_EQ(covered_cells(pts, GridSpec{{0.0}, 0.1}).size(), 10u);
}

TEST(Grid, SyntheticStaysInCells) {
  Rng rng(62);
  const GridSpec g{{0.0, 0.0}, 0.25};
  const auto one = sample_synthetic({{0, 0}}, g, 500, rng);
  for (const auto& x : one) {
    EXPECT_GE(x[0], 0.0);
    EXPECT_LT(x[0], 0.25);
    EXPECT_GE(x[1], 0.0);
    EXPECT_LT(x[1], 0.25);
  }
  const GridSpec line{{0.0}, 1.0};
  const auto pts = sample_synthetic({{0}, {5}}, line, 10000, rng);
  std::size_t first = 0;
  for (const auto& x : pts) {
    EXPECT_FALSE(x[0] >= 1.0 && x[0] < 5.0);
    first += x[0] < 1.0;
  }
  EXPECT_NEAR(static_cast<double>(first), 5000.0, 4 * 50.0);
  EXPECT_THROW(sample_synthetic({}, line, 10, rng), Error);
}

TEST(Grid, PitchSelection) {
  const Points same{{1.0}, {1.0}, {1.0}};
  EXPECT_EQ(select_grid_pitch(same, 0), 1.0);

  const Points two{{0.0}, {1.0}};
  const double g = select_grid_pitch(two, 0);
  EXPECT_GT(g, 1.0);
  EXPECT_LT(g, 1.0 * 1.02);

  Rng rng(63);
  const auto pts = uniform_points(200, 0.0, 1.0, rng);
  EXPECT_NEAR(select_grid_pitch(pts, pts.size()), data_diameter(pts) / 200, 1e-15);
  // Brute scan confirms nothing markedly smaller satisfies the target.
  const double chosen = select_grid_pitch(pts, 5);
  GridSpec grid{lower_corner(pts), chosen};
  EXPECT_LE(singleton_cells(pts, grid), 5u);
  grid.pitch = chosen / 1.011;
  EXPECT_GT(singleton_cells(pts, grid), 5u);
}

TEST(Classifier, SeparatesClusters) {
  Rng rng(64);
  std::normal_distribution<double> z(0.0, 0.1);
  auto cluster = [&](double c, std::size_t n) {
    Points out(n, Point(1));
    for (auto& x : out) x[0] = c + z(rng);
    return out;
  };
  const auto clf = fit_baseline_classifier(cluster(5, 200), cluster(-5, 200), {}, rng);
  std::size_t correct = 0;
  for (const auto& x : cluster(5, 500)) correct += clf.score(x) > 0;
  for (const auto& x : cluster(-5, 500)) correct += clf.score(x) < 0;
  EXPECT_GE(correct / 1000.0, 0.99);
}

TEST(Classifier, IdenticalClassesAreUninformative) {
  Rng rng(65);
  const auto pts = uniform_points(150, 0.0, 1.0, rng);
  const auto clf = fit_baseline_classifier(pts, pts, {}, rng);
  std::vector<double> s;
  for (const auto& x : pts) s.push_back(clf.score(x));
  EXPECT_NEAR(auc(s, s), 0.5, 0.05);
  for (double v : s) EXPECT_LT(std::fabs(v), 1e-3);
}

TEST(Classifier, MirroredDataGivesOddScores) {
  Rng rng(66);
  std::normal_distribution<double> z(0.0, 0.5);
  Points pos(80, Point(1)), neg(80, Point(1));
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i][0] = 1.0 + z(rng);
    neg[i][0] = -pos[i][0];
  }
  const auto clf = fit_baseline_classifier(pos, neg, {}, rng);
  for (double x = -3.0; x <= 3.0; x += 0.25) EXPECT_NEAR(clf.score({x}), -clf.score({-x}), 1e-6);
}

TEST(Classifier, DegenerateInput) {
  Rng rng(67);
  const Points same(10, Point{2.0});
  try {
    fit_baseline_classifier(same, same, {}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(Quantile, IndexFormula) {
  const auto a = umvufb_index(9, 0.5);
  EXPECT_EQ(a.lower, 5u);
  EXPECT_EQ(a.beta, 0.0);
  EXPECT_FALSE(a.fallback);
  const auto b = umvufb_index(9, 0.25);
  EXPECT_EQ(b.lower, 2u);
  EXPECT_EQ(b.upper, 3u);
  EXPECT_EQ(b.beta, 0.5);
  const auto c = umvufb_index(3, 0.9);
  EXPECT_TRUE(c.fallback);
  EXPECT_EQ(c.lower, 3u);
  EXPECT_THROW(umvufb_index(3, 1.0), Error);
  EXPECT_THROW(umvufb_index(3, 0.0), Error);
}

TEST(Quantile, RandomisedBranchFrequencies) {
  Rng rng(68);
  std::vector<double> v{9, 8, 7, 6, 5, 4, 3, 2, 1};
  int third = 0;
  for (int t = 0; t < 10000; ++t) {
    const double q = umvufb_quantile(v, 0.25, rng);
    ASSERT_TRUE(q == 2.0 || q == 3.0);
    third += q == 3.0;
  }
  EXPECT_NEAR(third / 10000.0, 0.5, 0.02);
  EXPECT_EQ(umvufb_quantile(v, 0.5, rng), 5.0);
}

TEST(Quantile, UnbiasedOnUniform) {
  Rng rng(69);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> v(49);
    for (auto& x : v) x = u(rng);
    const double f = umvufb_quantile(v, 0.3, rng);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / reps;
  EXPECT_NEAR(mean, 0.3, 0.01);
  EXPECT_LE(sum2 / reps - mean * mean, 1.0 / (4 * 50) + 0.002);
}

TEST(Scc, RejectionRules) {
  EXPECT_TRUE(reject_by_score(1.0, 1.0 + 8e-9, 2.0, 8.0, 1e-9));
  EXPECT_FALSE(reject_by_score(1.0, 1.0 + 8e-9, 1.0 + 8e-9, 8.0, 1e-9));
  EXPECT_FALSE(reject_by_score(3.0, 1.0, 2.0, 8.0, 1e-9));
}

TEST(Scc, MarginsAndThresholdStreams) {
  const Margins m = margins_for(1000, 0.1, 1.0);
  EXPECT_NEAR(m.theta, 10.0, 1e-12);
  EXPECT_NEAR(m.delta_minus, 0.0, 1e-12);
  EXPECT_NEAR(m.delta_plus, 0.2, 1e-12);
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 0.0);
  Rng j1(1), e1(2), j2(1), e2(2);
  const auto t1 = fit_thresholds(s, m, 8.0, j1, e1);
  const auto t2 = fit_thresholds(s, m, 8.0, j2, e2);
  EXPECT_EQ(t1.t_minus, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(t1.t_plus, t2.t_plus);
  EXPECT_NEAR(t1.sigma, 99e-9, 1e-20);
}

TEST(Scc, UniformTargetValidity) {
  Rng rng(70);
  const auto train = uniform_points(2000, 0.0, 1.0, rng);
  const auto model = train_scc(train, 0.1, {}, 7);
  const auto holdout = uniform_points(10000, 0.0, 1.0, rng);
  const double err = reject_fraction(model, holdout);
  EXPECT_LE(err, 0.13);
  EXPECT_LE(err, 0.1 + 3 * std::sqrt(0.1 * 0.9 / 1e4) + 1.0 / model.margins.theta);
  EXPECT_TRUE(reject(model, {5.0}));
}

TEST(Scc, GaussianCaptureAndMonotoneScores) {
  Rng rng(71);
  const auto train = StandardNormal::sample(2000, rng);
  const auto model = train_scc(train, 0.1, {}, 11);
  const auto holdout = StandardNormal::sample(10000, rng);
  const double level = StandardNormal::level(0.1);
  std::size_t low = 0, caught = 0, rejected = 0;
  for (const auto& x : holdout) {
    const bool r = reject(model, x);
    rejected += r;
    if (StandardNormal::density(x[0]) < level) {
      ++low;
      caught += r;
    }
  }
  EXPECT_LE(rejected / 1e4, 0.13);
  EXPECT_GE(static_cast<double>(caught) / low, 0.8);

  std::vector<double> h, p;
  for (const auto& x : holdout) {
    if (!is_covered(model.covered, grid_key(x, model.grid))) continue;
    h.push_back(model.classifier->score(x));
    p.push_back(StandardNormal::density(x[0]));
  }
  EXPECT_GE(spearman(h, p), 0.95);
  EXPECT_GT(model.t_plus, model.t_minus);
  EXPECT_TRUE(model.inclusive());
  EXPECT_FALSE(reject(model, {0.0}));
}

TEST(Scc, JitterSeedBarelyMatters) {
  Rng rng(72);
  const auto train = StandardNormal::sample(1000, rng);
  SccModel a = train_scc(train, 0.1, {}, 3);
  // Re-fit thresholds with a different jitter stream only.
  std::vector<double> scores;
  for (const auto& x : train) scores.push_back(a.classifier->score(x));
  Rng j(999), e = make_rng(3, {static_cast<std::uint64_t>(Stream::kEstimator)});
  const auto t = fit_thresholds(scores, a.margins, a.jitter_m, j, e);
  SccModel b = a;
  b.t_minus = t.t_minus;
  b.t_plus = t.t_plus;
  const auto holdout = StandardNormal::sample(10000, rng);
  std::size_t diff = 0;
  for (const auto& x : holdout) diff += reject(a, x) != reject(b, x);
  EXPECT_LE(diff / 1e4, 0.001);
}

TEST(Scc, SymmetricBimodalRejectsSymmetrically) {
  // Mirror-symmetric training data; each held-out point is scored together
  // with its mirror image. Median over seeds absorbs sampling noise.
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(73 + seed);
    std::normal_distribution<double> z(0.0, 0.7);
    std::bernoulli_distribution side(0.5);
    auto draw = [&](std::size_t n) {
      Points out(n, Point(1));
      for (auto& x : out) x[0] = (side(rng) ? 2.0 : -2.0) + z(rng);
      return out;
    };
    Points train = draw(1000);
    for (std::size_t i = 0; i < 1000; ++i) train.push_back({-train[i][0]});
    const auto model = train_scc(train, 0.5, {}, 5 + seed);
    std::size_t left = 0, right = 0;
    const auto holdout = draw(5000);
    for (const auto& x : holdout) {
      left += reject(model, {-std::fabs(x[0])});
      right += reject(model, {std::fabs(x[0])});
    }
    gaps.push_back(std::fabs(static_cast<double>(left) - static_cast<double>(right)) / 5000.0);
  }
  std::nth_element(gaps.begin(), gaps.begin() + 4, gaps.end());
  EXPECT_LE(gaps[4], 0.05);
}

TEST(Classifier, GradientSolverMatchesNewton) {
  Rng rng(75);
  const auto pos = StandardNormal::sample(150, rng);
  const auto neg = uniform_points(150, -3.0, 3.0, rng);
  KernelConfig newton;
  KernelConfig gd;
  gd.solver = KernelSolver::kGradient;
  gd.max_iterations = 20000;
  gd.gradient_tolerance = 1e-7;
  Rng r1(5), r2(5);
  const auto a = fit_baseline_classifier(pos, neg, newton, r1);
  const auto b = fit_baseline_classifier(pos, neg, gd, r2);
  EXPECT_TRUE(a.info().converged);
  EXPECT_LE(a.info().final_loss, b.info().final_loss + 1e-9);
  EXPECT_NEAR(a.info().final_loss, b.info().final_loss, 1e-5);
}

TEST(Scc, SyntheticLeakageShrinksWithN) {
  std::vector<double> leak;
  for (std::size_t n : {500, 2000, 8000}) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      Rng rng(100 + s);
      const auto pts = uniform_points(n, 0.0, 1.0, rng);
      GridSpec grid{lower_corner(pts), default_pitch(pts)};
      std::uniform_real_distribution<double> shift(0.0, 1.0);
      grid.origin[0] -= grid.pitch * shift(rng);
      const auto syn = sample_synthetic(covered_cells(pts, grid), grid, 4000, rng);
      std::size_t out = 0;
      for (const auto& x : syn) out += x[0] < 0.0 || x[0] > 1.0;
      total += static_cast<double>(out) / syn.size();
    }
    leak.push_back(total / 3);
  }
  EXPECT_GE(leak[0], leak[1]);
  EXPECT_GE(leak[1], leak[2]);
}

TEST(Scc, ValidationSplitAndNegbinom) {
  Rng rng(74);
  const auto train = StandardNormal::sample(600, rng);
  SccConfig cfg;
  cfg.validation_fraction = 0.3;
  cfg.negbinom = true;
  cfg.min_count = 2;
  const auto model = train_scc(train, 0.2, cfg, 9);
  EXPECT_EQ(model.n_train, 420u);
  EXPECT_NE(model.n_synthetic, 0u);
  const auto again = train_scc(train, 0.2, cfg, 9);
  EXPECT_EQ(model.t_minus, again.t_minus);
  EXPECT_EQ(model.covered, again.covered);
}

}  // namespace
}  // namespace advscc
