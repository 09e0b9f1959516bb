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

#include <cmath>
#include <vector>

#include "advscc/adversary_oracle.hpp"
#include "advscc/discrete_game.hpp"
#include "test_support.hpp"

namespace advscc {
namespace {

TEST(BestResponse, VacuousTakesLeastRejectedEvent) {
  const GameSpec spec(make_pmf({0.5, 0.5}), 0.1, 0.5, DivergenceKind::kl2());
  const auto br = best_response(RejectionFunction::soft({0.3, 0.2}), spec);
  EXPECT_EQ(br.value, 0.2);
  EXPECT_EQ(br.q, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(br.mode, ResponseMode::kStructured);
}

TEST(BestResponse, VulnerableSingleton) {
  const GameSpec spec(make_pmf({0.2, 0.8}), 0.1, 1.0, DivergenceKind::kl2());
  const auto br = best_response(RejectionFunction::soft({0.0, 0.2}), spec);
  EXPECT_EQ(br.value, 0.0);
  EXPECT_EQ(br.q[0], 1.0);
}

TEST(BestResponse, PairValue) {
  const GameSpec spec(make_pmf({0.2, 0.8}), 0.1, 1.0, DivergenceKind::kl2());
  const auto br = best_response(RejectionFunction::soft({0.5, 0.0}), spec);
  EXPECT_NEAR(br.value, 0.7470197594522956 * 0.5, 1e-12);
  EXPECT_EQ(br.support().size(), 2u);
  EXPECT_NEAR(evaluate(DivergenceKind::kl2(), br.q, spec.p), 1.0, 1e-10);
}

TEST(BestResponse, InfeasibleThrows) {
  const GameSpec spec(make_pmf({0.5, 0.5}), 0.1, 2.0, DivergenceKind::kl2());
  try {
    best_response(RejectionFunction::soft({0.1, 0.1}), spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAdversaryInfeasible);
  }
}

TEST(BestResponse, UnrestrictedIsMinimumRate) {
  const Pmf p = make_pmf({0.1, 0.2, 0.3, 0.4});
  const auto br = unrestricted_best_response(RejectionFunction::soft({0.4, 0.05, 0.3, 0.05}), p);
  EXPECT_EQ(br.value, 0.05);
  EXPECT_EQ(br.q[1], 1.0);
  EXPECT_EQ(br.mode, ResponseMode::kUnrestricted);
}

TEST(BruteForce, ConstantRuleUnderVacuousConstraint) {
  const GameSpec spec(make_pmf({0.3, 0.3, 0.4}), 0.2, 0.1, DivergenceKind::kl2());
  const auto br = brute_force_best_response(uniform_soft_rejector(spec.p, 0.2), spec, 200);
  EXPECT_NEAR(br.value, 0.2, 1.0 / 200);
}

TEST(BruteForce, Errors) {
  const Pmf six = make_pmf({0.1, 0.1, 0.2, 0.2, 0.2, 0.2});
  const GameSpec big(six, 0.1, 0.5, DivergenceKind::kl2());
  EXPECT_THROW(brute_force_best_response(RejectionFunction::soft(std::vector<double>(6, 0.1)), big, 100),
               Error);
  const Pmf p = make_pmf({0.2, 0.8});
  const GameSpec above(p, 0.1, std::log2(5.0) + 1e-3, DivergenceKind::kl2());
  try {
    brute_force_best_response(RejectionFunction::soft({0.1, 0.1}), above, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFeasiblePoint);
  }
  const GameSpec ok(p, 0.1, 1.0, DivergenceKind::kl2());
  EXPECT_THROW(brute_force_best_response(RejectionFunction::soft({0.1, 0.1}), ok, 50), Error);
}

TEST(BruteForce, StructuredAgreesOnRandomInstances) {
  Rng rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int resolution = 400;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto& kind = t % 2 ? DivergenceKind::kl2() : DivergenceKind::sq_euclid();
    const GameSpec spec = testing::random_game(n, kind, 0.05, 0.5, rng);
    std::vector<double> rates(n);
    for (auto& r : rates) r = u(rng);
    const auto r = RejectionFunction::soft(rates);
    const auto structured = best_response(r, spec);
    const auto brute = brute_force_best_response(r, spec, resolution);
    const double tol = 2.0 * n / resolution;
    EXPECT_LE(structured.value, brute.value + tol);
    EXPECT_GE(structured.value, brute.value - tol);
    EXPECT_LE(structured.support().size(), 2u);
    EXPECT_GE(evaluate(kind, structured.q, spec.p), spec.lambda - 1e-8);
    if (!std::binary_search(r.argmin().begin(), r.argmin().end(), 0u) &&
        structured.support().size() == 2) {
      EXPECT_NEAR(evaluate(kind, structured.q, spec.p), spec.lambda, 1e-8);
    }
  }
}

TEST(Properties, KlTransfersPassOnRandomTargets) {
  Rng rng(53);
  for (int t = 0; t < 5; ++t) {
    const GameSpec spec = testing::random_game(5, DivergenceKind::kl2(), 0.1, 0.2, rng);
    const GameSpec easy(spec.p, spec.delta, 0.3 * spec.lambda, spec.divergence);
    const auto rep = property_abc_transfer_check(easy, 200, rng);
    EXPECT_EQ(rep.sampled, 200u);
    EXPECT_TRUE(rep.all_passed());
    EXPECT_EQ(rep.a_passed, rep.a_applicable);
    EXPECT_EQ(rep.b_passed, rep.b_applicable);
  }
}

TEST(Properties, SwapOfEqualEventsKeepsBregmanDivergence) {
  Rng rng(54);
  const Pmf p = make_pmf({0.1, 0.3, 0.3, 0.3});
  for (const auto& name : builtin_generator_names()) {
    const GameSpec spec(p, 0.1, 0.0, DivergenceKind::parse("bregman:" + name));
    const auto rep = property_abc_transfer_check(spec, 300, rng);
    EXPECT_GT(rep.c_applicable, 0u);
    EXPECT_EQ(rep.c_passed, rep.c_applicable) << name;
    EXPECT_TRUE(rep.all_passed()) << name;
  }
}

TEST(Properties, SingleLevelSetPassesVacuously) {
  Rng rng(55);
  const GameSpec spec(make_pmf({0.5, 0.5}), 0.1, 0.1, DivergenceKind::kl2());
  const auto rep = property_abc_transfer_check(spec, 50, rng);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_EQ(rep.a_applicable, 0u);
}

}  // namespace
}  // namespace advscc
