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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "advscc/adversary_oracle.hpp"
#include "advscc/checks.hpp"
#include "advscc/discrete_game.hpp"
#include "advscc/experiments.hpp"
#include "advscc/quantile.hpp"
#include "advscc/scc.hpp"
#include "test_support.hpp"

namespace {

using namespace advscc;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Pmf skewed17() {
  std::vector<double> v(16, 0.05);
  v.push_back(0.2);
  return Pmf::from_values(v);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Divergence of q against p written out directly, independent of the
// library's divergence code.
double direct_divergence(const DivergenceKind& kind, const std::vector<double>& q,
                         const Pmf& p) {
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (kind.family() == DivergenceKind::Family::kKl2) {
      if (q[i] > 0.0) d += q[i] * std::log2(q[i] / p[i]);
    } else {
      d += (q[i] - p[i]) * (q[i] - p[i]);
    }
  }
  return d;
}

// --------------------------------------------------------------------------

Outcome c1_skewed17() {
  const auto t0 = std::chrono::steady_clock::now();
  const GameSpec a(skewed17(), 0.2, 3.0, DivergenceKind::kl2());
  const GameSpec b(skewed17(), 0.2, 3.2, DivergenceKind::kl2());
  const auto sa = solve_soft(a);
  const auto sb = solve_soft(b);
  const double t = seconds_since(t0);
  const bool ok = sa.z && sb.z && std::fabs(*sa.z - 0.2) <= 1e-6 && sa.vulnerable &&
                  std::fabs(*sb.z - 0.2) <= 1e-6 && t < 1.0;
  return {ok, fmt("lambda=3: z=%.12g vulnerable=%s; lambda=3.2: z=%.12g; %.3fs",
                  sa.z.value_or(NAN), sa.vulnerable ? "true" : "false", sb.z.value_or(NAN), t)};
}

Outcome c2_rejection_rates() {
  const double r1 = rejection_rate(RejectionFunction::soft({0, 1, 0}),
                                   std::vector<double>{0.01, 0.02, 0.97});
  const double r2 = rejection_rate(RejectionFunction::soft({0, 0.125}), std::vector<double>{0.1, 0.9});
  const double r3 = rejection_rate(RejectionFunction::soft({0, 0.125}), std::vector<double>{0.2, 0.8});
  const bool ok = r1 == 0.02 && std::fabs(r2 - 0.1125) <= 1e-12 && std::fabs(r3 - 0.1) <= 1e-12;
  return {ok, fmt("rho values %.17g, %.17g, %.17g", r1, r2, r3)};
}

Outcome c3_ldrf() {
  const Pmf p = make_pmf({0.02, 0.03, 0.05, 0.05, 0.85});
  const GameSpec spec(p, 0.1, 1.0, DivergenceKind::kl2());
  const auto h = solve_hard_ldrs(spec);
  // Ties go to the lower index, so the first 0.05 event joins.
  const bool picks = h.rejected == std::vector<std::size_t>{0, 1, 2};
  const double best = testing::max_monotone_hard_mass(p, 0.1);
  const bool ok = std::fabs(h.rejected_mass - 0.1) <= 1e-15 && picks &&
                  best <= h.rejected_mass + 1e-15;
  return {ok, fmt("rejected mass %.17g over %zu events; exhaustive monotone maximum %.17g",
                  h.rejected_mass, h.rejected.size(), best)};
}

Outcome c4_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepConfig cfg;
  cfg.seed = 20260101;
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto rep = run_sweep(cfg);
  const double t = seconds_since(t0);

  std::size_t failures = 0;
  bool a = true, c = true;
  for (std::size_t i = 0; i < rep.summary.size(); ++i) {
    const auto& s = rep.summary[i];
    failures += s.failures;
    a = a && s.mean_soft <= s.mean_hard;
    if (i > 0) {
      const auto& prev = rep.summary[i - 1];
      c = c && s.mean_soft <= prev.mean_soft + 2 * std::max(s.sem_soft, prev.sem_soft);
      c = c && s.mean_hard <= prev.mean_hard + 2 * std::max(s.sem_hard, prev.sem_hard);
    }
  }
  const auto& first = rep.summary.front();
  const bool b = std::fabs(first.mean_soft - 0.95) <= 0.01 && std::fabs(first.mean_hard - 1.0) <= 0.005;
  const bool ok = failures == 0 && a && b && c && t < 300.0;
  return {ok, fmt("%zu instances, %zu failures; soft<=hard %s; lambda=0.5 soft=%.4f hard=%.4f; "
                  "non-increasing within 2 SEM %s; %.1fs on %zu threads",
                  rep.rows.size(), failures, a ? "yes" : "no", first.mean_soft, first.mean_hard,
                  c ? "yes" : "no", t, cfg.jobs)};
}

Outcome c5_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng = make_rng(505);
  std::uniform_int_distribution<std::size_t> size(2, 4);
  const int resolution = 1000;
  std::size_t passed = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto kind = i % 2 ? DivergenceKind::sq_euclid() : DivergenceKind::kl2();
    const std::size_t n = size(rng);
    const GameSpec spec = testing::random_game(n, kind, 0.05, 0.5, rng);
    const auto sol = solve_soft(spec);
    const double tol = 2.0 * static_cast<double>(n) / resolution;
    const auto brute = brute_force_best_response(sol.r_events, spec, resolution);
    const auto structured = best_response(sol.r_events, spec);
    const double gap = std::fabs(*sol.z - brute.value);
    worst = std::max(worst, gap);
    if (sol.z && gap <= tol && structured.value <= brute.value + tol) ++passed;
  }
  const double t = seconds_since(t0);
  return {passed == 100 && t < 120.0,
          fmt("%zu/100 instances agree; worst |z - brute| %.3g; %.1fs", passed, worst, t)};
}

Outcome c6_pair_roots() {
  Rng rng = make_rng(606);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t passed = 0, total = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto kind = i % 2 ? DivergenceKind::sq_euclid() : DivergenceKind::kl2();
    const GameSpec spec = testing::random_game(size(rng), kind, 0.1, 0.2, rng);
    const auto part = partition_level_sets(spec.p);
    const auto cls = classify_level_sets(part, kind, spec.lambda, spec.p);
    const auto ls = cls.members_of(ConstraintClass::kL);
    const auto hs = cls.members_of(ConstraintClass::kH);
    if (ls.empty() || hs.empty()) continue;
    const std::size_t l = ls[static_cast<std::size_t>(u(rng) * ls.size())];
    const std::size_t h = hs[static_cast<std::size_t>(u(rng) * hs.size())];
    const std::size_t j = part.sets[l].members.front();
    const std::size_t k = part.sets[h].members.front();
    const double q = pair_root(part, l, h, kind, spec.lambda, spec.p);
    ++total;

    auto g = [&](double x) {
      std::vector<double> mix(spec.p.size(), 0.0);
      mix[j] = x;
      mix[k] = 1.0 - x;
      return direct_divergence(kind, mix, spec.p) - spec.lambda;
    };
    const double err = std::fabs(g(q));
    worst = std::max(worst, err);
    int changes = 0;
    double prev = g(0.0);
    for (int s = 1; s <= 10000; ++s) {
      const double cur = g(s * 1e-4);
      if ((prev < 0) != (cur < 0)) ++changes;
      prev = cur;
    }
    if (err <= 1e-10 && changes == 1) ++passed;
  }
  return {total == 200 && passed == total,
          fmt("%zu/%zu roots within 1e-10 with a single sign change; worst residual %.3g", passed,
              total, worst)};
}

Outcome c7_divergence() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& kind : {DivergenceKind::kl2(), DivergenceKind::sq_euclid()}) {
    Rng rng = make_rng(707);
    const auto r = divergence_property_battery(kind, 1000, 5, rng);
    ok = ok && r.all_passed() && r.receding_applicable == 1000;
    os << kind.name() << ": receding " << r.receding_passed << "/" << r.receding_applicable
       << ", 2-symmetric " << r.symmetric_passed << "/1000, convex " << r.convex_passed
       << "/1000, transfer " << r.transfer_passed << "/1000; ";
  }
  return {ok, os.str()};
}

Outcome c8_dual() {
  Rng rng = make_rng(808);
  std::uniform_int_distribution<std::size_t> size(2, 10);
  std::size_t passed = 0, total = 0;
  double worst = 0.0;
  while (total < 50) {
    const auto kind = total % 2 ? DivergenceKind::sq_euclid() : DivergenceKind::kl2();
    const GameSpec spec = testing::random_game(size(rng), kind, 0.05, 0.5, rng);
    const auto primal = solve_soft(spec);
    if (!primal.z || *primal.z >= 1.0) continue;
    ++total;
    const auto dual = solve_dual(DualSpec(spec.p, 1.0 - *primal.z, spec.lambda, kind));
    const double err = std::fabs(dual.z_i - spec.delta);
    worst = std::max(worst, err);
    if (err <= 1e-6) ++passed;
  }
  return {passed == 50, fmt("%zu/50 round trips; worst |z_I - delta| %.3g", passed, worst)};
}

Outcome c9_umvufb() {
  const auto a = umvufb_index(9, 0.5);
  const auto b = umvufb_index(9, 0.25);
  const auto c = umvufb_index(3, 0.9);
  const bool table = !a.fallback && a.lower == 5 && a.beta == 0.0 && !b.fallback &&
                     b.lower == 2 && b.upper == 3 && b.beta == 0.5 && c.fallback && c.lower == 3;

  Rng rng = make_rng(909);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> v(49);
    for (auto& x : v) x = u(rng);
    const double t = umvufb_quantile(v, 0.3, rng);  // F(t) = t on U(0,1)
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / reps;
  const double var = (sum2 - reps * mean * mean) / (reps - 1);
  const double bound = 1.0 / (4.0 * 50) + 0.002;
  const bool ok = table && std::fabs(mean - 0.3) <= 0.01 && var <= bound;
  return {ok, fmt("tabulated cases %s; mean F(t) %.5f; var %.5f (bound %.5f)",
                  table ? "match" : "differ", mean, var, bound)};
}

Outcome c10_continuous() {
  const auto t0 = std::chrono::steady_clock::now();
  const double delta = 0.1;
  const double level = testing::StandardNormal::level(delta);
  std::vector<double> type1, capture;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng data = make_rng(seed, {1000});
    const Points train = testing::StandardNormal::sample(2000, data);
    const Points held = testing::StandardNormal::sample(10000, data);
    const SccModel m = train_scc(train, delta, SccConfig{}, seed);
    std::size_t rejected = 0, low = 0, low_rejected = 0;
    for (const auto& x : held) {
      const bool r = reject(m, x);
      rejected += r;
      if (testing::StandardNormal::density(x[0]) < level) {
        ++low;
        low_rejected += r;
      }
    }
    type1.push_back(static_cast<double>(rejected) / held.size());
    capture.push_back(static_cast<double>(low_rejected) / static_cast<double>(std::max<std::size_t>(low, 1)));
  }
  const double t = seconds_since(t0);
  const double m1 = median(type1), m2 = median(capture);
  return {m1 <= 0.13 && m2 >= 0.8 && t < 120.0,
          fmt("median type I %.4f; median low-density capture %.4f; %.1fs", m1, m2, t)};
}

Outcome c11_vacuous() {
  Rng rng = make_rng(1111);
  std::uniform_int_distribution<std::size_t> size(2, 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t passed = 0;
  for (int i = 0; i < 20; ++i) {
    const auto kind = i % 2 ? DivergenceKind::sq_euclid() : DivergenceKind::kl2();
    const Pmf p = testing::random_pmf(size(rng), rng);
    const auto d = point_mass_divergences(kind, p);
    const double lambda = 0.5 * *std::min_element(d.begin(), d.end());
    const double delta = 0.05 + 0.45 * u(rng);
    const GameSpec spec(p, delta, lambda, kind);
    const auto soft = solve_soft(spec);
    const auto hard = solve_hard_ldrs(spec);
    if (soft.status == GameStatus::kConstraintVacuous && soft.z &&
        std::fabs(*soft.z - delta) <= 1e-12 && hard.value && std::fabs(*hard.value) <= 1e-12)
      ++passed;
  }
  return {passed == 20, fmt("%zu/20 vacuous instances give z = delta and hard value 0", passed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"17-event exploitable target", c1_skewed17},
      {"rejection-rate fixtures", c2_rejection_rates},
      {"low-density rejection example", c3_ldrf},
      {"sweep qualitative properties", c4_sweep},
      {"oracle equivalence", c5_oracle},
      {"pair-root correctness", c6_pair_roots},
      {"divergence property battery", c7_divergence},
      {"primal-dual round trip", c8_dual},
      {"UMVUFB estimator", c9_umvufb},
      {"continuous learner validity", c10_continuous},
      {"unrestricted-game closed forms", c11_vacuous},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
