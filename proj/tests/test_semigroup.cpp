// Copyright 2026 The Authors.
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

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qvar/semigroup.hpp"

using namespace qvar;

namespace {

template <typename F>
std::vector<double> values(const F& f) {
  return f.flat();
}

const MarkovOperator kSwap(2, {0.0, 1.0, 1.0, 0.0}, {true, true});
const MarkovOperator kMix(2, {0.5, 0.5, 0.5, 0.5}, {true, true});

StateFn random_fn(std::mt19937_64& rng, std::size_t K, double r = 2.0) {
  std::normal_distribution<double> g;
  std::vector<double> v(K * 2);
  for (double& x : v) x = g(rng);
  return StateFn(NormSpec(r, 2), v);
}

StateFn constant_fn(std::size_t K, double c) { return StateFn(NormSpec(2.0, 2), std::vector<double>(2 * K, c)); }

}  // namespace

TEST_CASE("semigroup on the two point chain") {
  const DiffusionSemigroup S(kSwap);
  CHECK(S.eigenvalues().front() == doctest::Approx(-2.0));
  CHECK(S.gap_eigenvalue() == doctest::Approx(-2.0));
  const StateFn eig = StateFn::scalar({1.0, -1.0});
  const StateFn out = semigroup_apply(S, std::log(2.0), eig);
  CHECK(out.flat()[0] == doctest::Approx(0.25));
  CHECK(out.flat()[1] == doctest::Approx(-0.25));
  CHECK(max_distance(semigroup_apply(S, 0.0, eig), eig) <= 1e-14);
  CHECK_THROWS(DiffusionSemigroup(MarkovOperator(2, {0.5, 0.5, 0.0, 1.0})));
}

TEST_CASE("semigroup axioms on random chains") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t K = 2 + trial;
    const DiffusionSemigroup S(MarkovOperator::random_symmetric(K, rng));
    const StateFn f = random_fn(rng, K);
    CHECK(max_distance(semigroup_apply(S, 3.0, constant_fn(K, 2.0)), constant_fn(K, 2.0)) <= 1e-10);
    for (double t : {0.1, 1.0, 10.0}) {
      const std::vector<double> P = S.matrix(t);
      for (std::size_t a = 0; a < K; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < K; ++b) {
          CHECK(P[a * K + b] >= -1e-10);
          CHECK(P[a * K + b] == doctest::Approx(P[b * K + a]));
          row += P[a * K + b];
        }
        CHECK(row == doctest::Approx(1.0));
      }
      CHECK(max_distance(semigroup_apply(S, 0.5, semigroup_apply(S, t, f)), semigroup_apply(S, t + 0.5, f)) <= 1e-10);
      const StateFn rest = semigroup_apply(S, t, f) - mean_projection(S, f);
      CHECK(rest.lp_norm(2.0) <= std::exp(t * S.gap_eigenvalue()) * f.lp_norm(2.0) + 1e-12);
    }
  }
}

TEST_CASE("derivative family") {
  const DiffusionSemigroup S(kMix);
  std::mt19937_64 rng(32);
  const StateFn f = random_fn(rng, 2);
  CHECK(max_distance(derivative_family(S, 0, 0.7, f), semigroup_apply(S, 0.7, f)) <= 1e-14);
  CHECK(derivative_family(S, 2, 0.7, constant_fn(2, 3.0)).sup_norm() <= 1e-14);
  const StateFn eig = StateFn::scalar({1.0, -1.0});
  double best = 0.0, arg = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 0.01 * i;
    const double v = derivative_family(S, 1, t, eig).flat()[0];
    CHECK(v == doctest::Approx(-t * std::exp(-t)));
    if (std::fabs(v) > best) best = std::fabs(v), arg = t;
  }
  CHECK(arg == doctest::Approx(1.0));
  CHECK(best == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("semigroup variation and jumps") {
  const DiffusionSemigroup S(MarkovOperator::cycle_walk(8));
  std::mt19937_64 rng(33);
  const StateFn f = random_fn(rng, 8, 3.0);
  const std::vector<double> times = geometric_times(-6, 4, 2);
  for (double x : values(semigroup_variation(S, constant_fn(8, 1.0), 4.0, times))) {
    CHECK(x == doctest::Approx(std::sqrt(2.0)));
  }
  const StateFn one = semigroup_variation(S, f, 4.0, {0.5});
  const StateFn at = semigroup_apply(S, 0.5, f);
  for (std::size_t s = 0; s < 8; ++s) {
    CHECK(one.flat()[s] == doctest::Approx(norm(f.space(), std::span(at.at(s), 2))));
  }
  const StateFn v = semigroup_variation(S, f, 4.0, times);
  CHECK(jump_estimate_ratio(S, f, 4.0, 2.0, 1.01 * v.sup_norm(), times) == 0.0);
  for (double lambda : {0.05, 0.1, 0.3, 1.0}) {
    const auto jumps = semigroup_jumps(S, f, lambda, times);
    for (std::size_t s = 0; s < 8; ++s) {
      CHECK(std::pow(lambda, 4.0) * static_cast<double>(jumps[s]) <= std::pow(v.flat()[s], 4.0));
    }
    CHECK(std::isfinite(jump_estimate_ratio(S, f, 4.0, 2.0, lambda, times)));
  }
  CHECK_THROWS(semigroup_variation(S, f, 2.0, times));
}

TEST_CASE("geometric time grids nest under doubling") {
  const std::vector<double> a = geometric_times(-3, 2, 2);
  const std::vector<double> b = geometric_times(-3, 2, 4);
  CHECK(a.size() == 11);
  CHECK(a.front() == 0.125);
  CHECK(a.back() == 4.0);
  for (double t : a) CHECK(std::find(b.begin(), b.end(), t) != b.end());
}

TEST_CASE("mean projection and convergence profile") {
  const DiffusionSemigroup S(MarkovOperator::cycle_walk(6));
  CHECK(max_distance(mean_projection(S, constant_fn(6, 2.0)), constant_fn(6, 2.0)) <= 1e-12);
  std::mt19937_64 rng(34);
  StateFn f = random_fn(rng, 6);
  const StateFn mean = mean_projection(S, f);
  f -= mean;
  CHECK(mean_projection(S, f).sup_norm() <= 1e-12);
  const std::vector<double> deltas{1.0, 0.5, 0.25, 0.125, 0.0625};
  for (double x : convergence_rate_profile(S, constant_fn(6, 1.0), 2.0, deltas)) CHECK(x == doctest::Approx(0.0));
  const std::vector<double> prof = convergence_rate_profile(S, f, 2.0, deltas);
  const std::vector<double> bound = convergence_rate_bound(S, f, deltas);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i > 0) CHECK(prof[i] <= prof[i - 1] + 1e-15);
    CHECK(prof[i] <= bound[i] + 1e-12);
  }
}

TEST_CASE("Poisson kernels") {
  CHECK(poisson_line(1.0, 0.0) == doctest::Approx(1.0 / std::numbers::pi));
  for (double t : {0.3, 1.0, 2.5}) {
    CHECK(poisson_line(t, 0.7) == doctest::Approx(poisson_line(1.0, 0.7 / t) / t));
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double th = std::numbers::pi * ((i + 0.5) / n - 0.5);
      const double c = std::cos(th);
      sum += poisson_line(t, std::tan(th)) / (c * c);
    }
    CHECK(sum * std::numbers::pi / n == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(poisson_circle(std::log(2.0), 0.0) == doctest::Approx(3.0));
  for (double t : {0.13, 0.25, 0.5, 1.0}) {
    double integral = 0.0;
    for (int k = 0; k < 2048; ++k) {
      const double th = k / 2048.0;
      integral += poisson_circle(t, th);
      CHECK(std::fabs(poisson_circle(t, th) - poisson_circle_series(t, th, 200)) <= 1e-10);
    }
    CHECK(std::fabs(integral / 2048.0 - 1.0) <= 1e-10);
  }
}

TEST_CASE("periodized line kernel") {
  CHECK(poisson_summation_residual(1.0, 0.0, 10000) <= 1e-3);
  double prev = poisson_summation_residual(1.0, 0.3, 1);
  for (std::size_t N : {2, 5, 10, 50, 100, 1000}) {
    const double r = poisson_summation_residual(1.0, 0.3, N);
    CHECK(r <= prev);
    prev = r;
  }
  CHECK(poisson_summation_residual(1.0, 1.3, 5000) == doctest::Approx(poisson_summation_residual(1.0, 0.3, 5000)).epsilon(1e-3));
}

TEST_CASE("lacunary gap") {
  CHECK(lacunary_gap(1) == 0.3125);
  CHECK(lacunary_gap_limit() == doctest::Approx(std::exp(-0.5) - std::exp(-1.0)));
  CHECK(std::fabs(lacunary_gap(30) - lacunary_gap_limit()) <= 1e-6);
  CHECK(std::fabs(lacunary_gap(200) - lacunary_gap_limit()) <= 1e-12);
  CHECK_THROWS(lacunary_gap(0));
}

TEST_CASE("cotype necessity ratio") {
  for (double r : {1.5, 2.0, 4.0, kInfinity}) {
    CHECK(cotype_necessity_ratio(NormSpec(r, 4), 2.0, 1, {1}) == doctest::Approx(1.0));
  }
  std::mt19937_64 rng(35);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t K : {2, 4, 8}) {
    std::vector<int> signs(K);
    for (int& s : signs) s = coin(rng) ? 1 : -1;
    CHECK(cotype_necessity_ratio(NormSpec(2.0, K), 2.0, K, signs) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cotype_necessity_ratio(NormSpec(4.0, K), 2.0, K, signs) ==
          doctest::Approx(std::pow(static_cast<double>(K), 0.25)).epsilon(1e-6));
  }
  CHECK_THROWS(cotype_necessity_ratio(NormSpec(2.0, 2), 2.0, 2, {1}));
}
