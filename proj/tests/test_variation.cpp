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
#include <random>

#include "doctest.h"
#include "qvar/variation.hpp"

using namespace qvar;

namespace {

TimeFamily random_family(std::mt19937_64& rng, std::size_t n, double r, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(n * dim);
  for (double& x : v) x = g(rng);
  return TimeFamily::indexed(NormSpec(r, dim), v);
}

}  // namespace

TEST_CASE("vq_norm_exact examples") {
  const TimeFamily single = TimeFamily::from_vectors(NormSpec(2.0, 2), {1.0}, {VecB{0.0, 2.0}});
  for (double q : {1.0, 2.0, 3.5}) CHECK(vq_norm_exact(single, q) == doctest::Approx(2.0));
  const TimeFamily constant = TimeFamily::from_vectors(NormSpec(2.0, 2), {1.0, 2.0, 3.0},
                                                       {VecB{3.0, 4.0}, VecB{3.0, 4.0}, VecB{3.0, 4.0}});
  CHECK(vq_norm_exact(constant, 2.0) == doctest::Approx(5.0));
  CHECK(vq_norm_bruteforce(constant, 2.0) == doctest::Approx(5.0));
  const TimeFamily zigzag = TimeFamily::scalar({0.0, 1.0, 0.0, 1.0});
  CHECK(vq_norm_exact(zigzag, 2.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(vq_norm_bruteforce(zigzag, 2.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(vq_norm_exact(TimeFamily::scalar({1.0, 3.0, 2.0}), 1.0) == doctest::Approx(4.0));
  CHECK(vq_norm_bruteforce(single, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("family validation") {
  CHECK_THROWS(TimeFamily(NormSpec(2.0, 1), {}, {}));
  CHECK_THROWS(TimeFamily(NormSpec(2.0, 1), {2.0, 1.0}, {0.0, 1.0}));
  CHECK_THROWS(TimeFamily(NormSpec(2.0, 2), {1.0, 2.0}, {0.0, 1.0}));
  CHECK_THROWS(vq_norm_exact(TimeFamily::scalar({1.0}), 0.5));
  CHECK_THROWS(vq_norm_bruteforce(TimeFamily::scalar(std::vector<double>(19, 1.0)), 2.0));
}

TEST_CASE("jump counts") {
  const TimeFamily zigzag = TimeFamily::scalar({0.0, 1.0, 0.0, 1.0});
  CHECK(jump_count(zigzag, 0.5) == 3);
  CHECK(jump_count_bruteforce(zigzag, 0.5) == 3);
  CHECK(jump_count_bruteforce(zigzag, 1.5) == 0);
  CHECK(jump_count(zigzag, 1.5) == 0);
  CHECK(jump_count(TimeFamily::scalar({2.0, 2.0, 2.0}), 0.1) == 0);
  CHECK(jump_count(TimeFamily::scalar({0.0, 1.0}), 1.0) == 0);
  CHECK(jump_count_bruteforce(TimeFamily::scalar({0.0, 1.0, 2.0, 3.0}), 0.9) == 3);
  CHECK(jump_count(TimeFamily::scalar({0.0, 1.0, 2.0, 3.0}), 0.9) == 3);
  CHECK_THROWS(jump_count(zigzag, 0.0));
}

TEST_CASE("jump variation gap") {
  CHECK(jump_variation_gap(TimeFamily::scalar({0.0, 1.0, 0.0, 1.0}), 0.5, 2.0) == doctest::Approx(2.25));
  CHECK(jump_variation_gap(TimeFamily::scalar({3.0, 3.0}), 0.5, 2.0) == doctest::Approx(9.0));
  CHECK(jump_variation_gap(TimeFamily::scalar({2.0}), 1.0, 3.0) == doctest::Approx(8.0));
}

TEST_CASE("dyadic blocks and interval split") {
  CHECK(dyadic_block(2.0) == 0);
  CHECK(dyadic_block(2.5) == 1);
  CHECK(dyadic_block(4.0) == 1);
  CHECK(dyadic_block(0.75) == -1);

  const std::vector<double> a{1.0, 10.0};
  const IntervalSplit s1 = split_intervals(a);
  REQUIRE(s1.long_intervals.size() == 1);
  CHECK(s1.long_intervals[0] == Interval{2.0, 8.0});
  CHECK(s1.short_by_block.at(0) == std::vector<Interval>{{1.0, 2.0}});
  CHECK(s1.short_by_block.at(3) == std::vector<Interval>{{8.0, 10.0}});

  const std::vector<double> b{2.5, 3.5};
  const IntervalSplit s2 = split_intervals(b);
  CHECK(s2.long_intervals.empty());
  REQUIRE(s2.short_by_block.size() == 1);
  CHECK(s2.short_by_block.at(1) == std::vector<Interval>{{2.5, 3.5}});

  const std::vector<double> c{1.5, 3.0, 5.0, 9.0};
  const IntervalSplit s3 = split_intervals(c);
  CHECK(s3.long_intervals.empty());
  CHECK(s3.short_by_block.at(0) == std::vector<Interval>{{1.5, 2.0}});
  CHECK(s3.short_by_block.at(1) == std::vector<Interval>{{2.0, 3.0}, {3.0, 4.0}});
  CHECK(s3.short_by_block.at(2) == std::vector<Interval>{{4.0, 5.0}, {5.0, 8.0}});
  CHECK(s3.short_by_block.at(3) == std::vector<Interval>{{8.0, 9.0}});

  CHECK_THROWS(split_intervals(std::vector<double>{0.0, 1.0}));
  CHECK_THROWS(split_intervals(std::vector<double>{2.0, 1.0}));
}

TEST_CASE("split covers the partition disjointly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> t(2 + trial % 9);
    for (double& x : t) x = std::exp2(u(rng));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() < 2) continue;
    const IntervalSplit s = split_intervals(t);
    std::vector<Interval> all;
    for (const auto& [k, list] : s.short_by_block) {
      for (const Interval& iv : list) {
        CHECK(dyadic_block(iv.lo) <= k);
        CHECK(iv.lo >= std::ldexp(1.0, k));
        CHECK(iv.hi <= std::ldexp(1.0, k + 1));
        all.push_back(iv);
      }
    }
    for (const Interval& iv : s.long_intervals) {
      int e = 0;
      CHECK(std::frexp(iv.lo, &e) == 0.5);
      CHECK(std::frexp(iv.hi, &e) == 0.5);
      CHECK(iv.lo < iv.hi);
      all.push_back(iv);
    }
    std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    REQUIRE(!all.empty());
    CHECK(all.front().lo == t.front());
    CHECK(all.back().hi == t.back());
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i].lo == all[i - 1].hi);
  }
}

TEST_CASE("split aggregates bound the original gaps") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 9.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(3 + trial % 7);
    for (double& x : t) x = std::exp2(u(rng));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<double> v(t.size() * 2);
    for (double& x : v) x = g(rng);
    const double q = 2.0 + trial % 3;
    const TimeFamily fam(NormSpec(2.0, 2), t, v);
    const SplitAggregates agg = split_aggregates(fam, q);
    CHECK(std::pow(agg.original, q) <=
          std::pow(3.0, q - 1.0) * (std::pow(agg.short_part, q) + std::pow(agg.long_part, q)) + 1e-12);
  }
}

TEST_CASE("variation properties on random families") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const double r = trial % 3 == 0 ? kInfinity : 1.0 + trial % 3;
    const TimeFamily fam = random_family(rng, n, r, 3);
    const double v2 = vq_norm_exact(fam, 2.0);
    const double v4 = vq_norm_exact(fam, 4.0);
    CHECK(v4 <= v2 + 1e-12);
    CHECK(v2 >= norm(fam.space(), fam.value_vec(0)) - 1e-12);
    CHECK(v2 == doctest::Approx(vq_norm_bruteforce(fam, 2.0)).epsilon(1e-12));
    if (n > 1) {
      std::vector<double> sub(fam.flat().begin(), fam.flat().end() - 3);
      CHECK(vq_norm_exact(NormSpec(r, 3), sub, 2.0) <= v2 + 1e-12);
    }
    const TimeFamily other = random_family(rng, n, r, 3);
    std::vector<double> sum(fam.flat().begin(), fam.flat().end());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.flat()[i];
    CHECK(vq_norm_exact(NormSpec(r, 3), sum, 3.0) <= vq_norm_exact(fam, 3.0) + vq_norm_exact(other, 3.0) + 1e-12);
    const double lambda = 0.3 + 0.1 * (trial % 7);
    CHECK(jump_count(fam, lambda) == jump_count_bruteforce(fam, lambda));
    CHECK(jump_variation_gap(fam, lambda, 2.5) >= 0.0);
  }
}
