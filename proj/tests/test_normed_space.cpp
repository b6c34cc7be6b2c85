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
#include "qvar/normed_space.hpp"

using namespace qvar;

TEST_CASE("norm of (3,4)") {
  const VecB v{3.0, 4.0};
  CHECK(norm(NormSpec(2.0, 2), v) == doctest::Approx(5.0));
  CHECK(norm(NormSpec(kInfinity, 2), v) == 4.0);
  CHECK(norm(NormSpec(1.0, 2), v) == 7.0);
  CHECK(norm(NormSpec(3.0, 2), v) == doctest::Approx(std::cbrt(91.0)));
}

TEST_CASE("norm rejects bad spaces") {
  CHECK_THROWS_AS(NormSpec(0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec(2.0, 0), std::invalid_argument);
  CHECK_THROWS(norm(NormSpec(2.0, 3), VecB{1.0, 2.0}));
}

TEST_CASE("cotype exponent") {
  CHECK(cotype_exponent(NormSpec(1.5, 1)) == 2.0);
  CHECK(cotype_exponent(NormSpec(3.0, 1)) == 3.0);
  CHECK(cotype_exponent(NormSpec(2.0, 1)) == 2.0);
  CHECK(cotype_exponent(NormSpec(1.0, 1)) == 2.0);
  CHECK(std::isinf(cotype_exponent(NormSpec(kInfinity, 1))));
}

TEST_CASE("seq_lq") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(seq_lq(ones, 2.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(seq_lq({}, 3.0) == 0.0);
  const std::vector<double> two{2.0};
  CHECK(seq_lq(two, 7.0) == doctest::Approx(2.0));
}

TEST_CASE("norm axioms on random vectors") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (double r : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    const NormSpec space(r, 5);
    CHECK(norm(space, VecB::zeros(5)) == 0.0);
    for (int trial = 0; trial < 200; ++trial) {
      VecB u = VecB::zeros(5), v = VecB::zeros(5);
      for (std::size_t i = 0; i < 5; ++i) u[i] = g(rng), v[i] = g(rng);
      const double a = g(rng);
      CHECK(norm(space, u) > 0.0);
      CHECK(norm(space, a * u) == doctest::Approx(std::fabs(a) * norm(space, u)));
      CHECK(norm(space, u + v) <= norm(space, u) + norm(space, v) + 1e-12);
      CHECK(norm_pow(space, u.coords().data(), 3.0) == doctest::Approx(std::pow(norm(space, u), 3.0)));
      CHECK(diff_norm(space, u.coords().data(), v.coords().data()) == doctest::Approx(norm(space, u - v)));
    }
  }
}
