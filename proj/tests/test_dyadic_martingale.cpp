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
#include <sstream>

#include "doctest.h"
#include "qvar/dyadic_martingale.hpp"
#include "qvar/harness.hpp"

using namespace qvar;

namespace {

template <typename F>
std::vector<double> values(const F& f) {
  return f.flat();
}

const DyadicGrid kLine(1, 2);

GridFn line(std::vector<double> v) { return GridFn::scalar(kLine, std::move(v)); }

}  // namespace

TEST_CASE("grid indexing") {
  const DyadicGrid g(2, 3);
  CHECK(g.side() == 8);
  CHECK(g.points() == 64);
  for (std::size_t i = 0; i < g.points(); ++i) CHECK(g.index(g.coords(i)) == i);
  CHECK_THROWS(DyadicGrid(0, 2));
  CHECK_THROWS(DyadicGrid(1, -1));
}

TEST_CASE("conditional expectation") {
  const GridFn f = line({1.0, 3.0, 5.0, 7.0});
  CHECK(cond_expect(f, 0) == f);
  CHECK(cond_expect(f, 1).flat() == std::vector<double>{2.0, 2.0, 6.0, 6.0});
  CHECK(cond_expect(f, 2).flat() == std::vector<double>{4.0, 4.0, 4.0, 4.0});
  CHECK(mart_diff(f, 1).flat() == std::vector<double>{-1.0, 1.0, -1.0, 1.0});
  CHECK_THROWS(cond_expect(f, 3));
  CHECK_THROWS(mart_diff(f, 0));
}

TEST_CASE("martingale differences telescope") {
  std::mt19937_64 rng(3);
  for (std::size_t d : {1, 2}) {
    const DyadicGrid grid(d, 4);
    const GridFn f = integer_gridfn(grid, NormSpec(2.0, 2), -5, 5, rng);
    GridFn sum(grid, f.space());
    for (int l = 1; l <= 4; ++l) sum += mart_diff(f, l);
    CHECK(sum == f - cond_expect(f, 4));
    const GridFn c = GridFn(grid, NormSpec(2.0, 2), std::vector<double>(grid.points() * 2, 1.5));
    for (int l = 1; l <= 4; ++l) {
      for (double x : values(mart_diff(c, l))) CHECK(x == 0.0);
    }
  }
}

TEST_CASE("cotype functional") {
  const GridFn c = GridFn(DyadicGrid(1, 3), NormSpec(2.0, 2), std::vector<double>(16, 2.0));
  const CotypeTerms t = cotype_functional(c, 3.0);
  CHECK(t.lhs == doctest::Approx(std::pow(std::sqrt(8.0), 3.0)));
  CHECK(t.rhs == doctest::Approx(t.lhs));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const GridFn f = gaussian_gridfn(DyadicGrid(1 + trial % 2, 3), NormSpec(2.0, 3), rng);
    const CotypeTerms h = cotype_functional(f, 2.0);
    CHECK(h.lhs == doctest::Approx(h.rhs).epsilon(1e-12));
  }
  CHECK_THROWS(cotype_functional(c, 1.5));
}

TEST_CASE("martingale variation") {
  const GridFn f = line({1.0, 3.0, 5.0, 7.0});
  CHECK(mart_variation(f, 2.0).flat()[0] == doctest::Approx(5.0));
  const GridFn c = line({2.0, 2.0, 2.0, 2.0});
  for (double x : values(mart_variation(c, 3.0))) CHECK(x == doctest::Approx(2.0));
  std::mt19937_64 rng(8);
  const GridFn g = gaussian_gridfn(DyadicGrid(2, 3), NormSpec(3.0, 2), rng);
  const GridFn v2 = mart_variation(g, 2.0);
  const GridFn v4 = mart_variation(g, 4.0);
  for (std::size_t i = 0; i < g.points(); ++i) CHECK(v4.flat()[i] <= v2.flat()[i] + 1e-12);
}

TEST_CASE("dyadic BMO") {
  CHECK(dyadic_bmo_norm(line({3.0, 3.0, 3.0, 3.0})) == 0.0);
  CHECK(dyadic_bmo_norm(line({0.0, 0.0, 1.0, 1.0})) == doctest::Approx(0.5));
  std::mt19937_64 rng(9);
  const GridFn g = gaussian_gridfn(DyadicGrid(1, 5), NormSpec(2.0, 1), rng);
  GridFn shifted = g;
  for (double& x : shifted.flat()) x += 0.75;
  CHECK(dyadic_bmo_norm(shifted) == doctest::Approx(dyadic_bmo_norm(g)));
}

TEST_CASE("Calderon-Zygmund examples") {
  const GridFn f = line({8.0, 0.0, 0.0, 0.0});
  const CZParts p = cz_decompose(f, 3.0);
  REQUIRE(p.cubes.size() == 1);
  CHECK(p.cubes[0].level == 1);
  CHECK(p.cubes[0].corner == std::vector<std::size_t>{0});
  CHECK(p.good.flat() == std::vector<double>{4.0, 4.0, 0.0, 0.0});
  CHECK(p.bad.flat() == std::vector<double>{4.0, -4.0, 0.0, 0.0});
  CHECK(check_cz(f, p).all());

  const CZParts none = cz_decompose(f, 8.0);
  CHECK(none.cubes.empty());
  CHECK(none.good == f);
  for (double x : none.bad.flat()) CHECK(x == 0.0);
  CHECK_THROWS_AS(cz_decompose(f, 1.0), std::domain_error);
  CHECK_THROWS(cz_decompose(f, -1.0));
}

TEST_CASE("Calderon-Zygmund properties on integer data") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const DyadicGrid grid(1 + trial % 2, 2 + trial % 3);
    GridFn f = integer_gridfn(grid, NormSpec(trial % 2 ? 1.0 : kInfinity, 2), -8, 8, rng);
    for (std::size_t i = 0; i < f.flat().size(); i += 3) f.flat()[i] = 0.0;
    const double root = f.mean_norm_pow(1.0);
    if (root == 0.0) continue;
    const CZParts p = cz_decompose(f, root * (1.0 + trial % 4));
    const CZCheck k = check_cz(f, p);
    CHECK(k.disjoint);
    CHECK(k.small_off_omega);
    CHECK(k.cube_averages);
    CHECK(k.maximal_inclusions);
    CHECK(k.exact_sum);
    CHECK(k.good_bounds);
    CHECK(k.bad_pieces);
    GridFn total = p.good;
    for (std::size_t i = 0; i < p.cubes.size(); ++i) total += p.bad_piece(i);
    CHECK(total == f);
  }
}

TEST_CASE("grid function round trip") {
  std::mt19937_64 rng(12);
  for (double r : {1.0, 2.5, kInfinity}) {
    const GridFn f = gaussian_gridfn(DyadicGrid(2, 2), NormSpec(r, 3), rng);
    std::stringstream ss;
    write_gridfn(ss, f);
    CHECK(read_gridfn(ss) == f);
  }
  std::istringstream bad("1 2 1 2\n1 2 3\n");
  CHECK_THROWS(read_gridfn(bad));
}
