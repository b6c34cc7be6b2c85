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

// Dyadic filtration of the periodic grid (Z / 2^J Z)^d: conditional
// expectations, martingale differences, martingale q-variation, dyadic BMO
// and the vector-valued Calderon-Zygmund decomposition.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qvar/normed_space.hpp"

namespace qvar {

// Torus with N = 2^J points per axis, modelling [0,1)^d at spacing 2^-J.
class DyadicGrid {
 public:
  DyadicGrid(std::size_t d, int J);

  std::size_t d() const { return d_; }
  int J() const { return J_; }
  std::size_t side() const { return side_; }
  std::size_t points() const { return points_; }

  // Row-major: the last coordinate varies fastest.
  std::size_t index(const std::vector<std::size_t>& coords) const;
  std::vector<std::size_t> coords(std::size_t index) const;

  bool operator==(const DyadicGrid&) const = default;

 private:
  std::size_t d_;
  int J_;
  std::size_t side_;
  std::size_t points_;
};

// One B-valued sample per grid point, stored contiguously.
class GridFn {
 public:
  GridFn(DyadicGrid grid, NormSpec space);
  GridFn(DyadicGrid grid, NormSpec space, std::vector<double> flat_values);
  // Scalar function with absolute value as the norm.
  static GridFn scalar(DyadicGrid grid, std::vector<double> values);

  const DyadicGrid& grid() const { return grid_; }
  const NormSpec& space() const { return space_; }
  std::size_t dim() const { return space_.dim(); }
  std::size_t points() const { return grid_.points(); }

  const double* at(std::size_t i) const { return values_.data() + i * space_.dim(); }
  double* at(std::size_t i) { return values_.data() + i * space_.dim(); }
  VecB value(std::size_t i) const;
  const std::vector<double>& flat() const { return values_; }
  std::vector<double>& flat() { return values_; }

  // Pointwise norms as a scalar function.
  GridFn norms() const;
  // Grid mean of ||f||^p.
  double mean_norm_pow(double p) const;
  VecB mean() const;

  GridFn& operator+=(const GridFn& other);
  GridFn& operator-=(const GridFn& other);
  friend GridFn operator+(GridFn a, const GridFn& b) { return a += b; }
  friend GridFn operator-(GridFn a, const GridFn& b) { return a -= b; }

  bool operator==(const GridFn&) const = default;

 private:
  DyadicGrid grid_;
  NormSpec space_;
  std::vector<double> values_;
};

// Header "d J m r" (r may be inf), then one row of m coordinates per point.
void write_gridfn(std::ostream& out, const GridFn& f);
GridFn read_gridfn(std::istream& in);
void save_gridfn(const std::string& path, const GridFn& f);
GridFn load_gridfn(const std::string& path);

// Dyadic cube of side 2^level points; corner coordinates are multiples of it.
struct Cube {
  int level = 0;
  std::vector<std::size_t> corner;

  std::size_t side() const { return std::size_t{1} << level; }
  bool contains(const std::vector<std::size_t>& x) const;
  bool operator==(const Cube&) const = default;
};

// Grid indices of every point of the cube, in row-major order.
std::vector<std::size_t> cube_points(const DyadicGrid& grid, const Cube& q);

// E_level f: constant on each level cube and equal to its average.
// Level 0 is the identity, level J the global mean.
GridFn cond_expect(const GridFn& f, int level);

// E_{level-1} f - E_level f for level in [1, J].
GridFn mart_diff(const GridFn& f, int level);

struct CotypeTerms {
  double lhs = 0.0;       // mean ||E_J f||^q0 + sum_l mean ||d_l||^q0
  double rhs = 0.0;       // mean ||f||^q0
  double lhs_bare_head = 0.0;  // same with the head term mean ||E_J f|| unpowered
};
CotypeTerms cotype_functional(const GridFn& f, double q0);

// Pointwise v_q norm of (E_J f(x), E_{J-1} f(x), ..., E_0 f(x)).
GridFn mart_variation(const GridFn& f, double q);

// sup over dyadic cubes Q of avg_Q |g - med_Q g| (lower median).
double dyadic_bmo_norm(const GridFn& g);

struct CZParts {
  double lambda = 0.0;
  std::vector<Cube> cubes;
  GridFn good;
  // Sum of the b_i; b_i is its restriction to cubes[i].
  GridFn bad;

  GridFn bad_piece(std::size_t i) const;
};

// Stopping time on ||f|| from the root: keep the maximal dyadic cubes whose
// average exceeds lambda. Throws if lambda is below the root average.
CZParts cz_decompose(const GridFn& f, double lambda);

// Uncentred maximal function of a scalar grid function over all cubes of
// side 1..N (periodic), i.e. sup of cube averages over cubes containing x.
GridFn cube_maximal(const GridFn& g);

// Indicator (0/1) of the union of the cubes and of their threefold dilates.
std::vector<char> cubes_indicator(const DyadicGrid& grid, const std::vector<Cube>& cubes);
std::vector<char> dilated_indicator(const DyadicGrid& grid, const std::vector<Cube>& cubes);

// Result of checking the six stopping-time properties on one instance.
struct CZCheck {
  bool disjoint = false;
  bool small_off_omega = false;       // (i)
  bool cube_averages = false;         // (ii)
  bool maximal_inclusions = false;    // (iii)
  bool exact_sum = false;             // (iv)
  bool good_bounds = false;           // (v)
  bool bad_pieces = false;            // (vi)
  bool all() const {
    return disjoint && small_off_omega && cube_averages && maximal_inclusions && exact_sum &&
           good_bounds && bad_pieces;
  }
};
CZCheck check_cz(const GridFn& f, const CZParts& parts);

}  // namespace qvar
