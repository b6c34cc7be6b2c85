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

#include "qvar/dyadic_martingale.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qvar/variation.hpp"

namespace qvar {

DyadicGrid::DyadicGrid(std::size_t d, int J) : d_(d), J_(J) {
  if (d < 1) throw std::invalid_argument("DyadicGrid: d must be >= 1");
  if (J < 1 || J > 30) throw std::invalid_argument("DyadicGrid: J must be in [1, 30]");
  side_ = std::size_t{1} << J;
  points_ = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (points_ > (std::size_t{1} << 40) / side_) {
      throw std::invalid_argument("DyadicGrid: too many points");
    }
    points_ *= side_;
  }
}

std::size_t DyadicGrid::index(const std::vector<std::size_t>& coords) const {
  if (coords.size() != d_) throw std::invalid_argument("DyadicGrid::index: wrong arity");
  std::size_t i = 0;
  for (std::size_t c : coords) i = i * side_ + (c % side_);
  return i;
}

std::vector<std::size_t> DyadicGrid::coords(std::size_t index) const {
  std::vector<std::size_t> x(d_);
  for (std::size_t k = d_; k-- > 0;) {
    x[k] = index % side_;
    index /= side_;
  }
  return x;
}

GridFn::GridFn(DyadicGrid grid, NormSpec space)
    : grid_(grid), space_(space), values_(grid.points() * space.dim(), 0.0) {}

GridFn::GridFn(DyadicGrid grid, NormSpec space, std::vector<double> flat_values)
    : grid_(grid), space_(space), values_(std::move(flat_values)) {
  if (values_.size() != grid_.points() * space_.dim()) {
    throw std::invalid_argument("GridFn: value block does not match points x dim");
  }
}

GridFn GridFn::scalar(DyadicGrid grid, std::vector<double> values) {
  return GridFn(grid, NormSpec(1.0, 1), std::move(values));
}

VecB GridFn::value(std::size_t i) const {
  return VecB(std::vector<double>(at(i), at(i) + dim()));
}

GridFn GridFn::norms() const {
  GridFn out(grid_, NormSpec(1.0, 1));
  for (std::size_t i = 0; i < points(); ++i) out.values_[i] = norm_pow(space_, at(i), 1.0);
  return out;
}

double GridFn::mean_norm_pow(double p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points(); ++i) s += norm_pow(space_, at(i), p);
  return s / static_cast<double>(points());
}

VecB GridFn::mean() const {
  std::vector<double> m(dim(), 0.0);
  for (std::size_t i = 0; i < points(); ++i) {
    for (std::size_t c = 0; c < dim(); ++c) m[c] += at(i)[c];
  }
  for (double& v : m) v /= static_cast<double>(points());
  return VecB(std::move(m));
}

GridFn& GridFn::operator+=(const GridFn& other) {
  if (!(grid_ == other.grid_) || !(space_ == other.space_)) {
    throw std::invalid_argument("GridFn: incompatible operands");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFn& GridFn::operator-=(const GridFn& other) {
  if (!(grid_ == other.grid_) || !(space_ == other.space_)) {
    throw std::invalid_argument("GridFn: incompatible operands");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

void write_gridfn(std::ostream& out, const GridFn& f) {
  out << f.grid().d() << ' ' << f.grid().J() << ' ' << f.dim() << ' ';
  if (f.space().is_max_norm()) {
    out << "inf";
  } else {
    out << std::setprecision(17) << f.space().r();
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < f.points(); ++i) {
    for (std::size_t c = 0; c < f.dim(); ++c) out << (c ? " " : "") << f.at(i)[c];
    out << '\n';
  }
}

GridFn read_gridfn(std::istream& in) {
  std::size_t d = 0;
  int J = 0;
  std::size_t m = 0;
  std::string r_text;
  if (!(in >> d >> J >> m >> r_text)) throw std::runtime_error("read_gridfn: bad header");
  double r = 0.0;
  if (r_text == "inf") {
    r = kInfinity;
  } else {
    try {
      r = std::stod(r_text);
    } catch (const std::exception&) {
      throw std::runtime_error("read_gridfn: bad exponent '" + r_text + "'");
    }
  }
  DyadicGrid grid(d, J);
  NormSpec space(r, m);
  std::vector<double> values(grid.points() * m);
  for (double& v : values) {
    if (!(in >> v)) throw std::runtime_error("read_gridfn: truncated value block");
  }
  return GridFn(grid, space, std::move(values));
}

void save_gridfn(const std::string& path, const GridFn& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_gridfn(out, f);
  if (!out) throw std::runtime_error("write failed: " + path);
}

GridFn load_gridfn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_gridfn(in);
}

bool Cube::contains(const std::vector<std::size_t>& x) const {
  if (x.size() != corner.size()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < corner[k] || x[k] >= corner[k] + side()) return false;
  }
  return true;
}

std::vector<std::size_t> cube_points(const DyadicGrid& grid, const Cube& q) {
  if (q.level < 0 || q.level > grid.J() || q.corner.size() != grid.d()) {
    throw std::invalid_argument("cube_points: cube does not fit the grid");
  }
  const std::size_t s = q.side();
  const std::size_t d = grid.d();
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) count *= s;
  std::vector<std::size_t> out;
  out.reserve(count);
  std::vector<std::size_t> offset(d, 0);
  std::vector<std::size_t> x(d);
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t k = 0; k < d; ++k) x[k] = q.corner[k] + offset[k];
    out.push_back(grid.index(x));
    for (std::size_t k = d; k-- > 0;) {
      if (++offset[k] < s) break;
      offset[k] = 0;
    }
  }
  return out;
}

namespace {

// Index of the level cube containing each grid point, and the cube count.
std::vector<std::size_t> cube_ids(const DyadicGrid& grid, int level, std::size_t& n_cubes) {
  const std::size_t coarse = grid.side() >> level;
  n_cubes = 1;
  for (std::size_t k = 0; k < grid.d(); ++k) n_cubes *= coarse;
  std::vector<std::size_t> ids(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    std::size_t rest = i;
    std::size_t id = 0;
    std::size_t scale = 1;
    for (std::size_t k = 0; k < grid.d(); ++k) {
      id += ((rest % grid.side()) >> level) * scale;
      rest /= grid.side();
      scale *= coarse;
    }
    ids[i] = id;
  }
  return ids;
}

void check_level(const GridFn& f, int level, int lowest) {
  if (level < lowest || level > f.grid().J()) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [" +
                            std::to_string(lowest) + ", " + std::to_string(f.grid().J()) + "]");
  }
}

std::vector<GridFn> all_levels(const GridFn& f) {
  std::vector<GridFn> levels;
  levels.reserve(static_cast<std::size_t>(f.grid().J()) + 1);
  for (int l = 0; l <= f.grid().J(); ++l) levels.push_back(cond_expect(f, l));
  return levels;
}

}  // namespace

GridFn cond_expect(const GridFn& f, int level) {
  check_level(f, level, 0);
  if (level == 0) return f;
  std::size_t n_cubes = 0;
  const std::vector<std::size_t> ids = cube_ids(f.grid(), level, n_cubes);
  const std::size_t m = f.dim();
  std::vector<double> sums(n_cubes * m, 0.0);
  for (std::size_t i = 0; i < f.points(); ++i) {
    for (std::size_t c = 0; c < m; ++c) sums[ids[i] * m + c] += f.at(i)[c];
  }
  const double volume = static_cast<double>(f.points() / n_cubes);
  for (double& s : sums) s /= volume;
  GridFn out(f.grid(), f.space());
  for (std::size_t i = 0; i < f.points(); ++i) {
    std::copy_n(sums.data() + ids[i] * m, m, out.at(i));
  }
  return out;
}

GridFn mart_diff(const GridFn& f, int level) {
  check_level(f, level, 1);
  return cond_expect(f, level - 1) - cond_expect(f, level);
}

CotypeTerms cotype_functional(const GridFn& f, double q0) {
  if (!(q0 >= 2.0) || q0 == kInfinity) {
    throw std::invalid_argument("cotype_functional: q0 must be finite and >= 2");
  }
  const std::vector<GridFn> levels = all_levels(f);
  const int J = f.grid().J();
  double diffs = 0.0;
  for (int l = 1; l <= J; ++l) {
    diffs += (levels[static_cast<std::size_t>(l - 1)] - levels[static_cast<std::size_t>(l)])
                 .mean_norm_pow(q0);
  }
  const GridFn& head = levels[static_cast<std::size_t>(J)];
  CotypeTerms t;
  t.lhs = head.mean_norm_pow(q0) + diffs;
  t.lhs_bare_head = head.mean_norm_pow(1.0) + diffs;
  t.rhs = f.mean_norm_pow(q0);
  return t;
}

GridFn mart_variation(const GridFn& f, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("mart_variation: q must exceed 1");
  const std::vector<GridFn> levels = all_levels(f);
  const std::size_t m = f.dim();
  const std::size_t depth = levels.size();
  GridFn out(f.grid(), NormSpec(1.0, 1));
  std::vector<double> seq(depth * m);
  for (std::size_t i = 0; i < f.points(); ++i) {
    for (std::size_t k = 0; k < depth; ++k) {
      std::copy_n(levels[depth - 1 - k].at(i), m, seq.data() + k * m);
    }
    out.flat()[i] = vq_norm_exact(f.space(), seq, q);
  }
  return out;
}

double dyadic_bmo_norm(const GridFn& g) {
  if (g.dim() != 1) throw std::invalid_argument("dyadic_bmo_norm: scalar function required");
  double best = 0.0;
  std::vector<double> vals;
  for (int l = 1; l <= g.grid().J(); ++l) {
    std::size_t n_cubes = 0;
    const std::vector<std::size_t> ids = cube_ids(g.grid(), l, n_cubes);
    std::vector<std::vector<double>> members(n_cubes);
    for (std::size_t i = 0; i < g.points(); ++i) members[ids[i]].push_back(g.flat()[i]);
    for (auto& cube : members) {
      vals = cube;
      std::sort(vals.begin(), vals.end());
      const double med = vals[(vals.size() - 1) / 2];
      double dev = 0.0;
      for (double v : cube) dev += std::fabs(v - med);
      best = std::max(best, dev / static_cast<double>(cube.size()));
    }
  }
  return best;
}

GridFn CZParts::bad_piece(std::size_t i) const {
  GridFn piece(bad.grid(), bad.space());
  for (std::size_t p : cube_points(bad.grid(), cubes.at(i))) {
    std::copy_n(bad.at(p), bad.dim(), piece.at(p));
  }
  return piece;
}

namespace {

void stop(const GridFn& f, const GridFn& norms, const Cube& q, double lambda,
          std::vector<Cube>& selected) {
  const std::vector<std::size_t> pts = cube_points(f.grid(), q);
  double s = 0.0;
  for (std::size_t p : pts) s += norms.flat()[p];
  if (s / static_cast<double>(pts.size()) > lambda) {
    selected.push_back(q);
    return;
  }
  if (q.level == 0) return;
  const int child_level = q.level - 1;
  const std::size_t half = std::size_t{1} << child_level;
  const std::size_t d = q.corner.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Cube child{child_level, q.corner};
    for (std::size_t k = 0; k < d; ++k) {
      if (mask & (std::size_t{1} << (d - 1 - k))) child.corner[k] += half;
    }
    stop(f, norms, child, lambda, selected);
  }
}

}  // namespace

CZParts cz_decompose(const GridFn& f, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cz_decompose: lambda must be positive");
  const GridFn norms = f.norms();
  double root = 0.0;
  for (double v : norms.flat()) root += v;
  root /= static_cast<double>(f.points());
  if (lambda < root) {
    throw std::domain_error("cz_decompose: lambda below the root average of ||f||");
  }
  CZParts parts{lambda, {}, f, GridFn(f.grid(), f.space())};
  const Cube root_cube{f.grid().J(), std::vector<std::size_t>(f.grid().d(), 0)};
  stop(f, norms, root_cube, lambda, parts.cubes);
  const std::size_t m = f.dim();
  std::vector<double> avg(m);
  for (const Cube& q : parts.cubes) {
    const std::vector<std::size_t> pts = cube_points(f.grid(), q);
    std::fill(avg.begin(), avg.end(), 0.0);
    for (std::size_t p : pts) {
      for (std::size_t c = 0; c < m; ++c) avg[c] += f.at(p)[c];
    }
    for (double& a : avg) a /= static_cast<double>(pts.size());
    for (std::size_t p : pts) {
      for (std::size_t c = 0; c < m; ++c) {
        parts.good.at(p)[c] = avg[c];
        parts.bad.at(p)[c] = f.at(p)[c] - avg[c];
      }
    }
  }
  return parts;
}

namespace {

// Along one axis, out(x) = op over j in [0, s) of in(x + sign*j mod N).
template <typename Op>
std::vector<double> axis_window(const DyadicGrid& grid, const std::vector<double>& in,
                                std::size_t axis, std::size_t s, bool backward, Op op,
                                double init) {
  const std::size_t n = grid.side();
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < grid.d(); ++k) stride *= n;
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::size_t x = (i / stride) % n;
    const std::size_t base = i - x * stride;
    double acc = init;
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t y = backward ? (x + n - j % n) % n : (x + j) % n;
      acc = op(acc, in[base + y * stride]);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

GridFn cube_maximal(const GridFn& g) {
  if (g.dim() != 1) throw std::invalid_argument("cube_maximal: scalar function required");
  const DyadicGrid& grid = g.grid();
  std::vector<double> best(g.points(), -std::numeric_limits<double>::infinity());
  auto plus = [](double a, double b) { return a + b; };
  auto maxop = [](double a, double b) { return std::max(a, b); };
  for (std::size_t s = 1; s <= grid.side(); ++s) {
    std::vector<double> sums = g.flat();
    for (std::size_t k = 0; k < grid.d(); ++k) {
      sums = axis_window(grid, sums, k, s, false, plus, 0.0);
    }
    const double volume = std::pow(static_cast<double>(s), static_cast<double>(grid.d()));
    for (double& v : sums) v /= volume;
    for (std::size_t k = 0; k < grid.d(); ++k) {
      sums = axis_window(grid, sums, k, s, true, maxop,
                         -std::numeric_limits<double>::infinity());
    }
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], sums[i]);
  }
  return GridFn::scalar(grid, std::move(best));
}

namespace {

std::vector<char> mark(const DyadicGrid& grid, const std::vector<Cube>& cubes, bool dilate) {
  const std::size_t n = grid.side();
  const std::size_t d = grid.d();
  std::vector<char> in(grid.points(), 0);
  std::vector<std::size_t> x(d);
  for (const Cube& q : cubes) {
    const std::size_t s = q.side();
    const std::size_t len = dilate ? std::min(3 * s, n) : s;
    std::vector<std::size_t> start(d);
    for (std::size_t k = 0; k < d; ++k) start[k] = dilate ? (q.corner[k] + n - s % n) % n : q.corner[k];
    std::vector<std::size_t> offset(d, 0);
    std::size_t count = 1;
    for (std::size_t k = 0; k < d; ++k) count *= len;
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t k = 0; k < d; ++k) x[k] = (start[k] + offset[k]) % n;
      in[grid.index(x)] = 1;
      for (std::size_t k = d; k-- > 0;) {
        if (++offset[k] < len) break;
        offset[k] = 0;
      }
    }
  }
  return in;
}

}  // namespace

std::vector<char> cubes_indicator(const DyadicGrid& grid, const std::vector<Cube>& cubes) {
  return mark(grid, cubes, false);
}

std::vector<char> dilated_indicator(const DyadicGrid& grid, const std::vector<Cube>& cubes) {
  return mark(grid, cubes, true);
}

CZCheck check_cz(const GridFn& f, const CZParts& parts) {
  const DyadicGrid& grid = f.grid();
  const double lambda = parts.lambda;
  const double two_d = std::ldexp(1.0, static_cast<int>(grid.d()));
  const GridFn norms = f.norms();
  CZCheck c;

  std::vector<int> owner(grid.points(), -1);
  c.disjoint = true;
  for (std::size_t i = 0; i < parts.cubes.size(); ++i) {
    for (std::size_t p : cube_points(grid, parts.cubes[i])) {
      if (owner[p] >= 0) c.disjoint = false;
      owner[p] = static_cast<int>(i);
    }
  }

  c.small_off_omega = true;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    if (owner[p] < 0 && norms.flat()[p] > lambda) c.small_off_omega = false;
  }

  c.cube_averages = true;
  c.bad_pieces = true;
  for (std::size_t i = 0; i < parts.cubes.size(); ++i) {
    const std::vector<std::size_t> pts = cube_points(grid, parts.cubes[i]);
    const double vol = static_cast<double>(pts.size());
    double s = 0.0;
    for (std::size_t p : pts) s += norms.flat()[p];
    const double avg = s / vol;
    if (!(lambda < avg && avg <= two_d * lambda)) c.cube_averages = false;

    const GridFn b = parts.bad_piece(i);
    const VecB total = b.mean();
    for (std::size_t k = 0; k < total.size(); ++k) {
      if (total[k] != 0.0) c.bad_pieces = false;
    }
    double b_norm = 0.0;
    for (std::size_t p : pts) b_norm += norm_pow(f.space(), b.at(p), 1.0);
    if (!(b_norm / vol <= 2.0 * two_d * lambda)) c.bad_pieces = false;
  }

  const GridFn maximal = cube_maximal(norms);
  const std::vector<char> omega = cubes_indicator(grid, parts.cubes);
  const std::vector<char> omega_star = dilated_indicator(grid, parts.cubes);
  const double four_d = two_d * two_d;
  c.maximal_inclusions = true;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const double mx = maximal.flat()[p];
    if (omega[p] && !(mx > lambda)) c.maximal_inclusions = false;
    if (mx > four_d * lambda && !omega_star[p]) c.maximal_inclusions = false;
  }

  c.exact_sum = (parts.good + parts.bad) == f;

  c.good_bounds = true;
  const double f_l1 = f.mean_norm_pow(1.0);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    if (norm_pow(f.space(), parts.good.at(p), 1.0) > two_d * lambda) c.good_bounds = false;
  }
  for (double pexp : {1.0, 1.5, 2.0, 3.0}) {
    const double lhs = parts.good.mean_norm_pow(pexp);
    const double rhs = std::pow(two_d, pexp - 1.0) * std::pow(lambda, pexp - 1.0) * f_l1;
    if (!(lhs <= rhs * (1.0 + 1e-12))) c.good_bounds = false;
  }
  return c;
}

}  // namespace qvar
