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

#include "qvar/diff_averages.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qvar/variation.hpp"

namespace qvar {

std::string to_string(AvgKernelShape shape) {
  return shape == AvgKernelShape::ball ? "ball" : "cube";
}

AvgKernelShape parse_shape(const std::string& text) {
  if (text == "ball") return AvgKernelShape::ball;
  if (text == "cube") return AvgKernelShape::cube;
  throw std::invalid_argument("unknown kernel shape '" + text + "' (ball|cube)");
}

RadiiSet::RadiiSet(std::vector<double> radii) : radii_(std::move(radii)) {
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0.0) || !std::isfinite(radii_[i])) {
      throw std::invalid_argument("RadiiSet: radii must be positive and finite");
    }
    if (i > 0 && !(radii_[i] > radii_[i - 1])) {
      throw std::invalid_argument("RadiiSet: radii must be strictly increasing");
    }
  }
}

void RadiiSet::check_fits(const DyadicGrid& grid) const {
  const double half = static_cast<double>(grid.side()) / 2.0;
  for (double t : radii_) {
    if (t > half) throw std::out_of_range("radius exceeds half the torus side");
  }
}

namespace {

struct Offset {
  double rho;
  std::vector<long> y;
};

// Representatives of every offset in (-N/2, N/2]^d with their norms, sorted.
std::vector<Offset> sorted_offsets(const DyadicGrid& grid, AvgKernelShape shape) {
  const long n = static_cast<long>(grid.side());
  std::vector<Offset> out;
  out.reserve(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const std::vector<std::size_t> c = grid.coords(i);
    Offset o{0.0, std::vector<long>(c.size())};
    long key = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      long s = static_cast<long>(c[k]);
      if (s > n / 2) s -= n;
      o.y[k] = s;
      key = shape == AvgKernelShape::ball ? key + s * s : std::max(key, std::labs(s));
    }
    o.rho = shape == AvgKernelShape::ball ? std::sqrt(static_cast<double>(key))
                                          : static_cast<double>(key);
    out.push_back(std::move(o));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Offset& a, const Offset& b) { return a.rho < b.rho; });
  return out;
}

// acc(x) += f(x + y) for every grid point x.
void add_shift(const GridFn& f, const std::vector<std::vector<std::size_t>>& coords,
               const std::vector<long>& y, std::vector<double>& acc) {
  const DyadicGrid& grid = f.grid();
  const std::size_t n = grid.side();
  const std::size_t d = grid.d();
  const std::size_t m = f.dim();
  for (std::size_t i = 0; i < grid.points(); ++i) {
    std::size_t j = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const long shifted = static_cast<long>(coords[i][k]) + y[k] + static_cast<long>(n);
      j = j * n + static_cast<std::size_t>(shifted) % n;
    }
    const double* src = f.at(j);
    double* dst = acc.data() + i * m;
    for (std::size_t c = 0; c < m; ++c) dst[c] += src[c];
  }
}

std::vector<std::vector<std::size_t>> all_coords(const DyadicGrid& grid) {
  std::vector<std::vector<std::size_t>> coords(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) coords[i] = grid.coords(i);
  return coords;
}

GridFn scalar_like(const GridFn& f) { return GridFn(f.grid(), NormSpec(1.0, 1)); }

}  // namespace

RadiiSet RadiiSet::change_points(const DyadicGrid& grid, AvgKernelShape shape) {
  const double half = static_cast<double>(grid.side()) / 2.0;
  std::vector<double> norms;
  for (const Offset& o : sorted_offsets(grid, shape)) {
    if (norms.empty() || o.rho > norms.back()) norms.push_back(o.rho);
  }
  std::vector<double> radii;
  for (std::size_t i = 0; i + 1 < norms.size() && norms[i] < half; ++i) {
    radii.push_back(std::min(0.5 * (norms[i] + norms[i + 1]), half));
  }
  if (norms.size() == 1 || norms.back() < half) radii.push_back(half);
  return RadiiSet(std::move(radii));
}

std::vector<GridFn> averages_at(const GridFn& f, const RadiiSet& radii, AvgKernelShape shape) {
  if (radii.empty()) throw std::invalid_argument("averages_at: empty radii");
  radii.check_fits(f.grid());
  const std::vector<Offset> offsets = sorted_offsets(f.grid(), shape);
  const auto coords = all_coords(f.grid());
  std::vector<double> acc(f.flat().size(), 0.0);
  std::size_t used = 0;
  std::vector<GridFn> out;
  out.reserve(radii.size());
  for (double t : radii.radii()) {
    while (used < offsets.size() && offsets[used].rho < t) {
      add_shift(f, coords, offsets[used].y, acc);
      ++used;
    }
    GridFn avg(f.grid(), f.space(), acc);
    const double count = static_cast<double>(used);
    for (double& v : avg.flat()) v /= count;
    out.push_back(std::move(avg));
  }
  return out;
}

GridFn ball_average(const GridFn& f, double t, AvgKernelShape shape) {
  if (!(t > 0.0) || t > static_cast<double>(f.grid().side()) / 2.0) {
    throw std::out_of_range("ball_average: radius must lie in (0, N/2]");
  }
  return averages_at(f, RadiiSet({t}), shape).front();
}

GridFn vq_from_averages(const std::vector<GridFn>& averages, double q) {
  if (averages.empty()) throw std::invalid_argument("vq_of_averages: empty radii");
  const GridFn& first = averages.front();
  const std::size_t m = first.dim();
  GridFn out = scalar_like(first);
  std::vector<double> seq(averages.size() * m);
  for (std::size_t i = 0; i < first.points(); ++i) {
    for (std::size_t r = 0; r < averages.size(); ++r) {
      std::copy_n(averages[r].at(i), m, seq.data() + r * m);
    }
    out.flat()[i] = vq_norm_exact(first.space(), seq, q);
  }
  return out;
}

GridFn vq_of_averages(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape) {
  if (!(q > 1.0)) throw std::invalid_argument("vq_of_averages: q must exceed 1");
  return vq_from_averages(averages_at(f, radii, shape), q);
}

GridFn short_from_averages(const std::vector<GridFn>& averages, const RadiiSet& radii,
                           double q0) {
  if (averages.size() != radii.size() || averages.empty()) {
    throw std::invalid_argument("short_variation: averages do not match radii");
  }
  std::map<int, std::vector<std::size_t>> blocks;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    blocks[dyadic_block(radii.radii()[r])].push_back(r);
  }
  const GridFn& first = averages.front();
  const std::size_t m = first.dim();
  GridFn out = scalar_like(first);
  std::vector<double> seq;
  for (std::size_t i = 0; i < first.points(); ++i) {
    double total = 0.0;
    for (const auto& [block, members] : blocks) {
      if (members.size() < 2) continue;
      seq.resize(members.size() * m);
      for (std::size_t r = 0; r < members.size(); ++r) {
        std::copy_n(averages[members[r]].at(i), m, seq.data() + r * m);
      }
      total += difference_variation_power(first.space(), seq, q0);
    }
    out.flat()[i] = std::pow(total, 1.0 / q0);
  }
  return out;
}

GridFn short_variation(const GridFn& f, double q0, const RadiiSet& radii,
                       AvgKernelShape shape) {
  if (!(q0 >= 2.0)) throw std::invalid_argument("short_variation: q0 must be >= 2");
  return short_from_averages(averages_at(f, radii, shape), radii, q0);
}

GridFn long_variation(const GridFn& f, double q0, AvgKernelShape shape) {
  if (!(q0 >= 2.0)) throw std::invalid_argument("long_variation: q0 must be >= 2");
  const int J = f.grid().J();
  std::vector<double> radii;
  for (int k = 0; k < J; ++k) radii.push_back(std::ldexp(1.0, k));
  const std::vector<GridFn> averages = averages_at(f, RadiiSet(radii), shape);
  GridFn out = scalar_like(f);
  for (int k = 0; k < J; ++k) {
    const GridFn e = cond_expect(f, k);
    const GridFn& a = averages[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < f.points(); ++i) {
      out.flat()[i] += diff_norm_pow(f.space(), a.at(i), e.at(i), q0);
    }
  }
  for (double& v : out.flat()) v = std::pow(v, 1.0 / q0);
  return out;
}

GridFn master_decomposition_check(const GridFn& f, double q, double q0,
                                  const RadiiSet& radii, AvgKernelShape shape) {
  if (!(q > q0) || !(q0 >= 2.0)) {
    throw std::invalid_argument("master_decomposition_check: need q > q0 >= 2");
  }
  const std::vector<GridFn> averages = averages_at(f, radii, shape);
  const GridFn v = vq_from_averages(averages, q);
  const GridFn sv = short_from_averages(averages, radii, q0);
  const GridFn lv = long_variation(f, q0, shape);
  const GridFn mv = mart_variation(f, q);
  GridFn out = scalar_like(f);
  for (std::size_t i = 0; i < f.points(); ++i) {
    const double bound = 3.0 * (sv.flat()[i] + lv.flat()[i] + mv.flat()[i]);
    out.flat()[i] = std::max(0.0, v.flat()[i] - bound);
  }
  return out;
}

double probe_pointwise_LV(const GridFn& f, int k, int n, double q0) {
  if (n < 0 || n > k || k > f.grid().J() - 1) {
    throw std::out_of_range("probe_pointwise_LV: need 0 <= n <= k <= J-1");
  }
  if (n == 0) return 0.0;
  const GridFn dn = mart_diff(f, n);
  GridFn powered = scalar_like(f);
  for (std::size_t i = 0; i < f.points(); ++i) {
    powered.flat()[i] = norm_pow(f.space(), dn.at(i), q0);
  }
  const double t = std::ldexp(1.0, k);
  const GridFn a_dn = ball_average(dn, t, AvgKernelShape::ball);
  const GridFn a_pow = ball_average(powered, t, AvgKernelShape::ball);
  const double scale = std::ldexp(1.0, n - k);
  double best = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    const double num = norm_pow(f.space(), a_dn.at(i), q0);
    const double den = scale * a_pow.flat()[i];
    if (num == 0.0) continue;
    best = std::max(best, num / den);
  }
  return best;
}

double weak11_from_variation(const GridFn& f, const GridFn& variation, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("weak11_ratio: lambda must be positive");
  const double l1 = f.mean_norm_pow(1.0);
  if (l1 == 0.0) throw std::invalid_argument("weak11_ratio: zero function");
  std::size_t above = 0;
  for (double v : variation.flat()) above += v > lambda ? 1 : 0;
  const double measure = static_cast<double>(above) / static_cast<double>(f.points());
  return lambda * measure / l1;
}

double weak11_ratio(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape,
                    double lambda) {
  return weak11_from_variation(f, vq_of_averages(f, q, radii, shape), lambda);
}

double bmo_ratio(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape) {
  double sup = 0.0;
  for (std::size_t i = 0; i < f.points(); ++i) sup = std::max(sup, norm_pow(f.space(), f.at(i), 1.0));
  if (sup == 0.0) throw std::invalid_argument("bmo_ratio: zero function");
  return dyadic_bmo_norm(vq_of_averages(f, q, radii, shape)) / sup;
}

GridFn one_sided_avg(const GridFn& f, std::size_t n) {
  if (f.grid().d() != 1) throw std::invalid_argument("one_sided_avg: one-dimensional grid only");
  const std::size_t size = f.grid().side();
  if (n >= size) throw std::out_of_range("one_sided_avg: n must be below N");
  const std::size_t m = f.dim();
  GridFn out(f.grid(), f.space());
  for (std::size_t j = 0; j < size; ++j) {
    double* dst = out.at(j);
    for (std::size_t k = 0; k <= n; ++k) {
      const double* src = f.at((j + size - k) % size);
      for (std::size_t c = 0; c < m; ++c) dst[c] += src[c];
    }
    for (std::size_t c = 0; c < m; ++c) dst[c] /= static_cast<double>(n + 1);
  }
  return out;
}

double young_convolution_residual(const std::vector<double>& sigma,
                                  const std::vector<double>& b, double q0) {
  for (double v : sigma) {
    if (v < 0.0) throw std::invalid_argument("young_convolution_residual: sigma must be >= 0");
  }
  for (double v : b) {
    if (v < 0.0) throw std::invalid_argument("young_convolution_residual: b must be >= 0");
  }
  if (sigma.empty() || b.empty()) return 0.0;
  std::vector<double> conv(sigma.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) conv[i + j] += sigma[i] * b[j];
  }
  return seq_lq(sigma, 1.0) * seq_lq(b, q0) - seq_lq(conv, q0);
}

}  // namespace qvar
