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

#include "qvar/semigroup.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qvar/variation.hpp"

namespace qvar {

DiffusionSemigroup::DiffusionSemigroup(const MarkovOperator& Q) : K_(Q.K()) {
  if (!Q.is_symmetric()) throw std::invalid_argument("DiffusionSemigroup: Q must be symmetric");
  const auto K = static_cast<Eigen::Index>(K_);
  Eigen::MatrixXd L(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      L(i, j) = Q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - (i == j ? 1.0 : 0.0);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  if (eig.info() != Eigen::Success) throw std::runtime_error("DiffusionSemigroup: eigensolver failed");
  mu_.resize(K_);
  vecs_.resize(K_ * K_);
  for (Eigen::Index i = 0; i < K; ++i) {
    mu_[static_cast<std::size_t>(i)] = std::min(0.0, eig.eigenvalues()(i));
    for (Eigen::Index r = 0; r < K; ++r) {
      vecs_[static_cast<std::size_t>(i) * K_ + static_cast<std::size_t>(r)] = eig.eigenvectors()(r, i);
    }
  }
}

double DiffusionSemigroup::gap_eigenvalue() const {
  for (std::size_t i = K_; i-- > 0;) {
    if (std::fabs(mu_[i]) > 1e-10) return mu_[i];
  }
  return 0.0;
}

std::vector<double> DiffusionSemigroup::matrix(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup: t must be nonnegative");
  return spectral_matrix([t](double mu) { return std::exp(t * mu); });
}

StateFn semigroup_apply(const DiffusionSemigroup& S, double t, const StateFn& f) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
  if (f.K() != S.K()) throw std::invalid_argument("semigroup_apply: state count mismatch");
  if (t == 0.0) return f;
  return S.spectral_apply([t](double mu) { return std::exp(t * mu); }, f);
}

StateFn derivative_family(const DiffusionSemigroup& S, int m, double t, const StateFn& f) {
  if (m < 0) throw std::invalid_argument("derivative_family: m must be nonnegative");
  if (m == 0) return semigroup_apply(S, t, f);
  if (!(t > 0.0)) throw std::invalid_argument("derivative_family: t must be positive for m >= 1");
  if (f.K() != S.K()) throw std::invalid_argument("derivative_family: state count mismatch");
  return S.spectral_apply([t, m](double mu) { return std::pow(t * mu, m) * std::exp(t * mu); }, f);
}

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("semigroup: empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw std::invalid_argument("semigroup: times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("semigroup: times must be strictly increasing");
    }
  }
}

// paths[s] holds T_t f(s) for t in times, flattened per state.
std::vector<std::vector<double>> orbit_paths(const DiffusionSemigroup& S, const StateFn& f,
                                             const std::vector<double>& times) {
  check_times(times);
  if (f.K() != S.K()) throw std::invalid_argument("semigroup: state count mismatch");
  const std::size_t K = f.K();
  const std::size_t m = f.dim();
  std::vector<std::vector<double>> paths(K, std::vector<double>(times.size() * m));
  for (std::size_t r = 0; r < times.size(); ++r) {
    const StateFn g = semigroup_apply(S, times[r], f);
    for (std::size_t s = 0; s < K; ++s) std::copy_n(g.at(s), m, paths[s].data() + r * m);
  }
  return paths;
}

}  // namespace

StateFn semigroup_variation(const DiffusionSemigroup& S, const StateFn& f, double q,
                            const std::vector<double>& times) {
  if (!(q > 2.0)) throw std::invalid_argument("semigroup_variation: q must exceed 2");
  const auto paths = orbit_paths(S, f, times);
  StateFn out = StateFn::scalar(std::vector<double>(f.K(), 0.0));
  for (std::size_t s = 0; s < f.K(); ++s) out.flat()[s] = vq_norm_exact(f.space(), paths[s], q);
  return out;
}

std::vector<std::size_t> semigroup_jumps(const DiffusionSemigroup& S, const StateFn& f,
                                         double lambda, const std::vector<double>& times) {
  const auto paths = orbit_paths(S, f, times);
  std::vector<std::size_t> out(f.K());
  for (std::size_t s = 0; s < f.K(); ++s) out[s] = jump_count(f.space(), paths[s], lambda);
  return out;
}

double jump_estimate_ratio(const DiffusionSemigroup& S, const StateFn& f, double q, double p,
                           double lambda, const std::vector<double>& times) {
  if (!(lambda > 0.0) || !(q > 2.0) || !(p >= 1.0)) {
    throw std::invalid_argument("jump_estimate_ratio: need lambda > 0, q > 2, p >= 1");
  }
  const double fp = f.lp_norm(p);
  if (fp == 0.0) throw std::invalid_argument("jump_estimate_ratio: zero function");
  const std::vector<std::size_t> jumps = semigroup_jumps(S, f, lambda, times);
  double acc = 0.0;
  for (std::size_t n : jumps) acc += std::pow(static_cast<double>(n), p / q);
  acc /= static_cast<double>(jumps.size());
  return lambda * std::pow(acc, 1.0 / p) / fp;
}

StateFn mean_projection(const DiffusionSemigroup& S, const StateFn& f, double tol) {
  if (f.K() != S.K()) throw std::invalid_argument("mean_projection: state count mismatch");
  return S.spectral_apply([tol](double mu) { return std::fabs(mu) < tol ? 1.0 : 0.0; }, f);
}

std::vector<double> convergence_rate_profile(const DiffusionSemigroup& S, const StateFn& f,
                                             double p, const std::vector<double>& deltas) {
  if (!(p >= 1.0)) throw std::invalid_argument("convergence_rate_profile: p must be >= 1");
  std::vector<double> grid;
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw std::invalid_argument("convergence_rate_profile: deltas must be positive");
    for (int i = 1; i <= 64; ++i) grid.push_back(delta * i / 64.0);
    for (int k = 1; k <= 40; ++k) grid.push_back(std::ldexp(delta, -k));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::size_t K = f.K();
  std::vector<std::vector<double>> dist(grid.size(), std::vector<double>(K));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const StateFn tf = semigroup_apply(S, grid[g], f);
    for (std::size_t s = 0; s < K; ++s) dist[g][s] = diff_norm(f.space(), tf.at(s), f.at(s));
  }
  std::vector<double> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    std::vector<double> sup(K, 0.0);
    for (std::size_t g = 0; g < grid.size() && grid[g] <= delta; ++g) {
      for (std::size_t s = 0; s < K; ++s) sup[s] = std::max(sup[s], dist[g][s]);
    }
    double acc = 0.0;
    for (double v : sup) acc += std::pow(v, p);
    out.push_back(std::pow(acc / static_cast<double>(K), 1.0 / p));
  }
  return out;
}

std::vector<double> convergence_rate_bound(const DiffusionSemigroup& S, const StateFn& f,
                                           const std::vector<double>& deltas) {
  const std::size_t K = f.K();
  const std::size_t m = f.dim();
  std::vector<double> weight(K, 0.0);
  std::vector<double> coef(m);
  for (std::size_t i = 0; i < K; ++i) {
    std::fill(coef.begin(), coef.end(), 0.0);
    for (std::size_t s = 0; s < K; ++s) {
      for (std::size_t c = 0; c < m; ++c) coef[c] += S.eigenvector(s, i) * f.at(s)[c];
    }
    const double cn = norm(f.space(), coef);
    for (std::size_t s = 0; s < K; ++s) weight[s] += cn * std::fabs(S.eigenvector(s, i));
  }
  const double scale = *std::max_element(weight.begin(), weight.end());
  std::vector<double> out;
  for (double delta : deltas) out.push_back(-std::expm1(delta * S.min_eigenvalue()) * scale);
  return out;
}

std::vector<double> geometric_times(int lo, int hi, std::size_t per_octave) {
  if (hi < lo || per_octave == 0) throw std::invalid_argument("geometric_times: bad range");
  std::vector<double> out;
  const std::size_t steps = static_cast<std::size_t>(hi - lo) * per_octave;
  for (std::size_t k = 0; k <= steps; ++k) {
    out.push_back(std::exp2(lo + static_cast<double>(k) / static_cast<double>(per_octave)));
  }
  return out;
}

double poisson_line(double t, double x) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_line: t must be positive");
  const double u = x / t;
  return 1.0 / (std::numbers::pi * t * (1.0 + u * u));
}

double poisson_circle(double t, double theta) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_circle: t must be positive");
  const double r = std::exp(-t);
  return -std::expm1(-2.0 * t) / (1.0 - 2.0 * r * std::cos(2.0 * std::numbers::pi * theta) + r * r);
}

double poisson_circle_series(double t, double theta, std::size_t N) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_circle_series: t must be positive");
  double s = 0.0;
  for (std::size_t n = N; n >= 1; --n) {
    const double dn = static_cast<double>(n);
    s += std::exp(-t * dn) * std::cos(2.0 * std::numbers::pi * dn * theta);
  }
  return 1.0 + 2.0 * s;
}

namespace {

double periodised_line(double width, double x, std::size_t N) {
  const auto n = static_cast<long>(N);
  double s = 0.0;
  for (long k = n; k >= 1; --k) {
    s += poisson_line(width, x + static_cast<double>(k)) + poisson_line(width, x - static_cast<double>(k));
  }
  return s + poisson_line(width, x);
}

}  // namespace

double poisson_summation_residual(double t, double x, std::size_t N) {
  if (!(t > 0.0) || N < 1) throw std::invalid_argument("poisson_summation_residual: need t > 0, N >= 1");
  return std::fabs(poisson_circle(t, x) - periodised_line(t / (2.0 * std::numbers::pi), x, N));
}

double poisson_summation_residual_unscaled(double t, double x, std::size_t N) {
  if (!(t > 0.0) || N < 1) throw std::invalid_argument("poisson_summation_residual: need t > 0, N >= 1");
  return std::fabs(poisson_circle(t, x) - periodised_line(t, x, N));
}

double lacunary_gap(int i) {
  if (i < 1) throw std::invalid_argument("lacunary_gap: i must be >= 1");
  const double n = std::ldexp(1.0, i);
  double a = 0.0;
  double b = 0.0;
  if (i <= 50) {
    a = std::pow(1.0 - std::ldexp(1.0, -i), n);
    b = std::pow(1.0 - std::ldexp(1.0, -(i + 1)), n);
  } else {
    a = std::exp(n * std::log1p(-std::ldexp(1.0, -i)));
    b = std::exp(n * std::log1p(-std::ldexp(1.0, -(i + 1))));
  }
  return std::fabs(a - b);
}

double lacunary_gap_limit() { return std::exp(-0.5) - std::exp(-1.0); }

double cotype_necessity_ratio(const NormSpec& space, double q, std::size_t K,
                              const std::vector<int>& signs, std::size_t grid_points) {
  if (K < 1 || K > space.dim()) throw std::invalid_argument("cotype_necessity_ratio: need 1 <= K <= dim");
  if (K > 26) throw std::invalid_argument("cotype_necessity_ratio: K too large");
  if (signs.size() != K) throw std::invalid_argument("cotype_necessity_ratio: one sign per frequency");
  for (int e : signs) {
    if (e != 1 && e != -1) throw std::invalid_argument("cotype_necessity_ratio: signs must be +-1");
  }
  if (!(q >= 1.0) || q == kInfinity) throw std::invalid_argument("cotype_necessity_ratio: bad q");
  const std::size_t minimum = std::size_t{1} << (K + 3);
  if (grid_points == 0) grid_points = std::size_t{1} << (K + 4);
  if (grid_points < minimum) {
    throw std::invalid_argument("cotype_necessity_ratio: quadrature grid too coarse for frequency 2^K");
  }
  std::vector<double> basis(space.dim(), 0.0);
  double head = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    basis.assign(space.dim(), 0.0);
    basis[k] = 1.0;
    head += norm_pow(space, basis.data(), q);
  }
  head = std::pow(head, 1.0 / q);
  std::vector<double> moduli(space.dim(), 0.0);
  const auto G = static_cast<unsigned long long>(grid_points);
  double integral = 0.0;
  for (unsigned long long j = 0; j < G; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      const unsigned long long phase = (j << (k + 1)) % G;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(G);
      const double re = signs[k] * std::cos(angle);
      const double im = signs[k] * std::sin(angle);
      moduli[k] = std::hypot(re, im);
    }
    integral += norm_pow(space, moduli.data(), q);
  }
  const double lq = std::pow(integral / static_cast<double>(G), 1.0 / q);
  return head / lq;
}

}  // namespace qvar
