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

// Symmetric diffusion semigroups e^{tL}, L = Q - I for a symmetric stochastic
// Q, evaluated spectrally; their variation and jump functionals; Poisson
// kernels on the line and the circle; the lacunary cotype experiment.

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "qvar/ergodic.hpp"
#include "qvar/normed_space.hpp"

namespace qvar {

class DiffusionSemigroup {
 public:
  // Throws unless Q is symmetric.
  explicit DiffusionSemigroup(const MarkovOperator& Q);

  std::size_t K() const { return K_; }
  // Eigenvalues of L in increasing order (all <= 0).
  const std::vector<double>& eigenvalues() const { return mu_; }
  // Column i is the unit eigenvector for eigenvalues()[i]; column-major.
  double eigenvector(std::size_t row, std::size_t col) const { return vecs_[col * K_ + row]; }
  // Largest nonzero eigenvalue (spectral gap is its absolute value) and the
  // smallest eigenvalue.
  double gap_eigenvalue() const;
  double min_eigenvalue() const { return mu_.front(); }

  // K x K row-major matrix of sum_i phi(mu_i) v_i v_i^T.
  template <typename Phi>
  std::vector<double> spectral_matrix(Phi phi) const;
  // sum_i phi(mu_i) v_i <v_i, f>.
  template <typename Phi>
  StateFn spectral_apply(Phi phi, const StateFn& f) const;

  std::vector<double> matrix(double t) const;

 private:
  std::size_t K_;
  std::vector<double> mu_;
  std::vector<double> vecs_;
};

// e^{tL} f, t >= 0.
StateFn semigroup_apply(const DiffusionSemigroup& S, double t, const StateFn& f);

// t^m L^m e^{tL} f.
StateFn derivative_family(const DiffusionSemigroup& S, int m, double t, const StateFn& f);

// Per state, ||(T_t f(w))_{t in times}||_{v_q}.
StateFn semigroup_variation(const DiffusionSemigroup& S, const StateFn& f, double q,
                            const std::vector<double>& times);

// Per state, N((T_t f(w))_t, lambda).
std::vector<std::size_t> semigroup_jumps(const DiffusionSemigroup& S, const StateFn& f,
                                         double lambda, const std::vector<double>& times);

// lambda ||N^{1/q}||_p / ||f||_p.
double jump_estimate_ratio(const DiffusionSemigroup& S, const StateFn& f, double q, double p,
                           double lambda, const std::vector<double>& times);

// Orthogonal projection onto the null space of L.
StateFn mean_projection(const DiffusionSemigroup& S, const StateFn& f, double tol = 1e-10);

// For each delta, || sup_{t <= delta} ||T_t f - f|| ||_p over a common grid of
// linear and geometric points in (0, max delta].
std::vector<double> convergence_rate_profile(const DiffusionSemigroup& S, const StateFn& f,
                                             double p, const std::vector<double>& deltas);
// (1 - e^{delta mu_min}) max_w sum_i ||<v_i, f>|| |v_i(w)|, which dominates the profile.
std::vector<double> convergence_rate_bound(const DiffusionSemigroup& S, const StateFn& f,
                                           const std::vector<double>& deltas);

// Geometric grid 2^lo, ..., 2^hi with `per_octave` points per factor of two.
std::vector<double> geometric_times(int lo, int hi, std::size_t per_octave);

// (1/(pi t)) / (1 + (x/t)^2).
double poisson_line(double t, double x);
// sum_n e^{-t|n|} e^{2 pi i n theta} in closed form.
double poisson_circle(double t, double theta);
// The same series truncated to |n| <= N.
double poisson_circle_series(double t, double theta, std::size_t N);
// |P_t(x) - sum_{|n|<=N} P^line_{t/(2 pi)}(x + n)|: the periodisation of the
// line kernel at width t/(2 pi) is the circle kernel with decay rate t.
double poisson_summation_residual(double t, double x, std::size_t N);
// Same with the line kernel at width t.
double poisson_summation_residual_unscaled(double t, double x, std::size_t N);

// |e^{-t_i 2^i} - e^{-t_{i+1} 2^i}| with t_i = log(1 + 1/(2^i - 1)).
double lacunary_gap(int i);
// Limit of lacunary_gap as i grows: e^{-1/2} - e^{-1}.
double lacunary_gap_limit();

// (sum_k ||x_k||^q)^{1/q} / || ||sum_k eps_k e^{2 pi i 2^k theta} x_k|| ||_{L^q[0,1]}
// with x_k the standard basis; the integral uses `grid_points` equispaced nodes
// (0 selects 2^{K+4}, at least 2^{K+3} is required).
double cotype_necessity_ratio(const NormSpec& space, double q, std::size_t K,
                              const std::vector<int>& signs, std::size_t grid_points = 0);

template <typename Phi>
std::vector<double> DiffusionSemigroup::spectral_matrix(Phi phi) const {
  std::vector<double> out(K_ * K_, 0.0);
  for (std::size_t i = 0; i < K_; ++i) {
    const double w = phi(mu_[i]);
    const double* v = vecs_.data() + i * K_;
    for (std::size_t r = 0; r < K_; ++r) {
      for (std::size_t c = 0; c < K_; ++c) out[r * K_ + c] += w * v[r] * v[c];
    }
  }
  return out;
}

template <typename Phi>
StateFn DiffusionSemigroup::spectral_apply(Phi phi, const StateFn& f) const {
  const std::size_t m = f.dim();
  StateFn out(f.space(), K_);
  std::vector<double> coef(m);
  for (std::size_t i = 0; i < K_; ++i) {
    const double* v = vecs_.data() + i * K_;
    std::fill(coef.begin(), coef.end(), 0.0);
    for (std::size_t s = 0; s < K_; ++s) {
      for (std::size_t c = 0; c < m; ++c) coef[c] += v[s] * f.at(s)[c];
    }
    const double w = phi(mu_[i]);
    for (std::size_t s = 0; s < K_; ++s) {
      for (std::size_t c = 0; c < m; ++c) out.at(s)[c] += w * coef[c] * v[s];
    }
  }
  return out;
}

}  // namespace qvar
