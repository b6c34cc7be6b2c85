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

// Row-stochastic matrices as positive contractions on a finite state space:
// ergodic and fractional averages, m-th differences T^n (T - I)^m, the
// decomposition identities behind the variation bound for differences, and
// the elementary estimates and Littlewood-Paley function that control them.

#pragma once

#include <complex>
#include <cstddef>
#include <deque>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "qvar/normed_space.hpp"
#include "qvar/variation.hpp"

namespace qvar {

struct MarkovFlags {
  bool symmetric = false;
  bool doubly_stochastic = false;
};

// K x K nonnegative matrix with unit row sums, stored row-major.
class MarkovOperator {
 public:
  MarkovOperator(std::size_t K, std::vector<double> entries, MarkovFlags flags = {});

  static MarkovOperator identity(std::size_t K);
  // lazy * I + (1 - lazy)/2 (left shift + right shift) on the K-cycle.
  static MarkovOperator cycle_walk(std::size_t K, double lazy = 0.5);
  // Mixture of symmetrised random permutations.
  static MarkovOperator random_symmetric(std::size_t K, std::mt19937_64& rng);
  // Mixture of random permutations.
  static MarkovOperator random_doubly_stochastic(std::size_t K, std::mt19937_64& rng);
  // Independent random rows.
  static MarkovOperator random_stochastic(std::size_t K, std::mt19937_64& rng);

  std::size_t K() const { return K_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * K_ + j]; }
  const std::vector<double>& entries() const { return entries_; }
  const MarkovFlags& flags() const { return flags_; }
  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::size_t K_;
  std::vector<double> entries_;
  MarkovFlags flags_;
};

// "K flags" header (flags: comma list of symmetric, doubly_stochastic, or -)
// followed by K rows of K numbers. Validated on load.
void write_markov(std::ostream& out, const MarkovOperator& T);
MarkovOperator read_markov(std::istream& in);
MarkovOperator load_markov(const std::string& path);

// B-valued function on the states {0..K-1}.
class StateFn {
 public:
  StateFn(NormSpec space, std::size_t K);
  StateFn(NormSpec space, std::vector<double> flat_values);
  static StateFn scalar(std::vector<double> values);

  const NormSpec& space() const { return space_; }
  std::size_t K() const { return values_.size() / space_.dim(); }
  std::size_t dim() const { return space_.dim(); }
  const double* at(std::size_t i) const { return values_.data() + i * space_.dim(); }
  double* at(std::size_t i) { return values_.data() + i * space_.dim(); }
  const std::vector<double>& flat() const { return values_; }
  std::vector<double>& flat() { return values_; }

  // Uniform-measure mean of ||f(w)||^p, and ||f||_p itself.
  double mean_norm_pow(double p) const;
  double lp_norm(double p) const;
  // max_w ||f(w)||.
  double sup_norm() const;

  StateFn& operator+=(const StateFn& other);
  StateFn& operator-=(const StateFn& other);
  StateFn& operator*=(double alpha);
  friend StateFn operator+(StateFn a, const StateFn& b) { return a += b; }
  friend StateFn operator-(StateFn a, const StateFn& b) { return a -= b; }
  friend StateFn operator*(double alpha, StateFn f) { return f *= alpha; }

 private:
  NormSpec space_;
  std::vector<double> values_;
};

// max_w ||f(w) - g(w)||.
double max_distance(const StateFn& f, const StateFn& g);

StateFn apply(const MarkovOperator& T, const StateFn& f);

// (1/(n+1)) sum_{k=0}^{n} T^k f.
StateFn ergodic_avg(const MarkovOperator& T, std::size_t n, const StateFn& f);

// (1/t) int_0^t e^{r(Q - I)} f dr for symmetric Q.
StateFn ergodic_avg_continuous(const MarkovOperator& Q, double t, const StateFn& f);

// T^n (T - I)^m f.
StateFn delta_mn(const MarkovOperator& T, int m, std::size_t n, const StateFn& f);

// Memoised table of T^n (T - I)^m f for one (T, f).
class DifferenceTable {
 public:
  DifferenceTable(const MarkovOperator& T, StateFn f);
  const StateFn& delta(int m, std::size_t n);
  // max_w ||(T - I)^m f(w)||, which dominates every D^m_n f(w).
  double bound(int m);

 private:
  MarkovOperator T_;
  std::deque<std::deque<StateFn>> rows_;
};

// A^alpha_n = (alpha + 1)...(alpha + n) / n!.
std::complex<double> frac_coeff(std::complex<double> alpha, std::size_t n);

// M^alpha_n f = (n + 1)^{-alpha} sum_{k=0}^{n} A^{alpha-1}_{n-k} T^k f.
StateFn frac_average(const MarkovOperator& T, double alpha, std::size_t n, const StateFn& f);
struct ComplexStateFn {
  StateFn re;
  StateFn im;
};
ComplexStateFn frac_average(const MarkovOperator& T, std::complex<double> alpha, std::size_t n,
                            const StateFn& f);

struct IdentityResidual {
  double residual = 0.0;  // max_w ||lhs - rhs||
  double scale = 0.0;     // a priori bound on the sizes of the terms
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

// n^m D^m_{2n+1} = A_n - ((n+1)/n) B_n + n^{m-1} D^{m-1}_{2n+1} - n^{m-1} D^{m-1}_{n+1}
// with A_n = n^{m-1} sum_{j=n}^{2n} (j+1) D^{m+1}_j, B_n = n^m (D^m_{2n+1} - D^m_n).
IdentityResidual decomposition_formula_residual(const MarkovOperator& T, int m, std::size_t n,
                                                const StateFn& f);

// max_k of ||A_{n_k} - A_{n_{k-1}} - (a_k + b_k + c_k)|| for n_0 = 1 < n_1 < ...
IdentityResidual abc_split_residual(const MarkovOperator& T, int m,
                                    const std::vector<std::size_t>& indices, const StateFn& f);

// sum over k with n_k <= j <= 2 n_{k-1} of |(n_k^{m-1} - n_{k-1}^{m-1}) / n_k^{m-1}|^q0.
double lambda_j(int m, double q0, const std::vector<std::size_t>& indices, std::size_t j);

// (sum_{j=n}^{2n} (j+1)^{(1 - q0 m)/(q0 - 1)})^{(q0-1)/q0} / n^{1-m}.
double elementary_sum_constant(int m, double q0, std::size_t n);
// Values along n = 1..1000 and then a geometric grid up to n_max.
struct SweepPoint {
  std::size_t n;
  double value;
};
std::vector<SweepPoint> elementary_sum_sweep(int m, double q0, std::size_t n_max);

// 3 ||delta||_{v_1} ||z||_{v_q} - ||(delta_n z_n)||_{v_q}.
double weighted_variation_gap(const std::vector<double>& delta, const TimeFamily& z, double q);

struct LittlewoodPaley {
  StateFn phi;                               // truncated at n_max
  std::vector<std::vector<double>> partial;  // partial[n-1][w]: truncated at n
};
// (sum_{j=1}^{n_max} (j+1)^{-1} ||(j+1)^{m+1} D^{m+1}_j f(w)||^q0)^{1/q0}.
LittlewoodPaley littlewood_paley_phi(const MarkovOperator& T, int m, double q0,
                                     const StateFn& f, std::size_t n_max);

// Per state, ||(M_n f(w))_{n=0..n_max}||_{v_q}.
StateFn variation_of_averages(const MarkovOperator& T, const StateFn& f, double q,
                              std::size_t n_max);

}  // namespace qvar
