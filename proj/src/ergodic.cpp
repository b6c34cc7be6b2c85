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

#include "qvar/ergodic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qvar {

MarkovOperator::MarkovOperator(std::size_t K, std::vector<double> entries, MarkovFlags flags)
    : K_(K), entries_(std::move(entries)), flags_(flags) {
  if (K_ == 0) throw std::invalid_argument("MarkovOperator: K must be positive");
  if (entries_.size() != K_ * K_) throw std::invalid_argument("MarkovOperator: need K*K entries");
  for (std::size_t i = 0; i < K_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < K_; ++j) {
      const double v = entries_[i * K_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("MarkovOperator: entries must be finite and nonnegative");
      }
      row += v;
    }
    if (std::fabs(row - 1.0) > 1e-12) {
      throw std::invalid_argument("MarkovOperator: row " + std::to_string(i) + " does not sum to 1");
    }
  }
  if (flags_.symmetric && !is_symmetric()) {
    throw std::invalid_argument("MarkovOperator: flagged symmetric but not symmetric");
  }
  if (flags_.doubly_stochastic) {
    for (std::size_t j = 0; j < K_; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < K_; ++i) col += entries_[i * K_ + j];
      if (std::fabs(col - 1.0) > 1e-12) {
        throw std::invalid_argument("MarkovOperator: flagged doubly stochastic but column " +
                                    std::to_string(j) + " does not sum to 1");
      }
    }
  }
}

bool MarkovOperator::is_symmetric(double tol) const {
  for (std::size_t i = 0; i < K_; ++i) {
    for (std::size_t j = i + 1; j < K_; ++j) {
      if (std::fabs(entries_[i * K_ + j] - entries_[j * K_ + i]) > tol) return false;
    }
  }
  return true;
}

MarkovOperator MarkovOperator::identity(std::size_t K) {
  std::vector<double> e(K * K, 0.0);
  for (std::size_t i = 0; i < K; ++i) e[i * K + i] = 1.0;
  return MarkovOperator(K, std::move(e), {true, true});
}

MarkovOperator MarkovOperator::cycle_walk(std::size_t K, double lazy) {
  if (!(lazy >= 0.0 && lazy <= 1.0)) throw std::invalid_argument("cycle_walk: lazy in [0, 1]");
  std::vector<double> e(K * K, 0.0);
  const double step = 0.5 * (1.0 - lazy);
  for (std::size_t i = 0; i < K; ++i) {
    e[i * K + i] += lazy;
    e[i * K + (i + 1) % K] += step;
    e[i * K + (i + K - 1) % K] += step;
  }
  return MarkovOperator(K, std::move(e), {true, true});
}

namespace {

std::vector<double> random_weights(std::size_t count, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(count);
  for (double& x : w) x = expo(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> permutation_mixture(std::size_t K, std::mt19937_64& rng, bool symmetrise) {
  const std::size_t count = 3;
  const std::vector<double> w = random_weights(count, rng);
  std::vector<double> e(K * K, 0.0);
  std::vector<std::size_t> perm(K);
  for (std::size_t c = 0; c < count; ++c) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < K; ++i) {
      if (symmetrise) {
        e[i * K + perm[i]] += 0.5 * w[c];
        e[perm[i] * K + i] += 0.5 * w[c];
      } else {
        e[i * K + perm[i]] += w[c];
      }
    }
  }
  return e;
}

}  // namespace

MarkovOperator MarkovOperator::random_symmetric(std::size_t K, std::mt19937_64& rng) {
  return MarkovOperator(K, permutation_mixture(K, rng, true), {true, true});
}

MarkovOperator MarkovOperator::random_doubly_stochastic(std::size_t K, std::mt19937_64& rng) {
  return MarkovOperator(K, permutation_mixture(K, rng, false), {false, true});
}

MarkovOperator MarkovOperator::random_stochastic(std::size_t K, std::mt19937_64& rng) {
  std::vector<double> e;
  e.reserve(K * K);
  for (std::size_t i = 0; i < K; ++i) {
    const std::vector<double> row = random_weights(K, rng);
    e.insert(e.end(), row.begin(), row.end());
  }
  return MarkovOperator(K, std::move(e), {});
}

void write_markov(std::ostream& out, const MarkovOperator& T) {
  std::string flags;
  if (T.flags().symmetric) flags = "symmetric";
  if (T.flags().doubly_stochastic) flags += flags.empty() ? "doubly_stochastic" : ",doubly_stochastic";
  out << T.K() << ' ' << (flags.empty() ? "-" : flags) << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < T.K(); ++i) {
    for (std::size_t j = 0; j < T.K(); ++j) out << (j ? " " : "") << T(i, j);
    out << '\n';
  }
}

MarkovOperator read_markov(std::istream& in) {
  std::size_t K = 0;
  std::string flag_text;
  if (!(in >> K >> flag_text)) throw std::runtime_error("read_markov: bad header");
  MarkovFlags flags;
  if (flag_text != "-") {
    std::stringstream ss(flag_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "symmetric") {
        flags.symmetric = true;
      } else if (item == "doubly_stochastic") {
        flags.doubly_stochastic = true;
      } else {
        throw std::runtime_error("read_markov: unknown flag '" + item + "'");
      }
    }
  }
  std::vector<double> e(K * K);
  for (double& v : e) {
    if (!(in >> v)) throw std::runtime_error("read_markov: truncated matrix");
  }
  return MarkovOperator(K, std::move(e), flags);
}

MarkovOperator load_markov(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_markov(in);
}

StateFn::StateFn(NormSpec space, std::size_t K) : space_(space), values_(K * space.dim(), 0.0) {}

StateFn::StateFn(NormSpec space, std::vector<double> flat_values)
    : space_(space), values_(std::move(flat_values)) {
  if (values_.size() % space_.dim() != 0) {
    throw std::invalid_argument("StateFn: value block is not a multiple of the dimension");
  }
}

StateFn StateFn::scalar(std::vector<double> values) {
  return StateFn(NormSpec(1.0, 1), std::move(values));
}

double StateFn::mean_norm_pow(double p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < K(); ++i) s += norm_pow(space_, at(i), p);
  return s / static_cast<double>(K());
}

double StateFn::lp_norm(double p) const { return std::pow(mean_norm_pow(p), 1.0 / p); }

double StateFn::sup_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < K(); ++i) s = std::max(s, norm_pow(space_, at(i), 1.0));
  return s;
}

StateFn& StateFn::operator+=(const StateFn& other) {
  if (!(space_ == other.space_) || values_.size() != other.values_.size()) {
    throw std::invalid_argument("StateFn: incompatible operands");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

StateFn& StateFn::operator-=(const StateFn& other) {
  if (!(space_ == other.space_) || values_.size() != other.values_.size()) {
    throw std::invalid_argument("StateFn: incompatible operands");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

StateFn& StateFn::operator*=(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

double max_distance(const StateFn& f, const StateFn& g) {
  if (f.K() != g.K() || !(f.space() == g.space())) {
    throw std::invalid_argument("max_distance: incompatible operands");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.K(); ++i) s = std::max(s, diff_norm(f.space(), f.at(i), g.at(i)));
  return s;
}

StateFn apply(const MarkovOperator& T, const StateFn& f) {
  if (f.K() != T.K()) throw std::invalid_argument("apply: state count mismatch");
  const std::size_t K = T.K();
  const std::size_t m = f.dim();
  StateFn out(f.space(), K);
  for (std::size_t i = 0; i < K; ++i) {
    double* dst = out.at(i);
    for (std::size_t j = 0; j < K; ++j) {
      const double w = T(i, j);
      if (w == 0.0) continue;
      const double* src = f.at(j);
      for (std::size_t c = 0; c < m; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

StateFn ergodic_avg(const MarkovOperator& T, std::size_t n, const StateFn& f) {
  StateFn sum = f;
  StateFn power = f;
  for (std::size_t k = 1; k <= n; ++k) {
    power = apply(T, power);
    sum += power;
  }
  sum *= 1.0 / static_cast<double>(n + 1);
  return sum;
}

StateFn ergodic_avg_continuous(const MarkovOperator& Q, double t, const StateFn& f) {
  if (!Q.is_symmetric()) throw std::invalid_argument("ergodic_avg_continuous: Q must be symmetric");
  if (!(t > 0.0)) throw std::invalid_argument("ergodic_avg_continuous: t must be positive");
  if (f.K() != Q.K()) throw std::invalid_argument("ergodic_avg_continuous: state count mismatch");
  const auto K = static_cast<Eigen::Index>(Q.K());
  const auto m = static_cast<Eigen::Index>(f.dim());
  Eigen::MatrixXd L(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      L(i, j) = Q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - (i == j ? 1.0 : 0.0);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  Eigen::VectorXd factor(K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const double x = t * eig.eigenvalues()(i);
    factor(i) = std::fabs(x) < 1e-12 ? 1.0 : std::expm1(x) / x;
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> F(
      f.flat().data(), K, m);
  const Eigen::MatrixXd& V = eig.eigenvectors();
  const Eigen::MatrixXd out = V * (factor.asDiagonal() * (V.transpose() * F));
  StateFn result(f.space(), f.K());
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index c = 0; c < m; ++c) result.at(static_cast<std::size_t>(i))[c] = out(i, c);
  }
  return result;
}

DifferenceTable::DifferenceTable(const MarkovOperator& T, StateFn f) : T_(T) {
  if (f.K() != T.K()) throw std::invalid_argument("DifferenceTable: state count mismatch");
  rows_.push_back({std::move(f)});
}

const StateFn& DifferenceTable::delta(int m, std::size_t n) {
  if (m < 0) throw std::invalid_argument("delta: m must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  while (rows_.size() <= mm) {
    const StateFn& g = rows_.back().front();
    rows_.push_back({apply(T_, g) - g});
  }
  std::deque<StateFn>& row = rows_[mm];
  while (row.size() <= n) row.push_back(apply(T_, row.back()));
  return row[n];
}

double DifferenceTable::bound(int m) { return delta(m, 0).sup_norm(); }

StateFn delta_mn(const MarkovOperator& T, int m, std::size_t n, const StateFn& f) {
  DifferenceTable table(T, f);
  return table.delta(m, n);
}

std::complex<double> frac_coeff(std::complex<double> alpha, std::size_t n) {
  std::complex<double> a = 1.0;
  for (std::size_t k = 1; k <= n; ++k) a *= (alpha + static_cast<double>(k)) / static_cast<double>(k);
  return a;
}

ComplexStateFn frac_average(const MarkovOperator& T, std::complex<double> alpha, std::size_t n,
                            const StateFn& f) {
  std::vector<std::complex<double>> coeff(n + 1);
  coeff[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    coeff[k] = coeff[k - 1] * (alpha - 1.0 + static_cast<double>(k)) / static_cast<double>(k);
  }
  const std::complex<double> scale = std::pow(std::complex<double>(static_cast<double>(n + 1)), -alpha);
  ComplexStateFn out{StateFn(f.space(), f.K()), StateFn(f.space(), f.K())};
  StateFn power = f;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) power = apply(T, power);
    const std::complex<double> w = coeff[n - k] * scale;
    for (std::size_t i = 0; i < power.flat().size(); ++i) {
      out.re.flat()[i] += w.real() * power.flat()[i];
      out.im.flat()[i] += w.imag() * power.flat()[i];
    }
  }
  return out;
}

StateFn frac_average(const MarkovOperator& T, double alpha, std::size_t n, const StateFn& f) {
  std::vector<double> coeff(n + 1);
  coeff[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    coeff[k] = coeff[k - 1] * (alpha - 1.0 + static_cast<double>(k)) / static_cast<double>(k);
  }
  const double scale = std::pow(static_cast<double>(n + 1), -alpha);
  StateFn out(f.space(), f.K());
  StateFn power = f;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) power = apply(T, power);
    const double w = coeff[n - k] * scale;
    for (std::size_t i = 0; i < power.flat().size(); ++i) out.flat()[i] += w * power.flat()[i];
  }
  return out;
}

namespace {

double power_of(std::size_t n, int e) { return std::pow(static_cast<double>(n), e); }

// sum_{j=lo}^{hi} (j+1) D^{m+1}_j f.
StateFn weighted_sum(DifferenceTable& table, int m, std::size_t lo, std::size_t hi,
                     const StateFn& like) {
  StateFn s(like.space(), like.K());
  for (std::size_t j = lo; j <= hi; ++j) {
    StateFn term = table.delta(m + 1, j);
    term *= static_cast<double>(j + 1);
    s += term;
  }
  return s;
}

StateFn big_a(DifferenceTable& table, int m, std::size_t n, const StateFn& like) {
  StateFn s = weighted_sum(table, m, n, 2 * n, like);
  s *= power_of(n, m - 1);
  return s;
}

// sum_{j=lo}^{hi} (j+1).
double weight_total(std::size_t lo, std::size_t hi) {
  if (lo > hi) return 0.0;
  return 0.5 * static_cast<double>(hi - lo + 1) * static_cast<double>(lo + hi + 2);
}

}  // namespace

IdentityResidual decomposition_formula_residual(const MarkovOperator& T, int m, std::size_t n,
                                                const StateFn& f) {
  if (m < 1 || n < 1) throw std::invalid_argument("decomposition_formula_residual: need m, n >= 1");
  DifferenceTable table(T, f);
  const double nm = power_of(n, m);
  const double nm1 = power_of(n, m - 1);
  const double ratio = static_cast<double>(n + 1) / static_cast<double>(n);
  const StateFn lhs = nm * table.delta(m, 2 * n + 1);
  const StateFn a = big_a(table, m, n, f);
  const StateFn b = nm * (table.delta(m, 2 * n + 1) - table.delta(m, n));
  const StateFn tail = nm1 * (table.delta(m - 1, 2 * n + 1) - table.delta(m - 1, n + 1));
  const StateFn rhs = a - ratio * b + tail;
  IdentityResidual r;
  r.residual = max_distance(lhs, rhs);
  r.scale = nm * table.bound(m) + nm1 * weight_total(n, 2 * n) * table.bound(m + 1) +
            2.0 * ratio * nm * table.bound(m) + 2.0 * nm1 * table.bound(m - 1);
  return r;
}

IdentityResidual abc_split_residual(const MarkovOperator& T, int m,
                                    const std::vector<std::size_t>& indices, const StateFn& f) {
  if (indices.empty() || indices.front() != 1) {
    throw std::invalid_argument("abc_split_residual: indices must start at n_0 = 1");
  }
  for (std::size_t k = 1; k < indices.size(); ++k) {
    if (indices[k] <= indices[k - 1]) {
      throw std::invalid_argument("abc_split_residual: indices must be strictly increasing");
    }
  }
  DifferenceTable table(T, f);
  IdentityResidual r;
  for (std::size_t k = 1; k < indices.size(); ++k) {
    const std::size_t nk = indices[k];
    const std::size_t np = indices[k - 1];
    const double pk = power_of(nk, m - 1);
    const double pp = power_of(np, m - 1);
    StateFn a(f.space(), f.K());
    StateFn b(f.space(), f.K());
    StateFn c(f.space(), f.K());
    double pieces = 0.0;
    if (2 * np >= nk) {
      a = pk * weighted_sum(table, m, 2 * np + 1, 2 * nk, f);
      b = -pp * weighted_sum(table, m, np, nk - 1, f);
      c = (pk - pp) * weighted_sum(table, m, nk, 2 * np, f);
      pieces = pk * weight_total(2 * np + 1, 2 * nk) + pp * weight_total(np, nk - 1) +
               std::fabs(pk - pp) * weight_total(nk, 2 * np);
    } else {
      a = pk * weighted_sum(table, m, nk, 2 * nk, f);
      b = -pp * weighted_sum(table, m, np, 2 * np, f);
      pieces = pk * weight_total(nk, 2 * nk) + pp * weight_total(np, 2 * np);
    }
    const StateFn ak = big_a(table, m, nk, f);
    const StateFn ap = big_a(table, m, np, f);
    r.residual = std::max(r.residual, max_distance(ak - ap, a + b + c));
    const double bound = pk * weight_total(nk, 2 * nk) + pp * weight_total(np, 2 * np) + pieces;
    r.scale = std::max(r.scale, bound * table.bound(m + 1));
  }
  return r;
}

double lambda_j(int m, double q0, const std::vector<std::size_t>& indices, std::size_t j) {
  if (!(q0 >= 2.0)) throw std::invalid_argument("lambda_j: q0 must be >= 2");
  double total = 0.0;
  for (std::size_t k = 1; k < indices.size(); ++k) {
    const std::size_t nk = indices[k];
    const std::size_t np = indices[k - 1];
    if (!(nk <= j && j <= 2 * np)) continue;
    const double pk = power_of(nk, m - 1);
    const double ratio = std::fabs((pk - power_of(np, m - 1)) / pk);
    total += std::pow(ratio, q0);
  }
  return total;
}

double elementary_sum_constant(int m, double q0, std::size_t n) {
  if (n < 1 || !(q0 > 1.0)) throw std::invalid_argument("elementary_sum_constant: need n >= 1, q0 > 1");
  const double e = (1.0 - q0 * m) / (q0 - 1.0);
  double s = 0.0;
  for (std::size_t j = n; j <= 2 * n; ++j) s += std::pow(static_cast<double>(j + 1), e);
  return std::pow(s, (q0 - 1.0) / q0) / power_of(n, 1 - m);
}

std::vector<SweepPoint> elementary_sum_sweep(int m, double q0, std::size_t n_max) {
  std::vector<SweepPoint> out;
  const std::size_t dense = std::min<std::size_t>(n_max, 1000);
  for (std::size_t n = 1; n <= dense; ++n) out.push_back({n, elementary_sum_constant(m, q0, n)});
  double x = static_cast<double>(dense);
  while (true) {
    x *= 1.1;
    const auto n = static_cast<std::size_t>(std::llround(x));
    if (n > n_max) break;
    if (n > out.back().n) out.push_back({n, elementary_sum_constant(m, q0, n)});
  }
  if (out.back().n < n_max) out.push_back({n_max, elementary_sum_constant(m, q0, n_max)});
  return out;
}

double weighted_variation_gap(const std::vector<double>& delta, const TimeFamily& z, double q) {
  if (delta.size() != z.size()) throw std::invalid_argument("weighted_variation_gap: length mismatch");
  const double dv = vq_norm_exact(NormSpec(1.0, 1), delta, 1.0);
  const double zv = vq_norm_exact(z, q);
  std::vector<double> prod(z.flat().begin(), z.flat().end());
  const std::size_t m = z.space().dim();
  for (std::size_t i = 0; i < delta.size(); ++i) {
    for (std::size_t c = 0; c < m; ++c) prod[i * m + c] *= delta[i];
  }
  return 3.0 * dv * zv - vq_norm_exact(z.space(), prod, q);
}

LittlewoodPaley littlewood_paley_phi(const MarkovOperator& T, int m, double q0,
                                     const StateFn& f, std::size_t n_max) {
  if (n_max < 1) throw std::invalid_argument("littlewood_paley_phi: n_max must be >= 1");
  if (m < 0 || !(q0 >= 1.0)) throw std::invalid_argument("littlewood_paley_phi: bad exponents");
  DifferenceTable table(T, f);
  const std::size_t K = f.K();
  std::vector<double> acc(K, 0.0);
  LittlewoodPaley out{StateFn::scalar(std::vector<double>(K, 0.0)), {}};
  out.partial.reserve(n_max);
  for (std::size_t j = 1; j <= n_max; ++j) {
    const StateFn& d = table.delta(m + 1, j);
    const double w = std::pow(static_cast<double>(j + 1), (m + 1) * q0 - 1.0);
    std::vector<double> roots(K);
    for (std::size_t s = 0; s < K; ++s) {
      acc[s] += w * norm_pow(f.space(), d.at(s), q0);
      roots[s] = std::pow(acc[s], 1.0 / q0);
    }
    out.partial.push_back(std::move(roots));
  }
  out.phi.flat() = out.partial.back();
  return out;
}

StateFn variation_of_averages(const MarkovOperator& T, const StateFn& f, double q,
                              std::size_t n_max) {
  if (!(q > 2.0)) throw std::invalid_argument("variation_of_averages: q must exceed 2");
  const std::size_t K = f.K();
  const std::size_t m = f.dim();
  std::vector<double> seq((n_max + 1) * K * m);  // [n][state][coord]
  StateFn power = f;
  StateFn sum = f;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      power = apply(T, power);
      sum += power;
    }
    const double inv = 1.0 / static_cast<double>(n + 1);
    for (std::size_t i = 0; i < K * m; ++i) seq[n * K * m + i] = sum.flat()[i] * inv;
  }
  StateFn out = StateFn::scalar(std::vector<double>(K, 0.0));
  std::vector<double> path((n_max + 1) * m);
  for (std::size_t s = 0; s < K; ++s) {
    for (std::size_t n = 0; n <= n_max; ++n) {
      std::copy_n(seq.data() + n * K * m + s * m, m, path.data() + n * m);
    }
    out.flat()[s] = vq_norm_exact(f.space(), path, q);
  }
  return out;
}

}  // namespace qvar
