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

// Finite-dimensional l^r spaces used as stand-ins for the Banach space B.

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace qvar {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// l^r on R^dim. r = kInfinity selects the max norm.
class NormSpec {
 public:
  NormSpec(double r, std::size_t dim);

  double r() const { return r_; }
  std::size_t dim() const { return dim_; }
  bool is_max_norm() const { return r_ == kInfinity; }

  bool operator==(const NormSpec&) const = default;

 private:
  double r_;
  std::size_t dim_;
};

// A concrete element of B.
class VecB {
 public:
  VecB() = default;
  explicit VecB(std::vector<double> coords) : coords_(std::move(coords)) {}
  VecB(std::initializer_list<double> coords) : coords_(coords) {}

  static VecB zeros(std::size_t dim) { return VecB(std::vector<double>(dim, 0.0)); }

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  std::span<const double> span() const { return coords_; }

  VecB& operator+=(const VecB& other);
  VecB& operator-=(const VecB& other);
  VecB& operator*=(double alpha);

  friend VecB operator+(VecB a, const VecB& b) { return a += b; }
  friend VecB operator-(VecB a, const VecB& b) { return a -= b; }
  friend VecB operator*(double alpha, VecB v) { return v *= alpha; }

  bool operator==(const VecB&) const = default;

 private:
  std::vector<double> coords_;
};

// Throws std::invalid_argument when v.size() != space.dim().
double norm(const NormSpec& space, std::span<const double> v);
inline double norm(const NormSpec& space, const VecB& v) { return norm(space, v.span()); }

namespace detail {

// ||v||^q for a raw coordinate block of length dim, with the sqrt/pow pair
// folded into a single pow. Hot path of every variation computation.
template <typename Coord>
inline double norm_pow_impl(const NormSpec& space, double q, Coord coord) {
  const std::size_t m = space.dim();
  const double r = space.r();
  if (r == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double c = coord(i);
      s += c * c;
    }
    if (q == 2.0) return s;
    if (q == 4.0) return s * s;
    if (q == 1.0) return std::sqrt(s);
    return std::pow(s, 0.5 * q);
  }
  if (r == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::fabs(coord(i));
    return q == 1.0 ? s : std::pow(s, q);
  }
  if (r == kInfinity) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s = std::fmax(s, std::fabs(coord(i)));
    return q == 1.0 ? s : std::pow(s, q);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += std::pow(std::fabs(coord(i)), r);
  return std::pow(s, q / r);
}

}  // namespace detail

// ||a||^q where a points at space.dim() coordinates.
inline double norm_pow(const NormSpec& space, const double* a, double q) {
  return detail::norm_pow_impl(space, q, [a](std::size_t i) { return a[i]; });
}

// ||a - b||^q where a and b point at space.dim() coordinates.
inline double diff_norm_pow(const NormSpec& space, const double* a, const double* b,
                            double q) {
  return detail::norm_pow_impl(space, q, [a, b](std::size_t i) { return a[i] - b[i]; });
}

inline double diff_norm(const NormSpec& space, const double* a, const double* b) {
  return diff_norm_pow(space, a, b, 1.0);
}

// Martingale cotype of l^r: max(2, r), infinite for the max norm.
double cotype_exponent(const NormSpec& space);

// (sum values_i^q)^(1/q); max for q = kInfinity; 0 for an empty list.
double seq_lq(std::span<const double> values, double q);

}  // namespace qvar
