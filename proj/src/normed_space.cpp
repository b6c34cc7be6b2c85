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

#include "qvar/normed_space.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qvar {

NormSpec::NormSpec(double r, std::size_t dim) : r_(r), dim_(dim) {
  if (!(r >= 1.0)) throw std::invalid_argument("NormSpec: exponent r must be >= 1");
  if (dim == 0) throw std::invalid_argument("NormSpec: dimension must be positive");
}

VecB& VecB::operator+=(const VecB& other) {
  if (other.size() != size()) throw std::invalid_argument("VecB: dimension mismatch");
  for (std::size_t i = 0; i < size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

VecB& VecB::operator-=(const VecB& other) {
  if (other.size() != size()) throw std::invalid_argument("VecB: dimension mismatch");
  for (std::size_t i = 0; i < size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

VecB& VecB::operator*=(double alpha) {
  for (double& c : coords_) c *= alpha;
  return *this;
}

double norm(const NormSpec& space, std::span<const double> v) {
  if (v.size() != space.dim()) {
    throw std::invalid_argument("norm: vector has " + std::to_string(v.size()) +
                                " coordinates, space has dimension " +
                                std::to_string(space.dim()));
  }
  if (space.is_max_norm()) {
    double s = 0.0;
    for (double c : v) s = std::max(s, std::fabs(c));
    return s;
  }
  if (space.r() == 2.0) {
    // hypot-style scaling keeps huge/tiny coordinates from overflowing.
    double scale = 0.0;
    for (double c : v) scale = std::max(scale, std::fabs(c));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double c : v) s += (c / scale) * (c / scale);
    return scale * std::sqrt(s);
  }
  return norm_pow(space, v.data(), 1.0);
}

double cotype_exponent(const NormSpec& space) { return std::max(2.0, space.r()); }

double seq_lq(std::span<const double> values, double q) {
  if (values.empty()) return 0.0;
  if (q == kInfinity) return *std::max_element(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += q == 1.0 ? v : std::pow(v, q);
  return q == 1.0 ? s : std::pow(s, 1.0 / q);
}

}  // namespace qvar
