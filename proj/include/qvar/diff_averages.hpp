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

// Ball and cube averages on the periodic grid and the variation operators
// built from them: V_q, the short and long variations, the master
// decomposition check and empirical probes of the weak-type and BMO bounds.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qvar/dyadic_martingale.hpp"

namespace qvar {

enum class AvgKernelShape { ball, cube };

std::string to_string(AvgKernelShape shape);
AvgKernelShape parse_shape(const std::string& text);

// Strictly increasing positive radii in grid units.
class RadiiSet {
 public:
  explicit RadiiSet(std::vector<double> radii);

  // One radius per distinct averaging set {|y| < t}, t <= N/2: the midpoint
  // between consecutive offset norms, capped at N/2.
  static RadiiSet change_points(const DyadicGrid& grid, AvgKernelShape shape);

  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }
  // Throws unless every radius is at most N/2.
  void check_fits(const DyadicGrid& grid) const;

 private:
  std::vector<double> radii_;
};

// A_t f(x): mean of f(x + y) over offsets with |y| < t (l^2 for the ball,
// max norm for the cube), periodic. Requires 0 < t <= N/2.
GridFn ball_average(const GridFn& f, double t, AvgKernelShape shape);

// A_t f for every radius, computed by one sweep over offsets sorted by norm.
std::vector<GridFn> averages_at(const GridFn& f, const RadiiSet& radii, AvgKernelShape shape);

// Pointwise v_q norm of t -> A_t f(x) over the radii.
GridFn vq_of_averages(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape);
GridFn vq_from_averages(const std::vector<GridFn>& averages, double q);

// (sum_k sup over chains of radii in (2^k, 2^(k+1)] of sum ||gap||^q0)^(1/q0).
GridFn short_variation(const GridFn& f, double q0, const RadiiSet& radii,
                       AvgKernelShape shape);
GridFn short_from_averages(const std::vector<GridFn>& averages, const RadiiSet& radii,
                           double q0);

// (sum_{k=0}^{J-1} ||A_{2^k} f(x) - E_k f(x)||^q0)^(1/q0).
GridFn long_variation(const GridFn& f, double q0, AvgKernelShape shape);

// max(0, V_q - 3 (SV_q0 + LV_q0 + V_q(E))) pointwise.
GridFn master_decomposition_check(const GridFn& f, double q, double q0,
                                  const RadiiSet& radii, AvgKernelShape shape);

// sup_x ||A_{2^k} d_n(x)||^q0 / (2^(n-k) A_{2^k}(||d_n||^q0)(x)), 0/0 = 0,
// with the ball kernel and d_0 = 0.
double probe_pointwise_LV(const GridFn& f, int k, int n, double q0);

// lambda |{V_q f > lambda}| / mean ||f||, normalised counting measure.
double weak11_ratio(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape,
                    double lambda);
double weak11_from_variation(const GridFn& f, const GridFn& variation, double lambda);

// BMO_d(V_q f) / max ||f||.
double bmo_ratio(const GridFn& f, double q, const RadiiSet& radii, AvgKernelShape shape);

// (1/(n+1)) sum_{k=0}^{n} f(j - k) on a one-dimensional grid, n < N.
GridFn one_sided_avg(const GridFn& f, std::size_t n);

// ||sigma||_1 ||b||_q0 - ||sigma * b||_q0 for finitely supported sequences.
double young_convolution_residual(const std::vector<double>& sigma,
                                  const std::vector<double>& b, double q0);

}  // namespace qvar
