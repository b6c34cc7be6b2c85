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

// q-variation seminorms, lambda-jump counts and the long/short splitting of
// a partition at powers of two. Every fast routine has an exhaustive twin
// used as a test oracle.

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "qvar/normed_space.hpp"

namespace qvar {

// Finite increasing family (t_i, a_i) of B-valued samples. Values are stored
// contiguously, space.dim() doubles per entry.
class TimeFamily {
 public:
  TimeFamily(NormSpec space, std::vector<double> times, std::vector<double> flat_values);

  static TimeFamily from_vectors(NormSpec space, std::vector<double> times,
                                 const std::vector<VecB>& values);
  // Times 1, 2, ..., n.
  static TimeFamily indexed(NormSpec space, std::vector<double> flat_values);
  // One-dimensional family with absolute value as the norm.
  static TimeFamily scalar(const std::vector<double>& values);

  const NormSpec& space() const { return space_; }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  const double* value(std::size_t i) const { return values_.data() + i * space_.dim(); }
  VecB value_vec(std::size_t i) const;
  std::span<const double> flat() const { return values_; }

  // Value of the last entry with time <= t (the first entry before it).
  const double* at_time(double t) const;

 private:
  NormSpec space_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// --- q-variation -------------------------------------------------------------

// Largest value of ||a_{i0}||^q + sum_k ||a_{ik} - a_{ik-1}||^q over nonempty
// increasing index chains; O(n^2) dynamic programme. `flat` holds
// flat.size()/space.dim() consecutive vectors.
double vq_power(const NormSpec& space, std::span<const double> flat, double q);

// Same supremum without the head term (pure difference variation).
double difference_variation_power(const NormSpec& space, std::span<const double> flat,
                                  double q);

// ||(a_t)||_{v_q}. Throws on an empty family or q outside [1, inf).
double vq_norm_exact(const TimeFamily& fam, double q);
double vq_norm_exact(const NormSpec& space, std::span<const double> flat, double q);

// Exhaustive maximisation over all 2^n - 1 subsequences; n <= 18.
double vq_norm_bruteforce(const TimeFamily& fam, double q);

// --- lambda jumps ------------------------------------------------------------

// N(a, lambda): the largest number of chained pairs s1 < t1 <= s2 < t2 <= ...
// with ||a_tk - a_sk|| > lambda. Greedy on the earliest completion index.
std::size_t jump_count(const TimeFamily& fam, double lambda);
std::size_t jump_count(const NormSpec& space, std::span<const double> flat, double lambda);

// Exhaustive search over every chained pair system; n <= 14.
std::size_t jump_count_bruteforce(const TimeFamily& fam, double lambda);

// ||a||_{v_q}^q - lambda^q N(a, lambda), never negative.
double jump_variation_gap(const TimeFamily& fam, double lambda, double q);

// --- long/short splitting ----------------------------------------------------

struct Interval {
  double lo;
  double hi;
  bool operator==(const Interval&) const = default;
};

struct IntervalSplit {
  // k -> pieces inside (2^k, 2^(k+1)].
  std::map<int, std::vector<Interval>> short_by_block;
  // (2^m, 2^n] with m < n.
  std::vector<Interval> long_intervals;
  // For every emitted piece, the index i of the partition interval
  // (t_i, t_{i+1}] it came from; pieces appear in increasing order.
  struct Piece {
    Interval interval;
    std::size_t source;
    bool is_long;
  };
  std::vector<Piece> pieces;
};

// k with 2^k < t <= 2^(k+1).
int dyadic_block(double t);

// Splits each (t_i, t_{i+1}] at the powers of two it contains.
// Throws unless times are positive, strictly increasing and at least two.
IntervalSplit split_intervals(std::span<const double> times);

// Aggregates of the sequence-level decomposition for a family evaluated as a
// step function: the l^q sum over the original partition gaps, and over the
// short and the long pieces of its split.
struct SplitAggregates {
  double original = 0.0;
  double short_part = 0.0;
  double long_part = 0.0;
};
SplitAggregates split_aggregates(const TimeFamily& fam, double q);

}  // namespace qvar
