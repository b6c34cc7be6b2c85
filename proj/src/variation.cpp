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

#include "qvar/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qvar {
namespace {

void check_exponent(double q) {
  if (!(q >= 1.0) || q == kInfinity) {
    throw std::invalid_argument("q-variation needs a finite exponent q >= 1");
  }
}

std::size_t count_of(const NormSpec& space, std::span<const double> flat) {
  if (flat.size() % space.dim() != 0) {
    throw std::invalid_argument("flat value block is not a multiple of the dimension");
  }
  return flat.size() / space.dim();
}

}  // namespace

TimeFamily::TimeFamily(NormSpec space, std::vector<double> times,
                       std::vector<double> flat_values)
    : space_(space), times_(std::move(times)), values_(std::move(flat_values)) {
  if (times_.empty()) throw std::invalid_argument("TimeFamily: at least one entry required");
  if (values_.size() != times_.size() * space_.dim()) {
    throw std::invalid_argument("TimeFamily: value block does not match times x dim");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > 0.0)) throw std::invalid_argument("TimeFamily: times must be positive");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("TimeFamily: times must be strictly increasing");
    }
  }
}

TimeFamily TimeFamily::from_vectors(NormSpec space, std::vector<double> times,
                                    const std::vector<VecB>& values) {
  std::vector<double> flat;
  flat.reserve(values.size() * space.dim());
  for (const VecB& v : values) {
    if (v.size() != space.dim()) throw std::invalid_argument("TimeFamily: dimension mismatch");
    flat.insert(flat.end(), v.coords().begin(), v.coords().end());
  }
  return TimeFamily(space, std::move(times), std::move(flat));
}

TimeFamily TimeFamily::indexed(NormSpec space, std::vector<double> flat_values) {
  const std::size_t n = count_of(space, flat_values);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i + 1);
  return TimeFamily(space, std::move(times), std::move(flat_values));
}

TimeFamily TimeFamily::scalar(const std::vector<double>& values) {
  return indexed(NormSpec(1.0, 1), values);
}

VecB TimeFamily::value_vec(std::size_t i) const {
  const double* p = value(i);
  return VecB(std::vector<double>(p, p + space_.dim()));
}

const double* TimeFamily::at_time(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return value(i);
}

double vq_power(const NormSpec& space, std::span<const double> flat, double q) {
  check_exponent(q);
  const std::size_t n = count_of(space, flat);
  if (n == 0) throw std::invalid_argument("vq_norm: empty family");
  const std::size_t m = space.dim();
  const double* a = flat.data();
  std::vector<double> best(n);
  double answer = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double b = norm_pow(space, a + j * m, q);
    for (std::size_t i = 0; i < j; ++i) {
      b = std::max(b, best[i] + diff_norm_pow(space, a + j * m, a + i * m, q));
    }
    best[j] = b;
    answer = std::max(answer, b);
  }
  return answer;
}

double difference_variation_power(const NormSpec& space, std::span<const double> flat,
                                  double q) {
  check_exponent(q);
  const std::size_t n = count_of(space, flat);
  const std::size_t m = space.dim();
  const double* a = flat.data();
  std::vector<double> best(n, 0.0);
  double answer = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      b = std::max(b, best[i] + diff_norm_pow(space, a + j * m, a + i * m, q));
    }
    best[j] = b;
    answer = std::max(answer, b);
  }
  return answer;
}

double vq_norm_exact(const NormSpec& space, std::span<const double> flat, double q) {
  return std::pow(vq_power(space, flat, q), 1.0 / q);
}

double vq_norm_exact(const TimeFamily& fam, double q) {
  return vq_norm_exact(fam.space(), fam.flat(), q);
}

double vq_norm_bruteforce(const TimeFamily& fam, double q) {
  check_exponent(q);
  const std::size_t n = fam.size();
  if (n > 18) throw std::invalid_argument("vq_norm_bruteforce: at most 18 entries");
  const NormSpec& space = fam.space();
  double answer = 0.0;
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    double total = 0.0;
    long prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1UL << i))) continue;
      total += prev < 0 ? norm_pow(space, fam.value(i), q)
                        : diff_norm_pow(space, fam.value(i),
                                        fam.value(static_cast<std::size_t>(prev)), q);
      prev = static_cast<long>(i);
    }
    answer = std::max(answer, total);
  }
  return std::pow(answer, 1.0 / q);
}

std::size_t jump_count(const NormSpec& space, std::span<const double> flat, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("jump_count: lambda must be positive");
  const std::size_t n = count_of(space, flat);
  const std::size_t m = space.dim();
  const double* a = flat.data();
  std::size_t count = 0;
  std::size_t start = 0;
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t s = start; s < t; ++s) {
      if (diff_norm(space, a + t * m, a + s * m) > lambda) {
        ++count;
        start = t;
        break;
      }
    }
  }
  return count;
}

std::size_t jump_count(const TimeFamily& fam, double lambda) {
  return jump_count(fam.space(), fam.flat(), lambda);
}

namespace {

std::size_t longest_chain(const std::vector<std::vector<bool>>& jumps, std::size_t start) {
  const std::size_t n = jumps.size();
  std::size_t best = 0;
  for (std::size_t s = start; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      if (jumps[s][t]) best = std::max(best, 1 + longest_chain(jumps, t));
    }
  }
  return best;
}

}  // namespace

std::size_t jump_count_bruteforce(const TimeFamily& fam, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("jump_count: lambda must be positive");
  const std::size_t n = fam.size();
  if (n > 14) throw std::invalid_argument("jump_count_bruteforce: at most 14 entries");
  std::vector<std::vector<bool>> jumps(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      jumps[s][t] = diff_norm(fam.space(), fam.value(t), fam.value(s)) > lambda;
    }
  }
  return longest_chain(jumps, 0);
}

double jump_variation_gap(const TimeFamily& fam, double lambda, double q) {
  const double n_jumps = static_cast<double>(jump_count(fam, lambda));
  return vq_power(fam.space(), fam.flat(), q) - std::pow(lambda, q) * n_jumps;
}

int dyadic_block(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("dyadic_block: t must be positive");
  int e = 0;
  const double frac = std::frexp(t, &e);  // t = frac * 2^e, frac in [0.5, 1)
  return frac == 0.5 ? e - 2 : e - 1;
}

IntervalSplit split_intervals(std::span<const double> times) {
  if (times.size() < 2) throw std::invalid_argument("split_intervals: need at least two times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw std::invalid_argument("split_intervals: times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("split_intervals: times must be strictly increasing");
    }
  }
  IntervalSplit split;
  auto emit_short = [&](Interval piece, std::size_t source) {
    split.short_by_block[dyadic_block(piece.hi)].push_back(piece);
    split.pieces.push_back({piece, source, false});
  };
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double lo = times[i];
    const double hi = times[i + 1];
    const int m = std::ilogb(lo) + 1;  // smallest power of two > lo
    const int n = std::ilogb(hi);      // largest power of two <= hi
    if (m > n) {
      emit_short({lo, hi}, i);
      continue;
    }
    const double low_power = std::ldexp(1.0, m);
    const double high_power = std::ldexp(1.0, n);
    emit_short({lo, low_power}, i);
    if (m < n) {
      split.long_intervals.push_back({low_power, high_power});
      split.pieces.push_back({{low_power, high_power}, i, true});
    }
    if (high_power < hi) emit_short({high_power, hi}, i);
  }
  return split;
}

SplitAggregates split_aggregates(const TimeFamily& fam, double q) {
  check_exponent(q);
  const NormSpec& space = fam.space();
  SplitAggregates out;
  if (fam.size() < 2) return out;
  const IntervalSplit split = split_intervals(fam.times());
  double original = 0.0;
  for (std::size_t i = 0; i + 1 < fam.size(); ++i) {
    original += diff_norm_pow(space, fam.value(i + 1), fam.value(i), q);
  }
  double short_sum = 0.0;
  double long_sum = 0.0;
  for (const auto& piece : split.pieces) {
    const double gap = diff_norm_pow(space, fam.at_time(piece.interval.hi),
                                     fam.at_time(piece.interval.lo), q);
    (piece.is_long ? long_sum : short_sum) += gap;
  }
  out.original = std::pow(original, 1.0 / q);
  out.short_part = std::pow(short_sum, 1.0 / q);
  out.long_part = std::pow(long_sum, 1.0 / q);
  return out;
}

}  // namespace qvar
