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

// Experiment driver: key=value configuration, seeded corpora, a small work
// pool, constant estimation and CSV/JSON reports written atomically.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qvar/dyadic_martingale.hpp"
#include "qvar/normed_space.hpp"

namespace qvar {

inline constexpr const char* kVersion = "0.1.0";

class ExperimentConfig {
 public:
  std::string experiment;
  std::uint64_t seed = 20260101;
  std::string out;
  std::string format = "csv";

  // key=value lines; '#' starts a comment. experiment, seed, out and format
  // set the fields above, every other key becomes a parameter.
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_stream(std::istream& in);
  void set(const std::string& key, const std::string& value);
  // "key=value".
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return params_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  // Comma separated numbers; "inf" is accepted.
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  const std::map<std::string, std::string>& params() const { return params_; }

 private:
  std::map<std::string, std::string> params_;
};

struct ReportRow {
  std::vector<std::pair<std::string, std::string>> params;
  std::string statistic;
  double value = 0.0;
  std::string status;  // pass | fail | record
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  double wall_seconds = 0.0;
  std::vector<ReportRow> rows;

  void record(std::vector<std::pair<std::string, std::string>> params, std::string statistic,
              double value);
  // Contract row: status pass when ok, fail otherwise.
  void check(std::vector<std::pair<std::string, std::string>> params, std::string statistic,
             double value, bool ok);
  bool all_contracts_pass() const;
  std::size_t count(const std::string& status) const;
};

struct ConstantSummary {
  double max = 0.0;
  double p95 = 0.0;
  double dispersion = 0.0;  // (max - min) / max over the last quartile
};
// Throws on empty input. The quartile keeps at least two samples.
ConstantSummary estimate_constant(const std::vector<double>& samples);

void write_csv(std::ostream& out, const ExperimentReport& report);
void write_json(std::ostream& out, const ExperimentReport& report);
// Writes to path.tmp and renames over path.
void write_report_atomic(const std::string& path, const ExperimentReport& report,
                         const std::string& format);

std::vector<std::string> experiment_names();
// Runs the named experiment and writes the report when config.out is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Number formatting used for parameter cells.
std::string fmt(double v);
std::string fmt(long v);
std::string fmt(std::size_t v);

// --- corpora -----------------------------------------------------------------

// Independent generator for item `stream` of a run seeded with `seed`.
std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t stream);

GridFn gaussian_gridfn(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng);
GridFn integer_gridfn(const DyadicGrid& grid, const NormSpec& space, int lo, int hi,
                      std::mt19937_64& rng);
// Zero except for a gaussian vector at one random point.
GridFn spike_gridfn(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng);
// sum over dyadic cubes Q of eps_Q h_Q x_Q with Haar-type h_Q along the first
// axis, random signs eps_Q and gaussian x_Q.
GridFn rademacher_martingale(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng);

// --- work pool ---------------------------------------------------------------

// Evaluates fn(0..n-1) on up to hardware_concurrency threads; results are
// stored by index, so the output does not depend on the schedule.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace qvar
