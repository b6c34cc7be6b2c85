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

#include "qvar/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qvar {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter " + key + ": '" + text + "' is not a number");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_stream(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return from_stream(in);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw std::invalid_argument("empty configuration key");
  if (key == "experiment") {
    experiment = value;
  } else if (key == "seed") {
    try {
      seed = std::stoull(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("seed must be a nonnegative integer");
    }
  } else if (key == "out") {
    out = value;
  } else if (key == "format") {
    if (value != "csv" && value != "json") throw std::invalid_argument("format must be csv or json");
    format = value;
  } else {
    params_[key] = value;
  }
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = params_.find(key);
  return it == params_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = params_.find(key);
  return it == params_.end() ? fallback : parse_number(key, it->second);
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const {
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  const double v = parse_number(key, it->second);
  if (v != std::floor(v) || std::fabs(v) > 1e15) {
    throw std::invalid_argument("parameter " + key + " must be an integer");
  }
  return static_cast<long>(v);
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               std::vector<double> fallback) const {
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(key, item));
  }
  if (out.empty()) throw std::invalid_argument("parameter " + key + " is an empty list");
  return out;
}

void ExperimentReport::record(std::vector<std::pair<std::string, std::string>> params,
                              std::string statistic, double value) {
  rows.push_back({std::move(params), std::move(statistic), value, "record"});
}

void ExperimentReport::check(std::vector<std::pair<std::string, std::string>> params,
                             std::string statistic, double value, bool ok) {
  rows.push_back({std::move(params), std::move(statistic), value, ok ? "pass" : "fail"});
}

bool ExperimentReport::all_contracts_pass() const { return count("fail") == 0; }

std::size_t ExperimentReport::count(const std::string& status) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.status == status; }));
}

ConstantSummary estimate_constant(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("estimate_constant: no samples");
  ConstantSummary s;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  s.max = sorted.back();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
  s.p95 = sorted[std::max<std::size_t>(rank, 1) - 1];
  const std::size_t n = samples.size();
  const std::size_t tail = std::min(n, std::max<std::size_t>(2, (n + 3) / 4));
  const auto first = samples.end() - static_cast<std::ptrdiff_t>(tail);
  const double hi = *std::max_element(first, samples.end());
  const double lo = *std::min_element(first, samples.end());
  s.dispersion = hi > 0.0 ? (hi - lo) / hi : 0.0;
  return s;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

namespace {

std::vector<std::string> columns(const ExperimentReport& report) {
  std::vector<std::string> cols;
  for (const auto& row : report.rows) {
    for (const auto& [k, v] : row.params) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  return cols;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentReport& report) {
  const std::vector<std::string> cols = columns(report);
  out << "experiment,seed,version,";
  for (const auto& c : cols) out << csv_cell(c) << ',';
  out << "statistic,value,status\n";
  for (const auto& row : report.rows) {
    out << csv_cell(report.experiment) << ',' << report.seed << ',' << csv_cell(report.version) << ',';
    for (const auto& c : cols) {
      auto it = std::find_if(row.params.begin(), row.params.end(),
                             [&](const auto& p) { return p.first == c; });
      if (it != row.params.end()) out << csv_cell(it->second);
      out << ',';
    }
    out << csv_cell(row.statistic) << ',' << fmt(row.value) << ',' << row.status << '\n';
  }
}

void write_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj;
    obj["experiment"] = report.experiment;
    obj["seed"] = report.seed;
    obj["version"] = report.version;
    for (const auto& [k, v] : row.params) obj[k] = v;
    obj["statistic"] = row.statistic;
    if (std::isfinite(row.value)) {
      obj["value"] = row.value;
    } else {
      obj["value"] = fmt(row.value);
    }
    obj["status"] = row.status;
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

void write_report_atomic(const std::string& path, const ExperimentReport& report,
                         const std::string& format) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    if (format == "json") {
      write_json(out, report);
    } else if (format == "csv") {
      write_csv(out, report);
    } else {
      throw std::invalid_argument("unknown format " + format);
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move report into place at " + path + ": " + ec.message());
  }
}

std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

GridFn gaussian_gridfn(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(grid.points() * space.dim());
  for (double& x : v) x = g(rng);
  return GridFn(grid, space, std::move(v));
}

GridFn integer_gridfn(const DyadicGrid& grid, const NormSpec& space, int lo, int hi,
                      std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> v(grid.points() * space.dim());
  for (double& x : v) x = u(rng);
  return GridFn(grid, space, std::move(v));
}

GridFn spike_gridfn(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> where(0, grid.points() - 1);
  GridFn f(grid, space);
  double* p = f.at(where(rng));
  for (std::size_t c = 0; c < space.dim(); ++c) p[c] = g(rng);
  return f;
}

GridFn rademacher_martingale(const DyadicGrid& grid, const NormSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::bernoulli_distribution coin(0.5);
  const std::size_t m = space.dim();
  GridFn f(grid, space);
  std::vector<double> x(m);
  for (double& v : x) v = g(rng);
  for (std::size_t i = 0; i < f.points(); ++i) std::copy(x.begin(), x.end(), f.at(i));
  for (int level = grid.J(); level >= 1; --level) {
    const std::size_t side = std::size_t{1} << level;
    const std::size_t per_axis = grid.side() / side;
    std::size_t cubes = 1;
    for (std::size_t k = 0; k < grid.d(); ++k) cubes *= per_axis;
    for (std::size_t c = 0; c < cubes; ++c) {
      Cube q{level, std::vector<std::size_t>(grid.d())};
      std::size_t rest = c;
      for (std::size_t k = grid.d(); k-- > 0;) {
        q.corner[k] = (rest % per_axis) * side;
        rest /= per_axis;
      }
      const double eps = coin(rng) ? 1.0 : -1.0;
      for (double& v : x) v = eps * g(rng);
      for (std::size_t p : cube_points(grid, q)) {
        const std::size_t first = grid.coords(p)[0] - q.corner[0];
        const double h = first < side / 2 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < m; ++k) f.at(p)[k] += h * x[k];
      }
    }
  }
  return f;
}

}  // namespace qvar
