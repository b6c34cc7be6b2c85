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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qvar/ergodic.hpp"
#include "qvar/harness.hpp"
#include "qvar/semigroup.hpp"

using namespace qvar;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

ExperimentReport run(const std::string& name, std::vector<std::pair<std::string, std::string>> params) {
  ExperimentConfig c;
  c.experiment = name;
  for (const auto& [k, v] : params) c.set(k, v);
  return run_experiment(c);
}

std::string row_text(const ReportRow& row) {
  std::ostringstream s;
  for (const auto& [k, v] : row.params) s << k << '=' << v << ' ';
  s << row.statistic << '=' << fmt(row.value);
  return s.str();
}

// Folds the contract rows of reports into one outcome, listing a few failing rows.
Outcome contracts(const std::vector<ExperimentReport>& reports) {
  Outcome o;
  std::size_t pass = 0, fail = 0;
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      if (row.status == "pass") ++pass;
      if (row.status != "fail") continue;
      if (++fail <= 6) o.notes.push_back("failing row [" + rep.experiment + "] " + row_text(row));
    }
  }
  o.pass = fail == 0 && pass > 0;
  o.summary = std::to_string(pass) + "/" + std::to_string(pass + fail) + " contract rows pass";
  return o;
}

double stat_max(const ExperimentReport& rep, const std::string& statistic) {
  double m = 0.0;
  for (const auto& row : rep.rows) {
    if (row.statistic == statistic) m = std::max(m, std::fabs(row.value));
  }
  return m;
}

std::vector<const ReportRow*> rows_named(const ExperimentReport& rep, const std::string& statistic) {
  std::vector<const ReportRow*> out;
  for (const auto& row : rep.rows) {
    if (row.statistic == statistic) out.push_back(&row);
  }
  return out;
}

Outcome variation_oracle() {
  const ExperimentReport rep = run("variation-oracle", {{"count", "200"}, {"n_max", "12"}});
  Outcome o = contracts({rep});
  o.summary += ", max relative difference " + fmt(stat_max(rep, "relative_difference"));
  return o;
}

Outcome jump_oracle() {
  const ExperimentReport rep = run("jump-oracle", {{"count", "200"}, {"n_max", "12"}});
  Outcome o = contracts({rep});
  double min_gap = INFINITY;
  for (const auto* row : rows_named(rep, "variation_minus_jumps")) min_gap = std::min(min_gap, row->value);
  o.summary += ", smallest variation minus jump term " + fmt(min_gap);
  return o;
}

Outcome cz_properties() {
  const ExperimentReport rep = run("cz-properties", {{"count", "100"}, {"J", "6"}});
  Outcome o = contracts({rep});
  double cubes = 0.0;
  for (const auto* row : rows_named(rep, "cube_count")) cubes += row->value;
  o.summary += ", " + fmt(cubes) + " stopping cubes in total";
  return o;
}

Outcome master_decomposition() {
  const ExperimentReport rep = run("master-decomposition",
                                   {{"count", "50"}, {"d", "1"}, {"J", "8"}, {"q", "4"}, {"q0", "2"}});
  Outcome o = contracts({rep});
  o.summary += ", largest residual " + fmt(stat_max(rep, "max_residual"));
  return o;
}

Outcome identities() {
  const ExperimentReport rep = run("ergodic-identity", {{"count", "100"}, {"K", "8"}, {"n_max", "50"}, {"m_max", "3"}});
  Outcome o = contracts({rep});
  o.summary += ", worst relative residuals " + fmt(stat_max(rep, "decomposition_relative_residual")) + " and " +
               fmt(stat_max(rep, "abc_relative_residual"));
  return o;
}

Outcome lambda_bounds() {
  const ExperimentReport rep = run("lambda-j", {{"count", "1000"}, {"q0", "2,3"}});
  Outcome o = contracts({rep});
  for (const auto* row : rows_named(rep, "max_lambda_j")) o.notes.push_back(row_text(*row));
  return o;
}

Outcome elementary() {
  const ExperimentReport rep = run("elementary-constants", {{"n_max", "100000"}, {"pairs", "500"}});
  Outcome o = contracts({rep});
  o.summary += ", largest sup " + fmt(stat_max(rep, "sup_constant")) + ", largest dispersion " +
               fmt(stat_max(rep, "plateau_dispersion"));
  return o;
}

Outcome lacunary_anchor() {
  const ExperimentReport rep = run("lacunary", {{"i_max", "30"}});
  Outcome o = contracts({rep});
  const double g30 = lacunary_gap(30);
  const double stated = std::exp(-1.0) - std::exp(-2.0);
  o.summary += ", gap(1) = " + fmt(lacunary_gap(1)) + ", gap(30) = " + fmt(g30);
  o.notes.push_back("target e^-1 - e^-2 = " + fmt(stated) + ", distance " + fmt(std::fabs(g30 - stated)));
  o.notes.push_back("gap(i) = |exp(-2 t_{i+1}) - exp(-2 t_i)| with t_i = ln(1 + 1/i) tends to exp(-1/2) - exp(-1) = " +
                    fmt(lacunary_gap_limit()) + "; gap(30) is within " + fmt(std::fabs(g30 - lacunary_gap_limit())) +
                    " of that value");
  o.notes.push_back("the anchor value is not the limit of this sequence, so no tolerance can be met at i >= 30");
  return o;
}

Outcome fractional_anchor() {
  const ExperimentReport rep = run("fractional-averages", {{"count", "20"}, {"n_max", "64"}, {"m_max", "3"}});
  Outcome o = contracts({rep});
  o.summary += ", alpha=0 worst " + fmt(stat_max(rep, "alpha_0_vs_power")) + ", alpha=1 worst " +
               fmt(stat_max(rep, "alpha_1_vs_ergodic_average")) + ", alpha=-m vs (n+1)^m D^m_n worst " +
               fmt(stat_max(rep, "alpha_minus_m_vs_scaled_delta_n"));
  o.notes.push_back("the weights A^{-m-1}_j are the coefficients of (1-z)^m, so S^{-m}_n = sum_{j<=m} (-1)^j C(m,j) "
                    "T^{n-j} f = (T-I)^m T^{n-m} f = D^m_{n-m} f for n >= m");
  o.notes.push_back("relation with D^m_{n-m}: worst relative residual " +
                    fmt(stat_max(rep, "alpha_minus_m_vs_scaled_delta_n_minus_m_relative")) +
                    "; the index n in place of n-m is off by T^m and cannot hold to 1e-12");
  return o;
}

Outcome semigroup_axioms() {
  const ExperimentReport rep = run("semigroup-axioms", {{"count", "20"}, {"t", "0.1,1,10"}});
  Outcome o = contracts({rep});
  o.summary += ", worst law error " + fmt(stat_max(rep, "semigroup_law_error"));
  return o;
}

Outcome poisson() {
  const ExperimentReport rep = run("poisson-summation", {{"t", "1"}, {"x", "0.3"}, {"N", "1,10,100,1000,10000"},
                                                         {"series_terms", "200"}, {"circle_t", "0.1,0.13,0.25,0.5,1"}});
  Outcome o = contracts({rep});
  o.summary += ", residual at N=10^4 " + fmt(poisson_summation_residual(1.0, 0.3, 10000));
  for (const auto* row : rows_named(rep, "closed_form_vs_series")) {
    o.notes.push_back("closed form vs 200-term series " + row_text(*row) + " [" + row->status + "]");
  }
  const double t = 0.1;
  const double tail = 2.0 * std::exp(-201.0 * t) / (1.0 - std::exp(-t));
  o.notes.push_back("at t=0.1 the neglected tail sum_{|n|>200} e^{-|n|t} is " + fmt(tail) +
                    " at theta=0, so 1e-10 needs N >= 245 there");
  o.notes.push_back("width t/(2 pi) for the line kernel; width t gives residual " +
                    fmt(poisson_summation_residual_unscaled(1.0, 0.3, 10000)) + " (recorded)");
  return o;
}

Outcome hilbert() {
  const ExperimentReport rep = run("martingale-cotype", {{"count", "50"}, {"martingales", "20"}, {"dim", "64"}});
  Outcome o = contracts({rep});
  o.summary += ", worst relative difference " + fmt(stat_max(rep, "relative_difference"));
  o.notes.push_back("l^3 Rademacher martingales, m=64: max ratio " + fmt(stat_max(rep, "max_ratio")) + " (recorded)");
  return o;
}

Outcome cotype_trend() {
  const ExperimentReport rep = run("cotype-necessity", {{"K", "1,2,4,8,16"}, {"q", "2"}, {"r", "2,4"}});
  Outcome o = contracts({rep});
  for (const auto* row : rows_named(rep, "log_log_slope")) o.notes.push_back(row_text(*row));
  return o;
}

Outcome boundedness() {
  const ExperimentReport a = run("vq-boundedness", {{"J_min", "4"}, {"J_max", "10"}, {"p", "1.5,2,3"}, {"q", "4"}});
  const ExperimentReport b = run("ergodic-variation", {{"K", "32"}, {"q", "4"}, {"n_max", "32,64,128,256,512"}});
  const ExperimentReport c = run("semigroup-variation", {{"K", "32"}, {"per_octave", "1,2,4,8,16"}});
  Outcome o = contracts({a, b, c});
  for (const auto* rep : {&a, &b, &c}) {
    for (const auto& row : rep->rows) {
      if (row.statistic == "plateau_dispersion" || row.statistic == "last_doubling_change") {
        o.notes.push_back("[" + rep->experiment + "] " + row_text(row));
      }
    }
  }
  return o;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "variation oracle", 10, variation_oracle},
      {2, "jump oracle", 10, jump_oracle},
      {3, "Calderon-Zygmund properties", 30, cz_properties},
      {4, "master decomposition", 120, master_decomposition},
      {5, "difference identities", 60, identities},
      {6, "Lambda_j bounds", 30, lambda_bounds},
      {7, "elementary sums and weighted variation", 60, elementary},
      {8, "lacunary anchor", 1, lacunary_anchor},
      {9, "fractional averages anchor", 30, fractional_anchor},
      {10, "semigroup axioms and law", 10, semigroup_axioms},
      {11, "Poisson summation and circle kernel", 10, poisson},
      {12, "Hilbert exactness", 10, hilbert},
      {13, "cotype necessity trend", 30, cotype_trend},
      {14, "boundedness sweeps", 600, boundedness},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool ok = o.pass && in_time;
    char timing[96];
    std::snprintf(timing, sizeof timing, "%.3f s of %.0f s%s", secs, c.limit_seconds, in_time ? "" : " EXCEEDED");
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.name << ": " << o.summary << " ("
              << timing << ")\n";
    for (const auto& n : o.notes) std::cout << "      " << n << '\n';
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
