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

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qvar/harness.hpp"

using namespace qvar;

TEST_CASE("config parsing and overrides") {
  std::istringstream in("# sweep\nexperiment = lacunary\nseed=42\nq=2,2.5,inf\ncount= 7\n\nformat=json\n");
  ExperimentConfig c = ExperimentConfig::from_stream(in);
  CHECK(c.experiment == "lacunary");
  CHECK(c.seed == 42);
  CHECK(c.format == "json");
  CHECK(c.get_int("count", 1) == 7);
  const std::vector<double> q = c.get_list("q", {});
  REQUIRE(q.size() == 3);
  CHECK(std::isinf(q[2]));
  c.apply_override("count=9");
  CHECK(c.get_int("count", 1) == 9);
  CHECK(c.get_double("missing", 1.5) == 1.5);
  CHECK_THROWS(c.apply_override("novalue"));
  c.set("count", "x");
  CHECK_THROWS(c.get_int("count", 1));
  CHECK_THROWS(c.set("format", "xml"));
}

TEST_CASE("constant estimation") {
  const ConstantSummary eq = estimate_constant({2.0, 2.0, 2.0, 2.0});
  CHECK(eq.dispersion == 0.0);
  CHECK(estimate_constant({1.0, 2.0, 3.0, 4.0}).max == 4.0);
  std::vector<double> seq;
  for (int k = 0; k < 20; ++k) seq.push_back(1.0 - std::pow(0.5, k));
  CHECK(estimate_constant(seq).dispersion <= 1e-3);
  CHECK(estimate_constant(seq).p95 <= estimate_constant(seq).max);
  CHECK_THROWS(estimate_constant({}));
}

TEST_CASE("report rows and statuses") {
  ExperimentReport rep;
  rep.experiment = "demo";
  rep.seed = 3;
  rep.record({{"a", "1"}}, "x", 0.5);
  rep.check({{"a", "1"}, {"b", "2"}}, "y", 1.0, true);
  CHECK(rep.all_contracts_pass());
  rep.check({{"b", "3"}}, "z", 2.0, false);
  CHECK(!rep.all_contracts_pass());
  CHECK(rep.count("record") == 1);
  CHECK(rep.count("fail") == 1);
  std::ostringstream csv;
  write_csv(csv, rep);
  CHECK(csv.str().rfind("experiment,seed,version,a,b,statistic,value,status\n", 0) == 0);
  CHECK(csv.str().find("demo,3,0.1.0,,3,z,2,fail") != std::string::npos);
  std::ostringstream json;
  write_json(json, rep);
  CHECK(json.str().find("\"status\": \"fail\"") != std::string::npos);
}

TEST_CASE("experiments are deterministic") {
  ExperimentConfig c;
  c.experiment = "variation-oracle";
  c.set("count", "30");
  std::ostringstream a, b;
  write_csv(a, run_experiment(c));
  write_csv(b, run_experiment(c));
  CHECK(a.str() == b.str());
  c.seed = 99;
  std::ostringstream other;
  write_csv(other, run_experiment(c));
  CHECK(other.str() != a.str());
}

TEST_CASE("experiment dispatch and atomic output") {
  CHECK(experiment_names().size() >= 17);
  ExperimentConfig c;
  c.experiment = "nope";
  CHECK_THROWS(run_experiment(c));
  const auto dir = std::filesystem::temp_directory_path() / "qvar_unit_report";
  std::filesystem::create_directories(dir);
  c.experiment = "lacunary";
  c.out = (dir / "lac.csv").string();
  const ExperimentReport rep = run_experiment(c);
  CHECK(std::filesystem::exists(c.out));
  CHECK(!std::filesystem::exists(c.out + ".tmp"));
  std::ifstream in(c.out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == rep.rows.size() + 1);
  c.out = (dir / "missing" / "x.csv").string();
  CHECK_THROWS(run_experiment(c));
  c.out.clear();
  c.experiment = "master-decomposition";
  c.set("count", "3");
  c.set("J", "5");
  CHECK(run_experiment(c).all_contracts_pass());
}

TEST_CASE("parallel map keeps order") {
  const auto v = parallel_map<std::size_t>(100, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(v[i] == i * i);
  CHECK_THROWS(parallel_map<int>(4, [](std::size_t i) -> int {
    if (i == 2) throw std::runtime_error("boom");
    return 0;
  }));
}
