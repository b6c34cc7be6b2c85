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
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "qvar/dyadic_martingale.hpp"
#include "qvar/harness.hpp"

namespace {

const std::map<std::string, std::vector<std::string>> kFamilies = {
    {"variation", {"variation-oracle", "jump-oracle"}},
    {"martingale", {"martingale-cotype"}},
    {"diffavg", {"master-decomposition", "lv-probe", "weak11", "bmo", "vq-boundedness"}},
    {"cz", {"cz-properties"}},
    {"ergodic",
     {"ergodic-identity", "fractional-averages", "lambda-j", "elementary-constants", "littlewood-paley",
      "ergodic-variation"}},
    {"semigroup", {"semigroup-axioms", "semigroup-variation", "jump-estimate", "poisson-summation", "lacunary"}},
    {"cotype", {"cotype-necessity"}},
};

struct Options {
  std::string experiment;
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::string format;
  std::vector<std::string> overrides;
  std::string fixture;
  double lambda = 0.0;
  double q0 = 2.0;
};

qvar::ExperimentConfig build_config(const Options& o) {
  qvar::ExperimentConfig cfg = o.config.empty() ? qvar::ExperimentConfig{} : qvar::ExperimentConfig::from_file(o.config);
  if (!o.experiment.empty()) cfg.experiment = o.experiment;
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.format.empty()) cfg.format = o.format;
  for (const auto& kv : o.overrides) cfg.apply_override(kv);
  return cfg;
}

int run(const qvar::ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const qvar::ExperimentReport rep = qvar::run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.out.empty()) {
    if (cfg.format == "json") {
      qvar::write_json(std::cout, rep);
    } else {
      qvar::write_csv(std::cout, rep);
    }
  }
  std::cerr << rep.experiment << ": " << rep.count("pass") << " pass, " << rep.count("fail") << " fail, "
            << rep.count("record") << " record, " << secs << " s\n";
  return rep.all_contracts_pass() ? 0 : 1;
}

int cz_fixture(const Options& o) {
  const qvar::GridFn f = qvar::load_gridfn(o.fixture);
  const double lambda = o.lambda > 0.0 ? o.lambda : f.mean_norm_pow(1.0);
  const qvar::CZParts parts = qvar::cz_decompose(f, lambda);
  const qvar::CZCheck check = qvar::check_cz(f, parts);
  std::cout << "lambda " << lambda << "\ncubes " << parts.cubes.size() << '\n';
  for (const auto& c : parts.cubes) {
    std::cout << "  level " << c.level << " corner";
    for (auto x : c.corner) std::cout << ' ' << x;
    std::cout << '\n';
  }
  std::cout << "properties " << (check.all() ? "hold" : "violated") << '\n';
  return check.all() ? 0 : 1;
}

int martingale_fixture(const Options& o) {
  const qvar::GridFn f = qvar::load_gridfn(o.fixture);
  const qvar::CotypeTerms t = qvar::cotype_functional(f, o.q0);
  std::cout << "lhs " << qvar::fmt(t.lhs) << "\nrhs " << qvar::fmt(t.rhs) << "\nratio " << qvar::fmt(t.lhs / t.rhs)
            << '\n';
  return 0;
}

void add_common(CLI::App* sub, Options& o, const std::vector<std::string>& allowed) {
  auto* e = sub->add_option("--experiment", o.experiment, "experiment name");
  if (!allowed.empty()) e->check(CLI::IsMember(allowed));
  sub->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
  sub->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "rng seed");
  sub->add_option("--out", o.out, "report path (written atomically)");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("overrides", o.overrides, "parameter overrides key=value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational inequality experiments"};
  app.set_version_flag("--version", std::string(qvar::kVersion));
  app.require_subcommand(1);
  Options o;
  std::map<CLI::App*, std::string> family_of;
  for (const auto& [family, names] : kFamilies) {
    CLI::App* sub = app.add_subcommand(family, "run a " + family + " experiment");
    add_common(sub, o, names);
    family_of[sub] = family;
    if (family == "cz" || family == "martingale") {
      sub->add_option("--fixture", o.fixture, "grid function file")->check(CLI::ExistingFile);
    }
    if (family == "cz") sub->add_option("--lambda", o.lambda, "stopping height");
    if (family == "martingale") sub->add_option("--q0", o.q0, "cotype exponent");
  }
  CLI::App* report = app.add_subcommand("report", "run any experiment, or list them");
  add_common(report, o, {});
  bool list = false;
  report->add_flag("--list", list, "print experiment names");

  CLI11_PARSE(app, argc, argv);
  try {
    for (auto& [sub, family] : family_of) {
      if (!sub->parsed()) continue;
      if (!o.fixture.empty()) return family == "cz" ? cz_fixture(o) : martingale_fixture(o);
      qvar::ExperimentConfig cfg = build_config(o);
      if (cfg.experiment.empty()) cfg.experiment = kFamilies.at(family).front();
      const auto& names = kFamilies.at(family);
      if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
        std::cerr << "experiment " << cfg.experiment << " does not belong to " << family << '\n';
        return 2;
      }
      return run(cfg);
    }
    if (list) {
      for (const auto& n : qvar::experiment_names()) std::cout << n << '\n';
      return 0;
    }
    const qvar::ExperimentConfig cfg = build_config(o);
    if (cfg.experiment.empty()) {
      std::cerr << "report: --experiment or --list required\n";
      return 2;
    }
    return run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
