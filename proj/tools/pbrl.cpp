// Copyright 2026 The pbrl Authors. All rights reserved.
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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pbrl/diagnostics.hpp"
#include "pbrl/error.hpp"
#include "pbrl/harness.hpp"

namespace {

int report(const std::vector<pbrl::CellResult>& results, const std::string& out) {
  int failed = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::cout << r.algo << " seed " << r.seed << ": final regret "
                << r.summary.final_regret << ", exponent " << r.summary.exponent_p
                << "\n";
    } else {
      ++failed;
      std::cerr << r.algo << " seed " << r.seed << ": aborted: " << r.error << "\n";
    }
  }
  std::cout << "wrote " << out << "/summary.csv\n";
  return failed == 0 ? 0 : 2;
}

pbrl::FiniteFunctionClass load_class(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pbrl::InvalidArgument("cannot read " + path);
  return pbrl::FiniteFunctionClass::from_json(nlohmann::json::parse(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-based RL experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, class_path, manifest_path;
  std::uint64_t seed = 0;
  int seeds = 1;
  double alpha = 0.0, eps = 0.0;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Run only this seed");
  run->add_option("--out", out_dir, "Output directory");

  auto* sw = app.add_subcommand("sweep", "Run a config over several seeds");
  sw->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sw->add_option("--seeds", seeds, "Number of seeds")->required()->check(CLI::PositiveNumber);
  sw->add_option("--out", out_dir, "Output directory")->required();

  auto* diag = app.add_subcommand("diag", "Complexity diagnostics for finite classes");
  diag->require_subcommand(1);
  auto* eluder = diag->add_subcommand("eluder", "Eluder dimension");
  eluder->add_option("--class", class_path, "Function class (JSON)")->required();
  eluder->add_option("--alpha", alpha, "Scale alpha")->required();
  auto* cover = diag->add_subcommand("cover", "Covering number");
  cover->add_option("--class", class_path, "Function class (JSON)")->required();
  cover->add_option("--eps", eps, "Radius eps")->required();

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
  replay->add_option("--manifest", manifest_path, "manifest.json of a run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sw->parsed()) {
      pbrl::ExperimentConfig cfg = pbrl::ExperimentConfig::from_file(config_path);
      if (run->parsed() && seed_opt->count() > 0) cfg.seeds = {seed};
      if (sw->parsed()) {
        const std::uint64_t base = cfg.seeds.front();
        cfg.seeds.clear();
        for (int i = 0; i < seeds; ++i) cfg.seeds.push_back(base + i);
      }
      const std::string out = out_dir.empty() ? cfg.out : out_dir;
      return report(pbrl::sweep(cfg, out), out);
    }
    if (eluder->parsed()) {
      std::cout << pbrl::eluder_dimension(load_class(class_path), alpha) << "\n";
      return 0;
    }
    if (cover->parsed()) {
      const auto r = pbrl::covering_number(load_class(class_path), eps);
      std::cout << nlohmann::json{{"value", r.value}, {"greedy", r.greedy}, {"exact", r.exact}}
                       .dump()
                << "\n";
      return 0;
    }
    if (replay->parsed()) {
      std::string detail;
      const bool same = pbrl::replay_matches(manifest_path, &detail);
      std::cout << detail << "\n";
      return same ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
