/*
 * Copyright 2026 The bayesinv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Command-line front end: bayesinv_cli <command> [--seed S] [--out DIR]
// [--config FILE] [--<key> VALUE ...].

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "experiments.hpp"

namespace {

struct Bound {
  CLI::App* app = nullptr;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  CLI::Option* seed_opt = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace bayesinv;
  CLI::App app{"bayesinv: Bayesian linear inverse problems, GP regression and calibration experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::map<std::string, Bound> bound;
  for (const auto& spec : cli::command_specs()) {
    Bound& b = bound[spec.name];
    b.app = app.add_subcommand(spec.name, spec.help);
    b.seed_opt = b.app->add_option("--seed", b.seed, "master random seed")->capture_default_str();
    b.app->add_option("--out", b.out, "output directory")->capture_default_str();
    b.app->add_option("--config", b.config, "JSON file with parameter values");
    for (const auto& [key, def] : spec.defaults) {
      std::string help = "default: " + (def.empty() ? std::string("<empty>") : def);
      auto doc = spec.docs.find(key);
      if (doc != spec.docs.end()) help = doc->second + "; " + help;
      b.options[key] = b.app->add_option("--" + key, b.values[key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto& [name, b] : bound) {
    if (!b.app->parsed()) continue;
    try {
      cli::Params flags;
      for (const auto& [key, opt] : b.options)
        if (opt->count() > 0) flags[key] = b.values[key];
      cli::FileConfig file;
      if (!b.config.empty()) file = cli::load_config_file(b.config);
      std::uint64_t seed = b.seed;
      if (b.seed_opt->count() == 0 && file.seed) seed = *file.seed;
      const cli::ExperimentConfig cfg = cli::merge_config(name, seed, b.out, file.params, flags);
      return cli::execute(cfg);
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const IoError& e) {
      std::cerr << "I/O error: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
