// Copyright 2026 The symaug Authors
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

// symaug: gen | detect | train | eval | verify
//
// Settings resolve as built-in defaults, then --profile, then the --config
// JSON file, then individual flags.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symaug/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::string profile = "desk";
  std::uint64_t seed = 0;
  std::string out;
  int epochs = 0;
  int runs = 0;
  int count = 0;
  int batch_size = 0;
  int samples = 0;
  double lr = 0.0;
  std::vector<std::string> schemes;
};

struct Options {
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* count = nullptr;
  CLI::Option* batch_size = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* schemes = nullptr;
};

Options add_common(CLI::App* cmd, Flags& f) {
  Options o;
  cmd->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--profile", f.profile, "desk (default) or smoke")
      ->check(CLI::IsMember({"desk", "smoke"}));
  o.seed = cmd->add_option("--seed", f.seed, "root seed");
  o.out = cmd->add_option("--out", f.out, "output directory");
  o.count = cmd->add_option("--count", f.count, "instances to generate")->check(CLI::NonNegativeNumber);
  o.epochs = cmd->add_option("--epochs", f.epochs, "training epochs")->check(CLI::NonNegativeNumber);
  o.runs = cmd->add_option("--runs", f.runs, "training seeds per scheme")->check(CLI::PositiveNumber);
  o.batch_size = cmd->add_option("--batch-size", f.batch_size)->check(CLI::PositiveNumber);
  o.samples = cmd->add_option("--samples", f.samples, "z draws per training instance")
                  ->check(CLI::PositiveNumber);
  o.lr = cmd->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::NonNegativeNumber);
  o.schemes = cmd->add_option("--schemes", f.schemes, "noaug uniform position orbit orbitplus")
                  ->delimiter(',');
  return o;
}

symaug::ExperimentConfig resolve(const Flags& f, const Options& o) {
  symaug::ExperimentConfig cfg = symaug::apply_profile({}, f.profile);
  if (!f.config.empty()) {
    cfg = symaug::experiment_config_from_json(symaug::read_json(f.config), cfg);
  }
  if (o.seed->count() > 0) cfg.seed = f.seed;
  if (o.out->count() > 0) cfg.out = f.out;
  if (o.count->count() > 0) cfg.bpp.count = f.count;
  if (o.epochs->count() > 0) cfg.epochs = f.epochs;
  if (o.runs->count() > 0) cfg.runs = f.runs;
  if (o.batch_size->count() > 0) cfg.batch_size = f.batch_size;
  if (o.samples->count() > 0) cfg.samples_per_instance = f.samples;
  if (o.lr->count() > 0) cfg.lr = f.lr;
  if (o.schemes->count() > 0) {
    cfg.schemes.clear();
    for (const auto& s : f.schemes) cfg.schemes.push_back(symaug::scheme_from_string(s));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-aware solution prediction for integer linear programs"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const symaug::ExperimentConfig&, std::ostream&);
  };
  const std::vector<Command> commands = {
      {"gen", "generate and solve bin-packing instances", symaug::cmd_gen},
      {"detect", "detect formulation symmetry for every instance", symaug::cmd_detect},
      {"train", "train one model per scheme and seed", symaug::cmd_train},
      {"eval", "evaluate checkpoints, write metrics.csv and table.md", symaug::cmd_eval},
      {"verify", "run the property suite on the dataset", symaug::cmd_verify},
  };
  std::vector<Flags> flags(commands.size());
  std::vector<Options> opts(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    subs.push_back(app.add_subcommand(commands[k].name, commands[k].help));
    opts[k] = add_common(subs[k], flags[k]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? symaug::kExitOk : symaug::kExitUsage;
  }

  for (std::size_t k = 0; k < commands.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    symaug::ExperimentConfig cfg;
    try {
      cfg = resolve(flags[k], opts[k]);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return symaug::kExitUsage;
    }
    try {
      return commands[k].run(cfg, std::cout);
    } catch (const symaug::InvariantViolation& e) {
      std::cerr << "invariant violation: " << e.what() << "\n";
      return symaug::kExitInvariant;
    } catch (const symaug::ParseError& e) {
      std::cerr << "invalid artifact: " << e.what() << "\n";
      return symaug::kExitInvariant;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return symaug::kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return symaug::kExitUsage;
    }
  }
  return symaug::kExitUsage;
}
