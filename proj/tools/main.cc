// Copyright 2026 The dpgemb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpgemb: differentially private graph embedding pipeline.
//
//   dpgemb prep    --input graph.txt --out run/
//   dpgemb train   --input graph.txt --out run/ --mode nonzero --eps 3.5
//   dpgemb eval    --task strucequ --metrics metrics.csv run/
//   dpgemb account --sigma 5 --S 2 --gamma 0.01 --epochs 200 --delta 1e-5
//   dpgemb sweep   --input graph.txt --out sweep/ --eps_grid 0.5,3.5

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pipeline.h"

namespace {

using dpgemb::KeyValues;

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
};

// Registers --config plus one string flag per configuration key. Only flags
// that are given on the command line reach the resolved configuration.
void AddConfigFlags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Key-value configuration file")
      ->check(CLI::ExistingFile);
  for (const std::string& key : dpgemb::cli::ConfigKeys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; },
        "Override config key '" + key + "'");
  }
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 1;
}

absl::StatusOr<dpgemb::cli::RunConfig> Resolve(const ConfigFlags& flags) {
  KeyValues given(flags.values.begin(), flags.values.end());
  auto resolved = dpgemb::cli::ResolveConfig(flags.config_path, given);
  if (!resolved.ok()) return resolved.status();
  return dpgemb::cli::ParseRunConfig(*resolved);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private graph embedding with structure preference"};
  app.set_version_flag("--version", dpgemb::cli::Version());
  app.require_subcommand(1);

  ConfigFlags prep_flags, train_flags, eval_flags, sweep_flags;
  CLI::App* prep = app.add_subcommand("prep", "Compute proximity and subgraph caches");
  AddConfigFlags(prep, prep_flags);
  CLI::App* train = app.add_subcommand("train", "Train one embedding and write its manifest");
  AddConfigFlags(train, train_flags);
  CLI::App* eval = app.add_subcommand("eval", "Evaluate trained runs into the metrics CSV");
  AddConfigFlags(eval, eval_flags);
  std::vector<std::string> run_dirs;
  eval->add_option("runs", run_dirs, "Run directories holding a manifest")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "Train and evaluate an epsilon x mode x seed grid");
  AddConfigFlags(sweep, sweep_flags);

  dpgemb::cli::AccountArgs account_args;
  CLI::App* account = app.add_subcommand("account", "Privacy spent by a training schedule");
  account->add_option("--sigma", account_args.sigma, "Noise multiplier")->capture_default_str();
  account->add_option("--S,--sensitivity", account_args.sensitivity, "Gradient sensitivity")
      ->capture_default_str();
  account->add_option("--gamma", account_args.gamma, "Sampling ratio B / #subgraphs")
      ->capture_default_str();
  account->add_option("--epochs", account_args.epochs, "Epochs composed")->capture_default_str();
  account->add_option("--delta", account_args.delta, "Target delta")->capture_default_str();
  account->add_option("--releases_per_epoch", account_args.releases_per_epoch,
                      "Subsampled releases composed per epoch")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (account->parsed()) {
    absl::Status st = dpgemb::cli::CmdAccount(account_args, std::cout);
    return st.ok() ? 0 : Fail(st);
  }
  const ConfigFlags& flags = prep->parsed()    ? prep_flags
                             : train->parsed() ? train_flags
                             : eval->parsed()  ? eval_flags
                                               : sweep_flags;
  auto config = Resolve(flags);
  if (!config.ok()) return Fail(config.status());
  absl::Status st;
  if (prep->parsed()) {
    st = dpgemb::cli::CmdPrep(*config, std::cout);
  } else if (train->parsed()) {
    st = dpgemb::cli::CmdTrain(*config, std::cout).status();
  } else if (eval->parsed()) {
    st = dpgemb::cli::CmdEval(*config, run_dirs, std::cout);
  } else {
    st = dpgemb::cli::CmdSweep(*config, std::cout);
  }
  return st.ok() ? 0 : Fail(st);
}
