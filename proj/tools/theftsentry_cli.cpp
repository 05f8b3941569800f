// Copyright 2026 The TheftSentry Authors
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


// theftsentry command-line tool. Builds a JSON run configuration from
// --config plus flag overrides and hands it to the library.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "theftsentry/theftsentry.h"

namespace {

using json = nlohmann::json;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  bool quiet = false;
};

struct Overrides {
  std::vector<std::string> methods;
  std::optional<std::string> kernel;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> map_n;
  std::vector<std::string> types;
  std::optional<std::string> consumers;
  std::optional<std::string> observer;
  std::optional<std::string> ground_truth;
  std::optional<std::string> scenario;
  std::optional<std::string> ranking;
  std::optional<std::string> fdi_mix;
};

constexpr int kConfigExit = TS_ERR_CONFIG;

int report(ts_status status) {
  if (status != TS_OK) std::cerr << "theftsentry: " << ts_last_error() << '\n';
  return static_cast<int>(status);
}

void log_to_stderr(const char* message, void* user) {
  if (!*static_cast<bool*>(user)) std::cerr << message << '\n';
}

// Reads the config file (if any) and applies flag overrides on top.
std::string build_config(const std::string& command, const Common& common, const Overrides& o) {
  json config = json::object();
  if (!common.config_path.empty()) {
    std::ifstream in(common.config_path);
    if (!in) throw std::runtime_error("cannot open config " + common.config_path);
    std::stringstream text;
    text << in.rdbuf();
    config = json::parse(text.str());
  }
  auto set = [&](const char* block, const char* key, const json& value) {
    config[block][key] = value;
  };

  if (common.out_dir) set("paths", "out_dir", *common.out_dir);
  if (o.consumers) set("paths", "consumers", *o.consumers);
  if (o.observer) set("paths", "observer", *o.observer);
  if (o.ground_truth) set("paths", "ground_truth", *o.ground_truth);
  if (o.scenario) set("paths", "scenario", *o.scenario);
  if (o.ranking) set("paths", "ranking", *o.ranking);
  if (o.fdi_mix) set("scenario", "fdi_mix", *o.fdi_mix);
  if (o.kernel) set("detect", "kernel", *o.kernel);
  if (o.trials) set("evaluate", "trials", *o.trials);
  if (o.map_n) set("evaluate", "map_n", *o.map_n);
  if (!o.types.empty()) set("evaluate", "types", o.types);
  if (!o.methods.empty()) {
    if (command == "experiment")
      set("evaluate", "methods", o.methods);
    else
      set("detect", "methods", o.methods);
  }
  if (common.seed) {
    if (command == "synth") set("generator", "seed", *common.seed);
    if (command == "tamper") set("scenario", "seed", *common.seed);
    if (command == "experiment") set("evaluate", "master_seed", *common.seed);
  }

  std::optional<unsigned> threads = common.threads;
  if (!threads) {
    if (const char* env = std::getenv("THEFTSENTRY_THREADS"); env && *env) {
      char* end = nullptr;
      const unsigned long value = std::strtoul(env, &end, 10);
      if (*end != '\0') throw std::runtime_error("THEFTSENTRY_THREADS must be a number");
      threads = static_cast<unsigned>(value);
    }
  }
  if (threads) config["threads"] = *threads;
  return config.dump();
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "Seed for this command's randomness");
  cmd->add_option("--out-dir", common.out_dir, "Output directory");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--quiet,-q", common.quiet, "Suppress progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Electricity theft detection from smart-meter and observer-meter data"};
  cli.set_version_flag("--version", std::string(ts_version()));
  cli.require_subcommand(1);

  Common common;
  Overrides o;

  auto* synth = cli.add_subcommand("synth", "Generate synthetic ground-truth load profiles");
  add_common(synth, common);

  auto* tamper = cli.add_subcommand("tamper", "Inject FDI attacks and write observer readings");
  add_common(tamper, common);
  tamper->add_option("--consumers", o.consumers, "Ground-truth consumer CSV (default: synthetic)");
  tamper->add_option("--fdi-mix", o.fdi_mix, "FDI1..FDI6 or MIX");

  auto* detect = cli.add_subcommand("detect", "Rank consumers by suspicion");
  add_common(detect, common);
  detect->add_option("--methods", o.methods, "mic, cfsfdp, pcc, arith, geo")->delimiter(',');
  detect->add_option("--kernel", o.kernel, "cutoff or gaussian");
  detect->add_option("--consumers", o.consumers, "Recorded consumer CSV");
  detect->add_option("--observer", o.observer, "Observer CSV, or \"derive\"");
  detect->add_option("--ground-truth", o.ground_truth, "Ground-truth CSV for \"derive\"");
  detect->add_option("--scenario", o.scenario, "scenario.json with area membership");
  detect->add_option("--ranking", o.ranking, "Output ranking CSV path");

  auto* evaluate = cli.add_subcommand("evaluate", "Score a ranking against known thieves");
  add_common(evaluate, common);
  evaluate->add_option("--ranking", o.ranking, "ranking.csv");
  evaluate->add_option("--scenario", o.scenario, "scenario.json");
  evaluate->add_option("--map-n", o.map_n, "N for MAP@N");

  auto* experiment = cli.add_subcommand("experiment", "Repeated-scenario benchmark");
  add_common(experiment, common);
  experiment->add_option("--methods", o.methods, "mic, cfsfdp, pcc, arith, geo")->delimiter(',');
  experiment->add_option("--kernel", o.kernel, "cutoff or gaussian");
  experiment->add_option("--trials", o.trials, "Scenarios per FDI type");
  experiment->add_option("--map-n", o.map_n, "N for MAP@N");
  experiment->add_option("--types", o.types, "FDI1..FDI6, MIX")->delimiter(',');

  std::string mic_path;
  double mic_alpha = 0.6;
  auto* mic = cli.add_subcommand("mic", "MIC and Pearson's r of a two-column CSV");
  mic->add_option("csv", mic_path, "Two-column CSV, optional header")->required();
  mic->add_option("--alpha", mic_alpha, "Grid size bound exponent")->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  ts_set_log_callback(log_to_stderr, &common.quiet);

  if (*mic) {
    double value = 0.0, r = 0.0;
    unsigned flags = 0;
    const ts_status status = ts_mic_csv(mic_path.c_str(), mic_alpha, &value, &r, &flags);
    if (status != TS_OK) return report(status);
    json out{{"mic", value}, {"pcc", r},
             {"degenerate", (flags & TS_MIC_DEGENERATE) != 0},
             {"small_sample", (flags & TS_MIC_SMALL_SAMPLE) != 0}};
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  const std::string command = cli.get_subcommands().front()->get_name();
  std::string config;
  try {
    config = build_config(command, common, o);
  } catch (const std::exception& e) {
    std::cerr << "theftsentry: config error: " << e.what() << '\n';
    return kConfigExit;
  }

  if (command == "synth") return report(ts_synth(config.c_str()));
  if (command == "tamper") return report(ts_tamper(config.c_str()));
  if (command == "detect") return report(ts_detect(config.c_str()));

  char* text = nullptr;
  const ts_status status = command == "evaluate" ? ts_evaluate(config.c_str(), &text)
                                                 : ts_experiment(config.c_str(), &text);
  if (status == TS_OK && text && command == "evaluate") std::cout << text;
  ts_free_string(text);
  return report(status);
}
