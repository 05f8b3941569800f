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


// Run configuration and the end-to-end workflows behind the command line.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "correlate.hpp"
#include "evaluate.hpp"
#include "fdi.hpp"
#include "meterdata.hpp"
#include "pipeline.hpp"

namespace theftsentry::app {

namespace fs = std::filesystem;

struct Paths {
  std::optional<fs::path> consumers;
  std::optional<std::string> observer;  // CSV path, or "derive" from ground truth
  std::optional<fs::path> ground_truth;
  std::optional<fs::path> scenario;
  std::optional<fs::path> ranking;
  fs::path out_dir = ".";
};

struct RunConfig {
  Paths paths;
  meterdata::SynthOptions generator;
  double noise_sigma = 0.0;
  fdi::ScenarioOptions scenario;
  pipeline::DetectOptions detect;
  std::size_t map_n = 20;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<std::string> types{"MIX"};
  std::vector<pipeline::Method> experiment_methods{
      pipeline::Method::mic, pipeline::Method::cfsfdp, pipeline::Method::arith,
      pipeline::Method::geo, pipeline::Method::pcc};
  unsigned threads = 0;  // 0: all hardware threads
};

/// Blocks: paths, generator, scenario, detect, evaluate, plus "threads".
/// Unknown keys and ill-typed values are configuration errors.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const fs::path& path);

using Log = std::function<void(const std::string&)>;

struct Outputs {
  std::vector<fs::path> files;
  std::string summary;  // JSON text for evaluate and mic, else empty
};

/// consumers.csv with synthetic ground truth.
Outputs cmd_synth(const RunConfig& config, const Log& log = {});

/// Tampers ground truth (paths.consumers, or synthetic) and writes
/// consumers.csv (recorded), ground_truth.csv, observer_<area>.csv per area
/// and scenario.json.
Outputs cmd_tamper(const RunConfig& config, const Log& log = {});

/// Loads the areas a detection runs on. Membership comes from paths.scenario
/// when given, otherwise every consumer forms one area. Observer readings come
/// from the scenario's observer files, from paths.observer, or are derived
/// from paths.ground_truth when paths.observer is "derive".
std::vector<meterdata::AreaDataset> load_areas(const RunConfig& config, const Log& log = {});

/// ranking.csv (or paths.ranking) in out_dir.
Outputs cmd_detect(const RunConfig& config, const Log& log = {});

/// AUC and MAP@N of every rank column in paths.ranking against the fraud ids
/// of paths.scenario. Writes metrics.json.
Outputs cmd_evaluate(const RunConfig& config, const Log& log = {});

/// report.json, report.csv, curves.csv and timing.csv.
Outputs cmd_experiment(const RunConfig& config, const Log& log = {});

/// MIC and Pearson's r of a two-column CSV (optional header).
correlate::MicResult mic_from_csv(const fs::path& path, const correlate::MicOptions& options,
                                  correlate::PccResult* pcc = nullptr);

}  // namespace theftsentry::app
