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


// Ranking metrics and the repeated-scenario experiment harness.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fdi.hpp"
#include "meterdata.hpp"
#include "pipeline.hpp"

namespace theftsentry::evaluate {

using pipeline::Method;

/// Ranks (higher = more suspicious) with a fraud flag per consumer.
struct LabeledRanking {
  std::vector<double> rank;
  std::vector<std::uint8_t> fraud;

  std::size_t fraud_count() const noexcept;
};

/// Throws a shape error when the lengths differ.
LabeledRanking label(std::span<const double> ranks, std::span<const std::uint8_t> fraud);
LabeledRanking label(const pipeline::SuspicionRanking& ranking,
                     const std::unordered_set<std::string>& fraud_ids);
LabeledRanking label(std::span<const std::string> consumer_ids, std::span<const double> ranks,
                     const std::unordered_set<std::string>& fraud_ids);

/// (sum of fraud ranks - |F|(|F|+1)/2) / (|F| |B|). Throws a metric error when
/// either class is empty.
double auc(const LabeledRanking& ranking);

/// Consumers ordered by rank, highest first (equal ranks by index). With the
/// thieves among the first N at positions k_1 < ... < k_r, returns
/// (1/r) sum_i i / k_i, or 0 when r = 0.
double map_at_n(const LabeledRanking& ranking, std::size_t n);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // population
};

Summary summarize(std::span<const double> values);

struct ExperimentConfig {
  meterdata::SynthOptions generator;
  fdi::ScenarioOptions scenario;          // seed and mix are set per trial and type
  std::vector<std::string> types{"MIX"};  // FDI1..FDI6 or MIX
  std::vector<Method> methods{Method::mic, Method::cfsfdp, Method::arith, Method::geo,
                              Method::pcc};
  pipeline::DetectOptions detect;         // methods are taken from `methods`
  std::size_t trials = 100;
  std::size_t map_n = 20;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  std::function<void(const std::string&)> progress;
};

struct MethodSummary {
  Method method = Method::mic;
  Summary auc;
  Summary map;
  std::size_t trials = 0;
  double seconds = 0.0;  // mean wall clock per detection
};

struct TypeRow {
  std::string type;
  std::vector<MethodSummary> methods;  // in configured order
};

struct TrialResult {
  std::string type;
  std::size_t trial = 0;
  Method method = Method::mic;
  double auc = 0.0;
  double map = 0.0;
  double seconds = 0.0;
};

struct ExperimentReport {
  std::size_t trials = 0;
  std::size_t map_n = 20;
  std::uint64_t master_seed = 0;
  std::vector<Method> methods;
  std::vector<TypeRow> rows;
  std::vector<TrialResult> curves;  // ordered by (type, trial, method)

  const MethodSummary& at(std::string_view type, Method method) const;
};

/// Ground truth is generated once from the generator seed. Trial t draws its
/// scenario from mix_seed(master_seed, t); every type reuses that seed, so the
/// types differ only in the tampering applied.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Deterministic outputs. Wall-clock figures only go to timing_csv.
std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
std::string curves_csv(const ExperimentReport& report);
std::string timing_csv(const ExperimentReport& report);

/// report.json, report.csv, curves.csv and timing.csv in `dir`.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

}  // namespace theftsentry::evaluate
