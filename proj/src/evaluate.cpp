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


#include "evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <mutex>
#include <numeric>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace theftsentry::evaluate {

std::size_t LabeledRanking::fraud_count() const noexcept {
  return static_cast<std::size_t>(std::count(fraud.begin(), fraud.end(), std::uint8_t{1}));
}

LabeledRanking label(std::span<const double> ranks, std::span<const std::uint8_t> fraud) {
  require(ranks.size() == fraud.size(), ErrorKind::shape,
          "ranking has " + std::to_string(ranks.size()) + " entries but " +
              std::to_string(fraud.size()) + " labels");
  LabeledRanking out;
  out.rank.assign(ranks.begin(), ranks.end());
  out.fraud.reserve(fraud.size());
  for (auto f : fraud) out.fraud.push_back(f ? 1 : 0);
  return out;
}

LabeledRanking label(std::span<const std::string> consumer_ids, std::span<const double> ranks,
                     const std::unordered_set<std::string>& fraud_ids) {
  std::vector<std::uint8_t> flags(consumer_ids.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < consumer_ids.size(); ++i) {
    flags[i] = fraud_ids.count(consumer_ids[i]) ? 1 : 0;
    found += flags[i];
  }
  require(found == fraud_ids.size(), ErrorKind::metric,
          std::to_string(fraud_ids.size() - found) + " fraud ids are not in the ranking");
  return label(ranks, flags);
}

LabeledRanking label(const pipeline::SuspicionRanking& ranking,
                     const std::unordered_set<std::string>& fraud_ids) {
  return label(ranking.consumer_ids, ranking.rank, fraud_ids);
}

double auc(const LabeledRanking& ranking) {
  const std::size_t n = ranking.rank.size();
  const std::size_t f = ranking.fraud_count();
  require(f > 0, ErrorKind::metric, "AUC needs at least one fraudulent consumer");
  require(f < n, ErrorKind::metric, "AUC needs at least one benign consumer");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (ranking.fraud[i]) sum += ranking.rank[i];
  const double ff = static_cast<double>(f);
  const double bb = static_cast<double>(n - f);
  return (sum - 0.5 * ff * (ff + 1.0)) / (ff * bb);
}

double map_at_n(const LabeledRanking& ranking, std::size_t n) {
  require(n >= 1, ErrorKind::parameter, "MAP@N needs N >= 1");
  std::vector<std::size_t> order(ranking.rank.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranking.rank[a] > ranking.rank[b];
  });
  const std::size_t top = std::min(n, order.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < top; ++k) {
    if (!ranking.fraud[order[k]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / n);
  return s;
}

const MethodSummary& ExperimentReport::at(std::string_view type, Method method) const {
  for (const auto& row : rows)
    if (row.type == type)
      for (const auto& m : row.methods)
        if (m.method == method) return m;
  fail(ErrorKind::parameter, "report has no entry for " + std::string(type) + "/" +
                                 std::string(pipeline::to_string(method)));
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  require(config.trials >= 1, ErrorKind::config, "trials must be >= 1");
  require(config.map_n >= 1, ErrorKind::config, "map_n must be >= 1");
  require(!config.types.empty(), ErrorKind::config, "no FDI type selected");
  require(!config.methods.empty(), ErrorKind::config, "no detection method selected");

  std::vector<fdi::FdiMix> mixes;
  std::vector<std::string> type_labels;
  for (const auto& type : config.types) {
    mixes.push_back(fdi::FdiMix::from_label(type));
    type_labels.push_back(mixes.back().label());
  }

  const auto truth = meterdata::synth_ground_truth(config.generator);

  const std::size_t jobs = mixes.size() * config.trials;
  std::vector<std::vector<TrialResult>> results(jobs);
  const unsigned threads = resolve_threads(config.threads);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  parallel_for(jobs, threads, 1, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t job = begin; job < end; ++job) {
      const std::size_t t = job / config.trials;
      const std::size_t trial = job % config.trials;
      try {
        fdi::ScenarioOptions scenario = config.scenario;
        scenario.mix = mixes[t];
        scenario.seed = mix_seed(config.master_seed, trial);
        const auto built = fdi::build_scenario(truth, scenario);
        const auto fraud_list = built.scenario.fraud_ids();
        const std::unordered_set<std::string> fraud(fraud_list.begin(), fraud_list.end());

        pipeline::DetectOptions detect = config.detect;
        detect.methods = config.methods;
        detect.threads = 1;
        detect.density.cutoff.seed = mix_seed(scenario.seed, "cutoff");
        const auto detection = pipeline::detect(built.areas, detect);

        for (Method m : config.methods) {
          const auto* ranking = detection.ranking(m);
          if (!ranking) fail(ErrorKind::internal, "method did not produce a ranking");
          const auto labeled = label(*ranking, fraud);
          const auto secs = detection.seconds.find(m);
          results[job].push_back(TrialResult{type_labels[t], trial, m, auc(labeled),
                                             map_at_n(labeled, config.map_n),
                                             secs == detection.seconds.end() ? 0.0 : secs->second});
        }
      } catch (const Error& e) {
        fail(e.kind(), "trial " + std::to_string(trial) + " (" + type_labels[t] + "): " + e.what());
      }
      const std::size_t finished = ++done;
      if (config.progress) {
        std::lock_guard lock(progress_mutex);
        config.progress(std::to_string(finished) + "/" + std::to_string(jobs) + " trials done");
      }
    }
  });

  ExperimentReport report;
  report.trials = config.trials;
  report.map_n = config.map_n;
  report.master_seed = config.master_seed;
  report.methods = config.methods;
  for (std::size_t t = 0; t < mixes.size(); ++t) {
    TypeRow row;
    row.type = type_labels[t];
    for (std::size_t k = 0; k < config.methods.size(); ++k) {
      std::vector<double> aucs, maps;
      double seconds = 0.0;
      for (std::size_t trial = 0; trial < config.trials; ++trial) {
        const auto& r = results[t * config.trials + trial][k];
        aucs.push_back(r.auc);
        maps.push_back(r.map);
        seconds += r.seconds;
      }
      MethodSummary s;
      s.method = config.methods[k];
      s.auc = summarize(aucs);
      s.map = summarize(maps);
      s.trials = config.trials;
      s.seconds = seconds / static_cast<double>(config.trials);
      row.methods.push_back(s);
    }
    report.rows.push_back(std::move(row));
  }
  for (auto& job : results)
    for (auto& r : job) report.curves.push_back(std::move(r));
  return report;
}

namespace {

std::string map_label(std::size_t n) { return "map@" + std::to_string(n); }

}  // namespace

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["trials"] = report.trials;
  j["map_n"] = report.map_n;
  j["master_seed"] = report.master_seed;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (Method m : report.methods) methods.push_back(pipeline::to_string(m));
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["type"] = row.type;
    for (const auto& m : row.methods) {
      auto& entry = r["methods"][std::string(pipeline::to_string(m.method))];
      entry["auc_mean"] = m.auc.mean;
      entry["auc_sd"] = m.auc.sd;
      entry["map_mean"] = m.map.mean;
      entry["map_sd"] = m.map.sd;
      entry["trials"] = m.trials;
    }
    rows.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& report) {
  using meterdata::format_number;
  std::string out = "type";
  const std::string map = map_label(report.map_n);
  for (Method m : report.methods) {
    const std::string name(pipeline::to_string(m));
    out += "," + name + "_auc," + name + "_auc_sd," + name + "_" + map + "," + name + "_" + map +
           "_sd";
  }
  out += '\n';
  for (const auto& row : report.rows) {
    out += row.type;
    for (const auto& m : row.methods)
      out += ',' + format_number(m.auc.mean) + ',' + format_number(m.auc.sd) + ',' +
             format_number(m.map.mean) + ',' + format_number(m.map.sd);
    out += '\n';
  }
  return out;
}

std::string curves_csv(const ExperimentReport& report) {
  using meterdata::format_number;
  std::string out = "type,trial,method,auc," + map_label(report.map_n) + "\n";
  for (const auto& r : report.curves)
    out += r.type + ',' + std::to_string(r.trial) + ',' + std::string(pipeline::to_string(r.method)) +
           ',' + format_number(r.auc) + ',' + format_number(r.map) + '\n';
  return out;
}

std::string timing_csv(const ExperimentReport& report) {
  using meterdata::format_number;
  std::string out = "type,method,mean_seconds\n";
  for (const auto& row : report.rows)
    for (const auto& m : row.methods)
      out += row.type + ',' + std::string(pipeline::to_string(m.method)) + ',' +
             format_number(m.seconds) + '\n';
  return out;
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  csv::write_file(dir / "report.json", report_json(report));
  csv::write_file(dir / "report.csv", report_csv(report));
  csv::write_file(dir / "curves.csv", curves_csv(report));
  csv::write_file(dir / "timing.csv", timing_csv(report));
}

}  // namespace theftsentry::evaluate
