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


#include "app.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace theftsentry::app {
namespace {

using json = nlohmann::json;

void check_keys(const json& block, std::string_view where, std::initializer_list<std::string_view> allowed) {
  require(block.is_object(), ErrorKind::config, std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : block.items()) {
    const bool known = std::find(allowed.begin(), allowed.end(), key) != allowed.end();
    require(known, ErrorKind::config, "unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& block, const char* key, T& target) {
  if (block.contains(key) && !block[key].is_null()) target = block[key].get<T>();
}

template <typename T>
void read(const json& block, const char* key, std::optional<T>& target) {
  if (block.contains(key) && !block[key].is_null()) target = block[key].get<T>();
}

fdi::FdiMix parse_mix(const json& value) {
  fdi::FdiMix mix;
  if (value.is_string()) return fdi::FdiMix::from_label(value.get<std::string>());
  if (value.is_array()) {
    require(value.size() == 6, ErrorKind::config, "fdi_mix needs 6 weights");
    for (std::size_t k = 0; k < 6; ++k) mix.weights[k] = value[k].get<double>();
  } else if (value.is_object()) {
    mix.weights.fill(0.0);
    for (const auto& [key, w] : value.items())
      mix.weights[static_cast<std::size_t>(fdi::parse_fdi_type(key)) - 1] = w.get<double>();
  } else {
    fail(ErrorKind::config, "fdi_mix must be a label, a weight array or an object");
  }
  mix.validate();
  return mix;
}

std::vector<pipeline::Method> parse_methods(const json& value) {
  std::vector<pipeline::Method> out;
  for (const auto& m : value) out.push_back(pipeline::parse_method(m.get<std::string>()));
  require(!out.empty(), ErrorKind::config, "method list is empty");
  return out;
}

densepeaks::Kernel parse_kernel(const std::string& text) {
  if (text == "cutoff") return densepeaks::Kernel::cutoff;
  if (text == "gaussian") return densepeaks::Kernel::gaussian;
  fail(ErrorKind::config, "unknown kernel '" + text + "' (expected cutoff or gaussian)");
}

void apply_paths(const json& block, Paths& paths) {
  check_keys(block, "paths",
             {"consumers", "observer", "ground_truth", "scenario", "ranking", "out_dir"});
  auto path = [&](const char* key, std::optional<fs::path>& target) {
    std::optional<std::string> text;
    read(block, key, text);
    if (text) target = fs::path(*text);
  };
  path("consumers", paths.consumers);
  read(block, "observer", paths.observer);
  path("ground_truth", paths.ground_truth);
  path("scenario", paths.scenario);
  path("ranking", paths.ranking);
  std::optional<std::string> out;
  read(block, "out_dir", out);
  if (out) paths.out_dir = *out;
}

void apply_detect(const json& block, RunConfig& config) {
  check_keys(block, "detect",
             {"methods", "kernel", "dc_fraction", "dc", "mic_alpha", "clump_factor", "combine",
              "zeta_scope"});
  auto& d = config.detect;
  if (block.contains("kernel")) d.density.kernel = parse_kernel(block["kernel"].get<std::string>());
  read(block, "dc_fraction", d.density.cutoff.target_fraction);
  read(block, "dc", d.density.dc);
  read(block, "mic_alpha", d.mic.alpha);
  read(block, "clump_factor", d.mic.clump_factor);
  require(d.density.cutoff.target_fraction > 0.0 && d.density.cutoff.target_fraction < 1.0,
          ErrorKind::config, "detect.dc_fraction must be in (0, 1)");
  require(!d.density.dc || *d.density.dc > 0.0, ErrorKind::config, "detect.dc must be > 0");
  require(d.mic.alpha > 0.0 && d.mic.alpha <= 1.0, ErrorKind::config,
          "detect.mic_alpha must be in (0, 1]");
  require(d.mic.clump_factor >= 1, ErrorKind::config, "detect.clump_factor must be >= 1");
  if (block.contains("zeta_scope")) {
    const auto scope = block["zeta_scope"].get<std::string>();
    if (scope == "global")
      config.detect.zeta_scope = pipeline::ZetaScope::global;
    else if (scope == "per_area")
      config.detect.zeta_scope = pipeline::ZetaScope::per_area;
    else
      fail(ErrorKind::config, "detect.zeta_scope must be global or per_area");
  }
  if (block.contains("combine")) {
    const auto combine = block["combine"].get<std::string>();
    using pipeline::Method;
    std::vector<Method> methods{Method::mic, Method::cfsfdp};
    if (combine == "arith" || combine == "both") methods.push_back(Method::arith);
    if (combine == "geo" || combine == "both") methods.push_back(Method::geo);
    require(methods.size() > 2, ErrorKind::config, "detect.combine must be arith, geo or both");
    d.methods = methods;
  }
  if (block.contains("methods")) d.methods = parse_methods(block["methods"]);
}

void apply(const json& root, RunConfig& config) {
  check_keys(root, "config", {"paths", "generator", "scenario", "detect", "evaluate", "threads"});
  if (root.contains("paths")) apply_paths(root["paths"], config.paths);
  if (root.contains("generator")) {
    const auto& g = root["generator"];
    check_keys(g, "generator", {"n_consumers", "m_days", "intervals", "seed", "noise_sigma"});
    read(g, "n_consumers", config.generator.n_consumers);
    read(g, "m_days", config.generator.m_days);
    read(g, "intervals", config.generator.intervals);
    read(g, "seed", config.generator.seed);
    read(g, "noise_sigma", config.noise_sigma);
    require(config.noise_sigma >= 0.0, ErrorKind::config, "generator.noise_sigma must be >= 0");
  }
  if (root.contains("scenario")) {
    const auto& s = root["scenario"];
    check_keys(s, "scenario",
               {"areas", "thieves_per_area", "fdi_mix", "tampered_day_fraction", "seed"});
    read(s, "areas", config.scenario.n_areas);
    read(s, "thieves_per_area", config.scenario.thieves_per_area);
    read(s, "tampered_day_fraction", config.scenario.tampered_day_fraction);
    read(s, "seed", config.scenario.seed);
    if (s.contains("fdi_mix")) config.scenario.mix = parse_mix(s["fdi_mix"]);
  }
  if (root.contains("detect")) apply_detect(root["detect"], config);
  if (root.contains("evaluate")) {
    const auto& e = root["evaluate"];
    check_keys(e, "evaluate", {"map_n", "trials", "master_seed", "types", "methods"});
    read(e, "map_n", config.map_n);
    read(e, "trials", config.trials);
    read(e, "master_seed", config.master_seed);
    read(e, "types", config.types);
    if (e.contains("methods")) config.experiment_methods = parse_methods(e["methods"]);
    require(config.map_n >= 1, ErrorKind::config, "evaluate.map_n must be >= 1");
    require(config.trials >= 1, ErrorKind::config, "evaluate.trials must be >= 1");
  }
  read(root, "threads", config.threads);
}

std::string area_file_stem(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

void emit(const Log& log, const std::string& message) {
  if (log) log(message);
}

std::vector<meterdata::ConsumerSeries> load_ground_truth_source(const RunConfig& config,
                                                                const Log& log) {
  if (!config.paths.consumers) return meterdata::synth_ground_truth(config.generator);
  auto csv = meterdata::load_consumers_csv(*config.paths.consumers);
  for (const auto& w : csv.warnings) emit(log, w);
  require(!csv.consumers.empty(), ErrorKind::shape,
          config.paths.consumers->string() + " holds no consumers");
  for (auto& c : csv.consumers) c.ground_truth = c.days;
  return std::move(csv.consumers);
}

std::unordered_set<std::string> fraud_ids_from(const fs::path& scenario_path) {
  const auto scenario = fdi::scenario_from_json(csv::read_file(scenario_path));
  const auto ids = scenario.fraud_ids();
  return {ids.begin(), ids.end()};
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  RunConfig config;
  try {
    const json root = json::parse(json_text);
    apply(root, config);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return parse_config(text);
}

Outputs cmd_synth(const RunConfig& config, const Log& log) {
  const auto consumers = meterdata::synth_ground_truth(config.generator);
  ensure_dir(config.paths.out_dir);
  const fs::path out = config.paths.out_dir / "consumers.csv";
  meterdata::write_consumers_csv(out, consumers);
  emit(log, "wrote " + std::to_string(consumers.size()) + " consumers to " + out.string());
  return {{out}, {}};
}

Outputs cmd_tamper(const RunConfig& config, const Log& log) {
  const auto truth = load_ground_truth_source(config, log);
  fdi::ScenarioOptions options = config.scenario;
  options.noise_sigma = config.noise_sigma;
  const auto built = fdi::build_scenario(truth, options);

  ensure_dir(config.paths.out_dir);
  Outputs out;
  std::vector<meterdata::ConsumerSeries> recorded;
  for (const auto& area : built.areas)
    recorded.insert(recorded.end(), area.consumers.begin(), area.consumers.end());
  out.files.push_back(config.paths.out_dir / "consumers.csv");
  meterdata::write_consumers_csv(out.files.back(), recorded);
  out.files.push_back(config.paths.out_dir / "ground_truth.csv");
  meterdata::write_consumers_csv(out.files.back(), recorded, true);

  json scenario = json::parse(fdi::scenario_to_json(built.scenario));
  for (std::size_t a = 0; a < built.areas.size(); ++a) {
    const std::string file = "observer_" + area_file_stem(built.areas[a].name) + ".csv";
    meterdata::write_observer_csv(config.paths.out_dir / file, built.areas[a].observer);
    out.files.push_back(config.paths.out_dir / file);
    scenario["areas"][a]["observer"] = file;
  }
  out.files.push_back(config.paths.out_dir / "scenario.json");
  csv::write_file(out.files.back(), scenario.dump(2) + "\n");
  emit(log, "tampered " + std::to_string(built.scenario.fraud_ids().size()) + " consumers in " +
                std::to_string(built.areas.size()) + " areas");
  return out;
}

std::vector<meterdata::AreaDataset> load_areas(const RunConfig& config, const Log& log) {
  const auto& paths = config.paths;
  require(paths.consumers.has_value(), ErrorKind::config, "paths.consumers is required");
  auto csv = meterdata::load_consumers_csv(*paths.consumers);
  for (const auto& w : csv.warnings) emit(log, w);
  require(!csv.consumers.empty(), ErrorKind::shape,
          paths.consumers->string() + " holds no consumers");

  const bool derive = paths.observer && *paths.observer == "derive";
  if (derive) {
    require(paths.ground_truth.has_value(), ErrorKind::config,
            "observer \"derive\" needs paths.ground_truth");
    auto truth = meterdata::load_consumers_csv(*paths.ground_truth);
    std::unordered_map<std::string, std::vector<meterdata::DayProfile>> by_id;
    for (auto& c : truth.consumers) by_id.emplace(c.id, std::move(c.days));
    for (auto& c : csv.consumers) {
      auto it = by_id.find(c.id);
      require(it != by_id.end(), ErrorKind::shape, "no ground truth for consumer " + c.id);
      c.ground_truth = std::move(it->second);
      c.validate();
    }
  }

  struct Group {
    std::string name;
    std::vector<std::string> ids;
    std::optional<fs::path> observer;
  };
  std::vector<Group> groups;
  if (paths.scenario) {
    json scenario;
    try {
      scenario = json::parse(csv::read_file(*paths.scenario));
      for (const auto& area : scenario.at("areas")) {
        Group g{area.at("name").get<std::string>(),
                area.at("consumers").get<std::vector<std::string>>(), std::nullopt};
        if (area.contains("observer"))
          g.observer = paths.scenario->parent_path() / area["observer"].get<std::string>();
        groups.push_back(std::move(g));
      }
    } catch (const json::exception& e) {
      fail(ErrorKind::parse, paths.scenario->string() + ": " + e.what());
    }
  } else {
    Group g{"all", {}, std::nullopt};
    for (const auto& c : csv.consumers) g.ids.push_back(c.id);
    groups.push_back(std::move(g));
  }

  const bool single_observer = paths.observer && !derive;
  require(!single_observer || groups.size() == 1, ErrorKind::config,
          "paths.observer names one file but the scenario has " + std::to_string(groups.size()) +
              " areas");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < csv.consumers.size(); ++i) index.emplace(csv.consumers[i].id, i);
  std::vector<std::uint8_t> used(csv.consumers.size(), 0);

  std::vector<meterdata::AreaDataset> areas;
  for (auto& g : groups) {
    std::vector<meterdata::ConsumerSeries> members;
    for (const auto& id : g.ids) {
      auto it = index.find(id);
      require(it != index.end(), ErrorKind::shape,
              "area " + g.name + " lists consumer " + id + " which is not in the consumer CSV");
      require(!used[it->second], ErrorKind::shape, "consumer " + id + " is in two areas");
      used[it->second] = 1;
      members.push_back(csv.consumers[it->second]);
    }
    require(!members.empty(), ErrorKind::shape, "area " + g.name + " has no consumers");

    if (derive) {
      areas.push_back(meterdata::assemble_area(g.name, std::move(members)));
      continue;
    }
    std::optional<fs::path> observer_path = g.observer;
    if (single_observer) observer_path = fs::path(*paths.observer);
    require(observer_path.has_value(), ErrorKind::config,
            "no observer readings for area " + g.name +
                " (set paths.observer, or \"derive\" with paths.ground_truth)");
    auto observer = meterdata::load_observer_csv(*observer_path);
    require(observer.day_labels == csv.day_labels, ErrorKind::shape,
            observer_path->string() + " covers different days than the consumer CSV");
    meterdata::AreaDataset area{g.name, std::move(members), std::move(observer.days), {}};
    meterdata::compute_ntl(area);
    areas.push_back(std::move(area));
  }
  const auto unused = static_cast<std::size_t>(std::count(used.begin(), used.end(), 0));
  if (unused > 0)
    emit(log, std::to_string(unused) + " consumers are not in any area and were skipped");
  return areas;
}

Outputs cmd_detect(const RunConfig& config, const Log& log) {
  const auto areas = load_areas(config, log);
  pipeline::DetectOptions options = config.detect;
  options.threads = resolve_threads(config.threads);
  const auto detection = pipeline::detect(areas, options);
  ensure_dir(config.paths.out_dir);
  const fs::path out = config.paths.ranking ? *config.paths.ranking
                                            : config.paths.out_dir / "ranking.csv";
  pipeline::write_ranking_csv(out, detection);
  for (const auto& [method, seconds] : detection.seconds)
    emit(log, std::string(pipeline::to_string(method)) + ": " +
                  meterdata::format_number(seconds) + " s");
  return {{out}, {}};
}

Outputs cmd_evaluate(const RunConfig& config, const Log& log) {
  require(config.paths.ranking.has_value(), ErrorKind::config, "paths.ranking is required");
  require(config.paths.scenario.has_value(), ErrorKind::config, "paths.scenario is required");
  const auto table = pipeline::load_ranking_csv(*config.paths.ranking);
  const auto fraud = fraud_ids_from(*config.paths.scenario);

  nlohmann::ordered_json out;
  out["map_n"] = config.map_n;
  out["consumers"] = table.consumer_ids.size();
  out["fraud"] = fraud.size();
  out["methods"] = nlohmann::ordered_json::object();
  using pipeline::Method;
  for (Method m : {Method::mic, Method::cfsfdp, Method::arith, Method::geo, Method::pcc}) {
    auto column = table.columns.find(std::string(pipeline::rank_column(m)));
    if (column == table.columns.end()) continue;
    const auto labeled = evaluate::label(table.consumer_ids, column->second, fraud);
    auto& entry = out["methods"][std::string(pipeline::to_string(m))];
    entry["auc"] = evaluate::auc(labeled);
    entry["map"] = evaluate::map_at_n(labeled, config.map_n);
  }
  require(!out["methods"].empty(), ErrorKind::shape,
          config.paths.ranking->string() + " has no rank columns");
  ensure_dir(config.paths.out_dir);
  const fs::path path = config.paths.out_dir / "metrics.json";
  const std::string text = out.dump(2) + "\n";
  csv::write_file(path, text);
  emit(log, "wrote " + path.string());
  return {{path}, text};
}

Outputs cmd_experiment(const RunConfig& config, const Log& log) {
  evaluate::ExperimentConfig e;
  e.generator = config.generator;
  e.scenario = config.scenario;
  e.scenario.noise_sigma = config.noise_sigma;
  e.types = config.types;
  e.methods = config.experiment_methods;
  e.detect = config.detect;
  e.trials = config.trials;
  e.map_n = config.map_n;
  e.master_seed = config.master_seed;
  e.threads = resolve_threads(config.threads);
  e.progress = log;
  const auto report = evaluate::run_experiment(e);
  evaluate::write_report(config.paths.out_dir, report);
  Outputs out;
  for (const char* name : {"report.json", "report.csv", "curves.csv", "timing.csv"})
    out.files.push_back(config.paths.out_dir / name);
  out.summary = evaluate::report_json(report);
  return out;
}

correlate::MicResult mic_from_csv(const fs::path& path, const correlate::MicOptions& options,
                                  correlate::PccResult* pcc) {
  const std::string text = csv::read_file(path);
  const auto rows = csv::split(text);
  std::vector<double> x, y;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require(row.fields.size() == 2, ErrorKind::shape,
            "line " + std::to_string(row.line) + ": expected 2 columns");
    if (r == 0 && !csv::to_double(row.fields[0])) continue;  // header
    x.push_back(csv::parse_double(row.fields[0], row.line, "x"));
    y.push_back(csv::parse_double(row.fields[1], row.line, "y"));
  }
  const correlate::PairSample sample(x, y);
  if (pcc) *pcc = correlate::pcc(sample);
  return correlate::mic(sample, options);
}

}  // namespace theftsentry::app
