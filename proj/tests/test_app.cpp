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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "app.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "generators.hpp"

using namespace theftsentry;
using namespace theftsentry::app;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::internal;
}

std::string slurp(const fs::path& p) { return csv::read_file(p); }

RunConfig small_config(const fs::path& dir) {
  return parse_config(R"({
    "generator": {"n_consumers": 60, "m_days": 8, "seed": 4},
    "scenario": {"areas": 3, "thieves_per_area": 2, "seed": 9},
    "paths": {"out_dir": ")" + dir.string() + R"("},
    "threads": 1
  })");
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config("{}");
  CHECK(c.generator.n_consumers == 391);
  CHECK(c.generator.m_days == 30);
  CHECK(c.generator.intervals == 48);
  CHECK(c.scenario.n_areas == 10);
  CHECK(c.scenario.thieves_per_area == 5);
  CHECK(c.trials == 100);
  CHECK(c.map_n == 20);
  CHECK(c.detect.mic.alpha == 0.6);
  CHECK(c.detect.density.cutoff.target_fraction == 0.02);
  CHECK(c.detect.density.kernel == densepeaks::Kernel::cutoff);
  CHECK(c.detect.methods.size() == 4);
}

TEST_CASE("every block is read") {
  const auto c = parse_config(R"({
    "paths": {"consumers": "c.csv", "observer": "derive", "ground_truth": "g.csv",
              "scenario": "s.json", "ranking": "r.csv", "out_dir": "out"},
    "generator": {"n_consumers": 10, "m_days": 4, "intervals": 24, "seed": 5, "noise_sigma": 0.1},
    "scenario": {"areas": 2, "thieves_per_area": 1, "fdi_mix": "FDI2",
                 "tampered_day_fraction": 0.25, "seed": 6},
    "detect": {"methods": ["mic", "pcc"], "kernel": "gaussian", "dc_fraction": 0.05,
               "mic_alpha": 0.5, "zeta_scope": "per_area"},
    "evaluate": {"map_n": 10, "trials": 7, "master_seed": 8, "types": ["FDI1", "MIX"],
                 "methods": ["arith"]},
    "threads": 2
  })");
  CHECK(*c.paths.consumers == "c.csv");
  CHECK(*c.paths.observer == "derive");
  CHECK(c.paths.out_dir == "out");
  CHECK(c.generator.intervals == 24);
  CHECK(c.noise_sigma == 0.1);
  CHECK(c.scenario.mix.label() == "FDI2");
  CHECK(c.scenario.tampered_day_fraction == 0.25);
  CHECK(c.detect.methods == std::vector<pipeline::Method>{pipeline::Method::mic, pipeline::Method::pcc});
  CHECK(c.detect.density.kernel == densepeaks::Kernel::gaussian);
  CHECK(c.detect.zeta_scope == pipeline::ZetaScope::per_area);
  CHECK(c.detect.mic.alpha == 0.5);
  CHECK(c.trials == 7);
  CHECK(c.master_seed == 8);
  CHECK(c.types == std::vector<std::string>{"FDI1", "MIX"});
  CHECK(c.experiment_methods == std::vector<pipeline::Method>{pipeline::Method::arith});
  CHECK(c.threads == 2);
}

TEST_CASE("mix weights and combine mode") {
  CHECK(parse_config(R"({"scenario": {"fdi_mix": [0, 1, 0, 0, 0, 1]}})").scenario.mix.label() == "CUSTOM");
  CHECK(parse_config(R"({"scenario": {"fdi_mix": {"FDI5": 2}}})").scenario.mix.label() == "FDI5");
  const auto geo = parse_config(R"({"detect": {"combine": "geo"}})");
  CHECK(geo.detect.methods ==
        std::vector<pipeline::Method>{pipeline::Method::mic, pipeline::Method::cfsfdp, pipeline::Method::geo});
}

TEST_CASE("configuration errors") {
  for (const char* bad : {R"({"genrator": {}})", R"({"generator": {"seeds": 1}})",
                          R"({"generator": {"n_consumers": "many"}})", R"({"detect": {"kernel": "box"}})",
                          R"({"detect": {"methods": ["svm"]}})", R"({"detect": {"dc_fraction": 2}})",
                          R"({"scenario": {"fdi_mix": [0, 0, 0, 0, 0, 0]}})", R"({"evaluate": {"trials": 0}})",
                          R"({"detect": {"combine": "max"}})", "not json"})
    CHECK_MESSAGE(kind_of([&] { parse_config(bad); }) == ErrorKind::config, bad);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::config);
}

TEST_CASE("synth is deterministic and rejects n = 0") {
  const auto dir = gen::temp_dir("app_synth");
  auto c = small_config(dir);
  cmd_synth(c);
  const auto first = slurp(dir / "consumers.csv");
  cmd_synth(c);
  CHECK(slurp(dir / "consumers.csv") == first);
  CHECK(meterdata::parse_consumers_csv(first).consumers.size() == 60);
  c.generator.n_consumers = 0;
  CHECK(kind_of([&] { cmd_synth(c); }) == ErrorKind::parameter);
}

TEST_CASE("tamper, detect and evaluate") {
  const auto dir = gen::temp_dir("app_flow");
  auto c = small_config(dir);
  const auto tampered = cmd_tamper(c);
  CHECK(tampered.files.size() == 2 + 3 + 1);
  const auto scenario = nlohmann::json::parse(slurp(dir / "scenario.json"));
  CHECK(scenario["fraud_ids"].size() == 6);
  CHECK(scenario["areas"][0].contains("observer"));

  c.paths.consumers = dir / "consumers.csv";
  c.paths.scenario = dir / "scenario.json";
  const auto areas = load_areas(c);
  CHECK(areas.size() == 3);
  cmd_detect(c);
  const auto ranking = slurp(dir / "ranking.csv");
  cmd_detect(c);
  CHECK(slurp(dir / "ranking.csv") == ranking);

  // Deriving the observer from ground truth gives the same NTL.
  auto derived = c;
  derived.paths.observer = "derive";
  derived.paths.ground_truth = dir / "ground_truth.csv";
  derived.paths.ranking = dir / "ranking_derived.csv";
  cmd_detect(derived);
  CHECK(slurp(dir / "ranking_derived.csv") == ranking);

  c.paths.ranking = dir / "ranking.csv";
  const auto metrics = nlohmann::json::parse(cmd_evaluate(c).summary);
  CHECK(metrics["map_n"] == 20);
  CHECK(metrics["fraud"] == 6);
  for (const char* m : {"mic", "cfsfdp", "arith", "geo"}) {
    REQUIRE(metrics["methods"].contains(m));
    const double a = metrics["methods"][m]["auc"];
    CHECK((a >= 0.0 && a <= 1.0));
  }
  CHECK(fs::exists(dir / "metrics.json"));
}

TEST_CASE("detect without observer readings is a configuration error") {
  const auto dir = gen::temp_dir("app_noobs");
  auto c = small_config(dir);
  cmd_synth(c);
  c.paths.consumers = dir / "consumers.csv";
  c.paths.observer = "derive";
  CHECK(kind_of([&] { cmd_detect(c); }) == ErrorKind::config);
  c.paths.observer.reset();
  CHECK(kind_of([&] { cmd_detect(c); }) == ErrorKind::config);
}

TEST_CASE("method selection shapes ranking.csv") {
  const auto dir = gen::temp_dir("app_methods");
  auto c = small_config(dir);
  cmd_tamper(c);
  c.paths.consumers = dir / "consumers.csv";
  c.paths.scenario = dir / "scenario.json";
  c.detect.methods = {pipeline::Method::mic};
  cmd_detect(c);
  const auto table = pipeline::load_ranking_csv(dir / "ranking.csv");
  CHECK(table.columns.count("mic_rank") == 1);
  CHECK(table.columns.count("combined_arith") == 0);
  CHECK(table.columns.count("zeta_rank") == 0);
}

TEST_CASE("evaluate scores a perfect ranking as 1") {
  const auto dir = gen::temp_dir("app_perfect");
  csv::write_file(dir / "ranking.csv", "consumer_id,mic_degree,mic_rank\na,0.1,1\nb,0.2,2\nc,0.9,4\nd,0.5,3\n");
  csv::write_file(dir / "scenario.json",
                  R"({"areas": [{"name": "x", "consumers": ["a","b","c","d"], "fraud": ["c","d"]}]})");
  RunConfig c;
  c.paths.out_dir = dir;
  c.paths.ranking = dir / "ranking.csv";
  c.paths.scenario = dir / "scenario.json";
  const auto metrics = nlohmann::json::parse(cmd_evaluate(c).summary);
  CHECK(metrics["methods"]["mic"]["auc"] == 1.0);
  CHECK(metrics["methods"]["mic"]["map"] == 1.0);
}

TEST_CASE("experiment writes its reports") {
  const auto dir = gen::temp_dir("app_experiment");
  auto c = small_config(dir);
  c.trials = 2;
  c.types = {"FDI3"};
  const auto out = cmd_experiment(c);
  for (const auto& f : out.files) CHECK(fs::exists(f));
  const auto report = slurp(dir / "report.csv");
  cmd_experiment(c);
  CHECK(slurp(dir / "report.csv") == report);
  CHECK(report.rfind("type,mic_auc", 0) == 0);
  CHECK(report.find("\nFDI3,") != std::string::npos);
}

TEST_CASE("MIC of a two-column CSV") {
  const auto dir = gen::temp_dir("app_mic");
  std::string text = "x,y\n";
  for (int i = 0; i < 30; ++i) text += std::to_string(i) + "," + std::to_string(i * i) + "\n";
  csv::write_file(dir / "pairs.csv", text);
  correlate::PccResult r;
  const auto m = mic_from_csv(dir / "pairs.csv", {}, &r);
  CHECK(m.value == doctest::Approx(1.0));
  CHECK(r.value > 0.9);
  csv::write_file(dir / "bad.csv", "1,2,3\n");
  CHECK(kind_of([&] { mic_from_csv(dir / "bad.csv", {}); }) == ErrorKind::shape);
}
