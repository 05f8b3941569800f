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


#include "theftsentry/theftsentry.h"

#include <cstdlib>
#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <string>

#include "app.hpp"
#include "error.hpp"
#include "parallel.hpp"

struct ts_dataset {
  std::vector<theftsentry::meterdata::AreaDataset> areas;
};

struct ts_ranking {
  theftsentry::pipeline::Detection detection;
};

namespace {

using namespace theftsentry;

thread_local std::string last_error;

std::mutex log_mutex;
ts_log_fn log_fn = nullptr;
void* log_user = nullptr;

void log_message(const std::string& message) {
  std::lock_guard lock(log_mutex);
  if (log_fn) log_fn(message.c_str(), log_user);
}

ts_status status_for(ErrorKind kind) { return static_cast<ts_status>(exit_code(kind)); }

template <typename Body>
ts_status guarded(Body&& body) {
  last_error.clear();
  try {
    body();
    return TS_OK;
  } catch (const Error& e) {
    last_error = std::string(to_string(e.kind())) + " error: " + e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "internal error: out of memory";
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    last_error = "internal error: unknown exception";
  }
  return TS_ERR_INTERNAL;
}

app::RunConfig config_from(const char* json) {
  if (json == nullptr || *json == '\0') return app::RunConfig{};
  return app::parse_config(json);
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorKind::parameter, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

const std::vector<double>* column_of(const pipeline::Detection& d, std::string_view column) {
  auto pick = [](const std::optional<pipeline::SuspicionRanking>& r, bool degree) {
    return r ? (degree ? &r->degree : &r->rank) : nullptr;
  };
  if (column == "mic_degree") return pick(d.mic, true);
  if (column == "mic_rank") return pick(d.mic, false);
  if (column == "zeta_degree") return pick(d.zeta, true);
  if (column == "zeta_rank") return pick(d.zeta, false);
  if (column == "combined_arith") return pick(d.arith, false);
  if (column == "combined_geo") return pick(d.geo, false);
  if (column == "pcc_degree") return pick(d.pcc, true);
  if (column == "pcc_rank") return pick(d.pcc, false);
  return nullptr;
}

}  // namespace

extern "C" {

const char* ts_version(void) { return THEFTSENTRY_VERSION; }

const char* ts_last_error(void) { return last_error.c_str(); }

void ts_set_log_callback(ts_log_fn fn, void* user) {
  std::lock_guard lock(log_mutex);
  log_fn = fn;
  log_user = user;
}

void ts_free_string(char* text) { std::free(text); }

ts_status ts_synth(const char* config_json) {
  return guarded([&] { app::cmd_synth(config_from(config_json), log_message); });
}

ts_status ts_tamper(const char* config_json) {
  return guarded([&] { app::cmd_tamper(config_from(config_json), log_message); });
}

ts_status ts_detect(const char* config_json) {
  return guarded([&] { app::cmd_detect(config_from(config_json), log_message); });
}

ts_status ts_evaluate(const char* config_json, char** metrics_json) {
  return guarded([&] {
    const auto out = app::cmd_evaluate(config_from(config_json), log_message);
    if (metrics_json) *metrics_json = copy_string(out.summary);
  });
}

ts_status ts_experiment(const char* config_json, char** report_json) {
  return guarded([&] {
    const auto out = app::cmd_experiment(config_from(config_json), log_message);
    if (report_json) *report_json = copy_string(out.summary);
  });
}

ts_status ts_config_check(const char* config_json) {
  return guarded([&] { config_from(config_json); });
}

ts_status ts_mic(const double* x, const double* y, size_t n, double alpha, double* value,
                 unsigned* flags) {
  return guarded([&] {
    need(x, "x");
    need(y, "y");
    need(value, "value");
    correlate::MicOptions options;
    if (alpha > 0.0) options.alpha = alpha;
    const auto r = correlate::mic(correlate::PairSample({x, n}, {y, n}), options);
    *value = r.value;
    if (flags)
      *flags = (r.degenerate ? TS_MIC_DEGENERATE : 0u) | (r.small_sample ? TS_MIC_SMALL_SAMPLE : 0u);
  });
}

ts_status ts_mic_csv(const char* path, double alpha, double* mic, double* pcc, unsigned* flags) {
  return guarded([&] {
    need(path, "path");
    need(mic, "mic");
    correlate::MicOptions options;
    if (alpha > 0.0) options.alpha = alpha;
    correlate::PccResult p;
    const auto r = app::mic_from_csv(path, options, &p);
    *mic = r.value;
    if (pcc) *pcc = p.value;
    if (flags)
      *flags = (r.degenerate ? TS_MIC_DEGENERATE : 0u) | (r.small_sample ? TS_MIC_SMALL_SAMPLE : 0u);
  });
}

ts_status ts_pcc(const double* x, const double* y, size_t n, double* value) {
  return guarded([&] {
    need(x, "x");
    need(y, "y");
    need(value, "value");
    *value = correlate::pcc(correlate::PairSample({x, n}, {y, n})).value;
  });
}

ts_status ts_auc(const double* ranks, const unsigned char* fraud, size_t n, double* value) {
  return guarded([&] {
    need(ranks, "ranks");
    need(fraud, "fraud");
    need(value, "value");
    *value = evaluate::auc(evaluate::label({ranks, n}, {fraud, n}));
  });
}

ts_status ts_map_at_n(const double* ranks, const unsigned char* fraud, size_t n, size_t top_n,
                      double* value) {
  return guarded([&] {
    need(ranks, "ranks");
    need(fraud, "fraud");
    need(value, "value");
    *value = evaluate::map_at_n(evaluate::label({ranks, n}, {fraud, n}), top_n);
  });
}

ts_status ts_dataset_load(const char* config_json, ts_dataset** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto dataset = std::make_unique<ts_dataset>();
    dataset->areas = app::load_areas(config_from(config_json), log_message);
    *out = dataset.release();
  });
}

size_t ts_dataset_area_count(const ts_dataset* dataset) {
  return dataset ? dataset->areas.size() : 0;
}

size_t ts_dataset_consumer_count(const ts_dataset* dataset) {
  size_t n = 0;
  if (dataset)
    for (const auto& a : dataset->areas) n += a.consumers.size();
  return n;
}

size_t ts_dataset_day_count(const ts_dataset* dataset) {
  return dataset && !dataset->areas.empty() ? dataset->areas.front().day_count() : 0;
}

void ts_dataset_free(ts_dataset* dataset) { delete dataset; }

ts_status ts_ranking_detect(const ts_dataset* dataset, const char* config_json, ts_ranking** out) {
  return guarded([&] {
    need(dataset, "dataset");
    need(out, "out");
    *out = nullptr;
    const auto config = config_from(config_json);
    auto options = config.detect;
    options.threads = resolve_threads(config.threads);
    auto ranking = std::make_unique<ts_ranking>();
    ranking->detection = pipeline::detect(dataset->areas, options);
    *out = ranking.release();
  });
}

size_t ts_ranking_size(const ts_ranking* ranking) {
  return ranking ? ranking->detection.consumer_ids.size() : 0;
}

const char* ts_ranking_consumer_id(const ts_ranking* ranking, size_t index) {
  if (!ranking || index >= ranking->detection.consumer_ids.size()) return nullptr;
  return ranking->detection.consumer_ids[index].c_str();
}

ts_status ts_ranking_column(const ts_ranking* ranking, const char* column, double* out) {
  return guarded([&] {
    need(ranking, "ranking");
    need(column, "column");
    need(out, "out");
    const auto* values = column_of(ranking->detection, column);
    require(values != nullptr, ErrorKind::parameter,
            std::string("ranking has no column '") + column + "'");
    std::copy(values->begin(), values->end(), out);
  });
}

ts_status ts_ranking_write_csv(const ts_ranking* ranking, const char* path) {
  return guarded([&] {
    need(ranking, "ranking");
    need(path, "path");
    pipeline::write_ranking_csv(path, ranking->detection);
  });
}

void ts_ranking_free(ts_ranking* ranking) { delete ranking; }

}  // extern "C"
