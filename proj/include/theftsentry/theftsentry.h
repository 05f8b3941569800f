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

/* TheftSentry C interface.
 *
 * Every call returns a ts_status. On failure the message of the last error on
 * the calling thread is available from ts_last_error() until the next call.
 * Status values double as process exit codes. */

#ifndef THEFTSENTRY_THEFTSENTRY_H
#define THEFTSENTRY_THEFTSENTRY_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TS_API __declspec(dllexport)
#else
#define TS_API __attribute__((visibility("default")))
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_ERR_CONFIG = 2,   /* bad configuration, parameter or file access */
  TS_ERR_DATA = 3,     /* malformed or inconsistent input data */
  TS_ERR_INTERNAL = 4  /* invariant violation */
} ts_status;

/* MIC result flags */
#define TS_MIC_DEGENERATE 1u   /* a coordinate is constant; value is 0 */
#define TS_MIC_SMALL_SAMPLE 2u /* too few points for the bound; 2x2 grid used */

TS_API const char* ts_version(void);
TS_API const char* ts_last_error(void);

/* Receives progress messages and data warnings. NULL disables logging. */
typedef void (*ts_log_fn)(const char* message, void* user);
TS_API void ts_set_log_callback(ts_log_fn fn, void* user);

/* Strings returned through char** outputs are released with ts_free_string. */
TS_API void ts_free_string(char* text);

/* Workflows. `config_json` is a run configuration as JSON text (NULL or ""
 * selects all defaults). */
TS_API ts_status ts_synth(const char* config_json);
TS_API ts_status ts_tamper(const char* config_json);
TS_API ts_status ts_detect(const char* config_json);
TS_API ts_status ts_evaluate(const char* config_json, char** metrics_json);
TS_API ts_status ts_experiment(const char* config_json, char** report_json);

/* Parses and validates a configuration without running anything. */
TS_API ts_status ts_config_check(const char* config_json);

/* Association measures on paired samples. `alpha` <= 0 selects 0.6. */
TS_API ts_status ts_mic(const double* x, const double* y, size_t n, double alpha, double* value,
                        unsigned* flags);
TS_API ts_status ts_mic_csv(const char* path, double alpha, double* mic, double* pcc,
                            unsigned* flags);
TS_API ts_status ts_pcc(const double* x, const double* y, size_t n, double* value);

/* Ranking metrics. ranks[i] is the rank of consumer i (higher = more
 * suspicious), fraud[i] is nonzero for thieves. */
TS_API ts_status ts_auc(const double* ranks, const unsigned char* fraud, size_t n, double* value);
TS_API ts_status ts_map_at_n(const double* ranks, const unsigned char* fraud, size_t n,
                             size_t top_n, double* value);

/* Areas loaded as the detect workflow does (paths block of the config). */
typedef struct ts_dataset ts_dataset;

TS_API ts_status ts_dataset_load(const char* config_json, ts_dataset** out);
TS_API size_t ts_dataset_area_count(const ts_dataset* dataset);
TS_API size_t ts_dataset_consumer_count(const ts_dataset* dataset);
TS_API size_t ts_dataset_day_count(const ts_dataset* dataset);
TS_API void ts_dataset_free(ts_dataset* dataset);

/* Result of a detection run. */
typedef struct ts_ranking ts_ranking;

/* `config_json` supplies the detect block and threads; paths are ignored. */
TS_API ts_status ts_ranking_detect(const ts_dataset* dataset, const char* config_json,
                                   ts_ranking** out);
TS_API size_t ts_ranking_size(const ts_ranking* ranking);
/* NULL when index is out of range. */
TS_API const char* ts_ranking_consumer_id(const ts_ranking* ranking, size_t index);
/* Copies a ranking.csv column (e.g. "mic_rank", "combined_arith") into out,
 * which holds ts_ranking_size() values. */
TS_API ts_status ts_ranking_column(const ts_ranking* ranking, const char* column, double* out);
TS_API ts_status ts_ranking_write_csv(const ts_ranking* ranking, const char* path);
TS_API void ts_ranking_free(ts_ranking* ranking);

#ifdef __cplusplus
}
#endif

#endif /* THEFTSENTRY_THEFTSENTRY_H */
