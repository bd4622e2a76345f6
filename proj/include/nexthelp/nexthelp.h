// Copyright 2026 The nexthelp Authors.
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

/*
 * C interface to the nexthelp library.
 *
 * Every object is an opaque handle created by a *_create / *_load / producer
 * call and released with the matching *_free. Functions that can fail return
 * an nh_status; on failure nh_last_error() describes the problem for the
 * calling thread. Strings returned by accessors are owned by the handle and
 * stay valid until it is freed.
 */
#ifndef NEXTHELP_NEXTHELP_H_
#define NEXTHELP_NEXTHELP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NH_API __declspec(dllexport)
#else
#define NH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nh_status {
  NH_OK = 0,
  NH_ERR_INVALID_ARGUMENT = 1,
  NH_ERR_PARSE = 2,
  NH_ERR_DATA = 3,
  NH_ERR_IO = 4,
  NH_ERR_INFERENCE = 5,
  NH_ERR_INTERNAL = 6
} nh_status;

typedef struct nh_records nh_records;
typedef struct nh_network nh_network;
typedef struct nh_topics nh_topics;
typedef struct nh_prediction nh_prediction;
typedef struct nh_assistant nh_assistant;
typedef struct nh_report nh_report;

NH_API const char* nh_version(void);
NH_API const char* nh_last_error(void);
NH_API const char* nh_status_name(nh_status status);

/* Transition records. */

NH_API nh_status nh_records_create(nh_records** out);
NH_API nh_status nh_records_read_db(const char* path, nh_records** out);
/* Overwrites path with a header and every record. */
NH_API nh_status nh_records_write_db(const nh_records* records,
                                     const char* path);
/* Appends every record; writes the header first if the file is new/empty. */
NH_API nh_status nh_records_append_db(const nh_records* records,
                                      const char* path);
/* Parses one log file as one session and appends its transitions. Either
 * output pointer may be NULL. */
NH_API nh_status nh_records_ingest_log(nh_records* records,
                                       const char* log_path, size_t* events,
                                       size_t* added);
NH_API size_t nh_records_count(const nh_records* records);
NH_API size_t nh_records_warning_count(const nh_records* records);
NH_API const char* nh_records_warning(const nh_records* records, size_t index);
NH_API void nh_records_free(nh_records* records);

/* Learning. */

typedef enum nh_structure_mode {
  NH_STRUCTURE_CHAIN = 0,
  NH_STRUCTURE_EXHAUSTIVE = 1,
  NH_STRUCTURE_GREEDY = 2
} nh_structure_mode;

typedef struct nh_learn_options {
  double ess;
  nh_structure_mode mode;
  size_t max_parents;
  const char* fields; /* comma-separated field keys; NULL for the default */
  const char* name;   /* network name; NULL for "nexthelp" */
} nh_learn_options;

NH_API void nh_learn_options_init(nh_learn_options* options);
/* log_score may be NULL. */
NH_API nh_status nh_learn(const nh_records* records,
                          const nh_learn_options* options, nh_network** out,
                          double* log_score);

/* Networks. */

NH_API nh_status nh_network_load(const char* path, nh_network** out);
NH_API nh_status nh_network_save(const nh_network* network, const char* path);
/* Edges as "A -> B; C -> D", or "(no edges)". */
NH_API const char* nh_network_structure(const nh_network* network);
NH_API size_t nh_network_variable_count(const nh_network* network);
NH_API void nh_network_free(nh_network* network);

/* Help topics. */

NH_API nh_status nh_topics_create(nh_topics** out);
NH_API nh_status nh_topics_load(const char* path, nh_topics** out);
NH_API void nh_topics_free(nh_topics* topics);

/* Predictions. topics may be NULL (every action maps to the default topic);
 * current_action may be NULL (cold start). */

NH_API nh_status nh_predict(const nh_network* network, const nh_topics* topics,
                            const char* current_action, size_t k,
                            nh_prediction** out);
NH_API size_t nh_prediction_size(const nh_prediction* prediction);
NH_API int nh_prediction_fallback(const nh_prediction* prediction);
/* Any output pointer may be NULL. */
NH_API nh_status nh_prediction_entry(const nh_prediction* prediction,
                                     size_t index, const char** action,
                                     double* probability,
                                     const char** topic_id,
                                     const char** topic_title);
NH_API void nh_prediction_free(nh_prediction* prediction);

/* Adaptive user support module. db_path NULL keeps transitions in memory;
 * otherwise they are appended to that transition database. */

NH_API nh_status nh_assistant_create(const nh_network* network,
                                     const nh_topics* topics,
                                     const char* db_path, nh_assistant** out);
/* property may be NULL. */
NH_API nh_status nh_assistant_record(nh_assistant* assistant,
                                     int64_t timestamp_s, const char* action,
                                     const char* property);
NH_API nh_status nh_assistant_query(const nh_assistant* assistant, size_t k,
                                    nh_prediction** out);
/* On failure the previously loaded network keeps answering. */
NH_API nh_status nh_assistant_reload(nh_assistant* assistant,
                                     const char* network_path);
NH_API size_t nh_assistant_transition_count(const nh_assistant* assistant);
NH_API void nh_assistant_free(nh_assistant* assistant);

/* Evaluation. */

typedef struct nh_cv_options {
  size_t folds;
  double ess;
  size_t top_k;
  uint64_t seed;
} nh_cv_options;

NH_API void nh_cv_options_init(nh_cv_options* options);
NH_API nh_status nh_cross_validate(const nh_records* records,
                                   const nh_cv_options* options,
                                   nh_report** out);
NH_API nh_status nh_replay_log(const nh_network* network,
                               const nh_topics* topics, const char* log_path,
                               size_t k, nh_report** out);
NH_API const char* nh_report_text(const nh_report* report);
NH_API const char* nh_report_tsv(const nh_report* report);
/* Per-step replay trace; empty for cross-validation reports. */
NH_API const char* nh_report_trace(const nh_report* report);
NH_API void nh_report_free(nh_report* report);

/* Utilities. */

NH_API nh_status nh_parse_timestamp(const char* text, int64_t* seconds);

#ifdef __cplusplus
}
#endif

#endif /* NEXTHELP_NEXTHELP_H_ */
