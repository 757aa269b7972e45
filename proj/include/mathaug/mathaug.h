// Copyright 2026 The mathaug Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the mathaug library.
 *
 * Conventions: every fallible call returns a mathaug_status. On failure the
 * thread-local message from mathaug_last_error() describes it. Strings
 * returned through `char**` are owned by the caller and released with
 * mathaug_string_free(). Handles are released with their *_free function;
 * passing NULL to a free function is a no-op.
 */
#ifndef MATHAUG_MATHAUG_H_
#define MATHAUG_MATHAUG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__) || defined(__clang__)
#define MATHAUG_API __attribute__((visibility("default")))
#else
#define MATHAUG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mathaug_status {
  MATHAUG_OK = 0,
  MATHAUG_E_INVALID_ARGUMENT = 1,
  MATHAUG_E_IO = 2,
  MATHAUG_E_PARSE = 3,
  MATHAUG_E_INGEST = 4,
  MATHAUG_E_CONFIG = 5,
  MATHAUG_E_EXHAUSTED_RETRIES = 6,
  MATHAUG_E_AUTH = 7,
  MATHAUG_E_MALFORMED_RESPONSE = 8,
  MATHAUG_E_BAD_REQUEST = 9,
  MATHAUG_E_JOURNAL_MISMATCH = 10,
  MATHAUG_E_SPLIT = 11,
  MATHAUG_E_NOT_FOUND = 12,
  MATHAUG_E_INTERNAL = 99
} mathaug_status;

typedef struct mathaug_corpus mathaug_corpus;
typedef struct mathaug_personas mathaug_personas;
typedef struct mathaug_gateway mathaug_gateway;

MATHAUG_API const char* mathaug_version(void);
MATHAUG_API const char* mathaug_last_error(void);
MATHAUG_API void mathaug_string_free(char* s);

/* "debug", "info", "warn", "error" or "off". Logs go to stderr as JSON lines. */
MATHAUG_API mathaug_status mathaug_set_log_level(const char* level);

MATHAUG_API mathaug_status mathaug_sha256_hex(const char* data, size_t len, char** out);
/* Writes via a temporary file and rename. */
MATHAUG_API mathaug_status mathaug_write_file_atomic(const char* path, const char* data, size_t len);

/* ---- answer engine ---- */

/* MATHAUG_E_NOT_FOUND when the text has no complete \boxed{...}. */
MATHAUG_API mathaug_status mathaug_extract_boxed(const char* text, char** out);
MATHAUG_API mathaug_status mathaug_normalize_answer(const char* raw, char** canonical);
MATHAUG_API mathaug_status mathaug_answers_equivalent(const char* a, const char* b, int* equal);
/* MATHAUG_E_SPLIT when no "Corrected Explanation" heading exists. */
MATHAUG_API mathaug_status mathaug_split_reflection(const char* text, char** review, char** corrected);
/* Writes "correct", "incorrect" or "unparseable". */
MATHAUG_API mathaug_status mathaug_grade_prediction(const char* output, const char* reference,
                                                    char** verdict);

/* ---- prompts ---- */

/* kind: "inference" (a = question), "rewrite" (a = question, b = persona),
 * "reflection" (a = question, b = incorrect explanation), "training" or
 * "evaluation" (a = instruction). Unused arguments may be NULL. */
MATHAUG_API mathaug_status mathaug_render_prompt(const char* kind, const char* a, const char* b,
                                                 char** out);

/* ---- corpus ---- */

/* dataset: "gsm8k" or "math"; split: "train" or "test". `report_json`
 * (optional) receives {"records", "ingested", "issues": [...]}. */
MATHAUG_API mathaug_status mathaug_corpus_ingest(const char* dataset, const char* input_path,
                                                 const char* split, mathaug_corpus** out,
                                                 char** report_json);
/* Opens one or more corpus files (Problem JSON Lines) as a single corpus. */
MATHAUG_API mathaug_status mathaug_corpus_open(const char* const* paths, size_t n,
                                               mathaug_corpus** out);
MATHAUG_API mathaug_status mathaug_corpus_save(const mathaug_corpus* corpus, const char* path);
MATHAUG_API size_t mathaug_corpus_size(const mathaug_corpus* corpus);
MATHAUG_API void mathaug_corpus_free(mathaug_corpus* corpus);

/* ---- personas ---- */

MATHAUG_API mathaug_status mathaug_personas_load(const char* path, uint64_t seed,
                                                 mathaug_personas** out);
MATHAUG_API size_t mathaug_personas_size(const mathaug_personas* personas);
/* Fills ids[0..n) with distinct persona ids for the problem. */
MATHAUG_API mathaug_status mathaug_personas_sample(const mathaug_personas* personas,
                                                   const char* problem_id, size_t n, size_t* ids);
MATHAUG_API void mathaug_personas_free(mathaug_personas* personas);

/* ---- gateway ---- */

/* config_json: gateway settings object (may be NULL or "{}" for defaults).
 * With a mock script path the gateway is offline and deterministic;
 * otherwise it calls the HTTP endpoint with the key from MATHAUG_API_KEY. */
MATHAUG_API mathaug_status mathaug_gateway_create(const char* config_json,
                                                  const char* mock_script_path,
                                                  mathaug_gateway** out);
MATHAUG_API void mathaug_gateway_free(mathaug_gateway* gateway);

/* ---- pipeline ---- */

/* config_json: {"k1", "k2", "seed", "max_retries_unparseable", "temperature",
 * "max_tokens"}; missing keys take defaults. The checkpoint directory holds
 * config.json, journal.jsonl and failures.jsonl; a non-empty directory is
 * resumed. Outputs samples.jsonl (and incorrect.jsonl for stage 1) go to the
 * same directory. `summary_json` (optional) receives counts and paths. */
MATHAUG_API mathaug_status mathaug_run_stage1(const mathaug_corpus* corpus,
                                              const mathaug_personas* personas,
                                              mathaug_gateway* gateway, const char* config_json,
                                              const char* checkpoint_dir, char** summary_json);
MATHAUG_API mathaug_status mathaug_run_stage2(const mathaug_corpus* corpus,
                                              const mathaug_personas* personas,
                                              mathaug_gateway* gateway, const char* config_json,
                                              const char* incorrect_path,
                                              const char* checkpoint_dir, char** summary_json);

/* Concatenates stage-1 then stage-2 sample files, deduplicates, re-checks
 * lineage against the corpus and writes the dataset. */
MATHAUG_API mathaug_status mathaug_assemble(const char* const* stage1_paths, size_t n1,
                                            const char* const* stage2_paths, size_t n2,
                                            const mathaug_corpus* corpus, const char* out_path,
                                            char** report_json, char** table_text);

/* ---- analytics ---- */

/* Diversity of the questions in a dataset or corpus file. */
MATHAUG_API mathaug_status mathaug_diversity(const char* path, char** report_json);
MATHAUG_API mathaug_status mathaug_length_histogram(const char* path, size_t bin_width,
                                                    char** report_json, char** csv);
MATHAUG_API mathaug_status mathaug_level_split(const char* journal_path,
                                               const mathaug_corpus* corpus, char** report_json);
/* which: "stage1-only" or "full". */
MATHAUG_API mathaug_status mathaug_export_ablation(const char* dataset_path, const char* which,
                                                   const char* out_path, size_t* written);

/* ---- evaluation ---- */

MATHAUG_API mathaug_status mathaug_evaluate(const char* predictions_path,
                                            const mathaug_corpus* corpus, char** report_json,
                                            char** table_text);
MATHAUG_API mathaug_status mathaug_predict(const mathaug_corpus* corpus, mathaug_gateway* gateway,
                                           int max_tokens, const char* out_path,
                                           char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* MATHAUG_MATHAUG_H_ */
