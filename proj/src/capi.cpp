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

#include "mathaug/mathaug.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mathaug/analytics.hpp"
#include "mathaug/answer.hpp"
#include "mathaug/common.hpp"
#include "mathaug/corpus.hpp"
#include "mathaug/eval.hpp"
#include "mathaug/gateway.hpp"
#include "mathaug/log.hpp"
#include "mathaug/personas.hpp"
#include "mathaug/pipeline.hpp"
#include "mathaug/prompts.hpp"

struct mathaug_corpus {
  std::vector<mathaug::Problem> problems;
  mathaug::CorpusIndex index;
  std::string fingerprint;

  explicit mathaug_corpus(std::vector<mathaug::Problem> p) : problems(std::move(p)) {
    index = mathaug::CorpusIndex(problems);
    fingerprint = mathaug::sha256_hex(mathaug::corpus_to_jsonl(problems));
  }
};

struct mathaug_personas {
  mathaug::PersonaStore store;
};

struct mathaug_gateway {
  std::unique_ptr<mathaug::Gateway> gateway;
  bool mock = false;
};

namespace {

using namespace mathaug;
using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

thread_local std::string g_last_error;

char* dup_string(std::string_view s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_out(char** out, std::string_view s) {
  if (out) *out = dup_string(s);
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

// Runs `body`, mapping exceptions onto status codes and the last-error text.
template <typename F>
mathaug_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MATHAUG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<mathaug_status>(static_cast<int>(e.code()));
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return MATHAUG_E_PARSE;
  } catch (const fs::filesystem_error& e) {
    g_last_error = e.what();
    return MATHAUG_E_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MATHAUG_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MATHAUG_E_INTERNAL;
  }
}

json parse_config(const char* text) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
}

PipelineConfig stage_config(const char* config_json, const mathaug_gateway* gateway) {
  json j = parse_config(config_json);
  j.erase("gateway");
  PipelineConfig config = pipeline_config_from_json(j);
  config.gateway = gateway->gateway->config();
  return config;
}

TimestampSource timestamps_for(const mathaug_gateway* gateway, const Journal& journal) {
  return gateway->mock ? TimestampSource::deterministic(journal.size()) : TimestampSource::system();
}

ordered_json stage_summary(Stage stage, const Journal& journal, std::size_t samples,
                           std::size_t failures, std::size_t issued, std::size_t replayed) {
  ordered_json s;
  s["stage"] = to_string(stage);
  s["config_hash"] = journal.config_hash();
  s["resumed"] = journal.resumed();
  s["samples"] = samples;
  s["failed_calls"] = failures;
  s["calls_issued"] = issued;
  s["calls_replayed"] = replayed;
  return s;
}

std::vector<AugmentedSample> load_all(const char* const* paths, size_t n) {
  std::vector<AugmentedSample> out;
  for (size_t i = 0; i < n; ++i) {
    require(paths[i] != nullptr, "sample path");
    auto part = load_samples(paths[i]);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace

extern "C" {

const char* mathaug_version(void) { return "1.0.0"; }

const char* mathaug_last_error(void) { return g_last_error.c_str(); }

void mathaug_string_free(char* s) { std::free(s); }

mathaug_status mathaug_set_log_level(const char* level) {
  return guarded([&] {
    require(level, "level");
    std::string_view l(level);
    if (l == "debug") set_log_level(LogLevel::kDebug);
    else if (l == "info") set_log_level(LogLevel::kInfo);
    else if (l == "warn") set_log_level(LogLevel::kWarn);
    else if (l == "error") set_log_level(LogLevel::kError);
    else if (l == "off") set_log_level(LogLevel::kOff);
    else fail(ErrorCode::kInvalidArgument, "unknown log level " + std::string(l));
  });
}

mathaug_status mathaug_sha256_hex(const char* data, size_t len, char** out) {
  return guarded([&] {
    require(data || len == 0, "data");
    set_out(out, sha256_hex(std::string_view(data ? data : "", len)));
  });
}

mathaug_status mathaug_write_file_atomic(const char* path, const char* data, size_t len) {
  return guarded([&] {
    require(path, "path");
    require(data || len == 0, "data");
    write_file_atomic(path, std::string_view(data ? data : "", len));
  });
}

mathaug_status mathaug_extract_boxed(const char* text, char** out) {
  return guarded([&] {
    require(text, "text");
    auto boxed = extract_boxed(text);
    if (!boxed) fail(ErrorCode::kNotFound, "no complete \\boxed{...} group");
    set_out(out, *boxed);
  });
}

mathaug_status mathaug_normalize_answer(const char* raw, char** canonical) {
  return guarded([&] {
    require(raw, "raw");
    set_out(canonical, normalize_answer(raw).canonical);
  });
}

mathaug_status mathaug_answers_equivalent(const char* a, const char* b, int* equal) {
  return guarded([&] {
    require(a && b && equal, "arguments");
    *equal = answers_equivalent(normalize_answer(a), normalize_answer(b)) ? 1 : 0;
  });
}

mathaug_status mathaug_split_reflection(const char* text, char** review, char** corrected) {
  return guarded([&] {
    require(text, "text");
    auto parts = split_reflection(text);
    set_out(review, parts.review);
    set_out(corrected, parts.corrected);
  });
}

mathaug_status mathaug_grade_prediction(const char* output, const char* reference, char** verdict) {
  return guarded([&] {
    require(output && reference, "arguments");
    auto g = grade_prediction(output, normalize_answer(reference));
    set_out(verdict, to_string(g.verdict));
  });
}

mathaug_status mathaug_render_prompt(const char* kind, const char* a, const char* b, char** out) {
  return guarded([&] {
    require(kind, "kind");
    auto k = prompt_kind_from_string(kind);
    if (!k) fail(ErrorCode::kInvalidArgument, "unknown prompt kind " + std::string(kind));
    std::string_view first = a ? a : "";
    std::string_view second = b ? b : "";
    switch (*k) {
      case PromptKind::kInference: set_out(out, inference_prompt(first)); break;
      case PromptKind::kRewrite: set_out(out, rewrite_prompt(first, second)); break;
      case PromptKind::kReflection: set_out(out, reflection_prompt(first, second)); break;
      case PromptKind::kTraining: set_out(out, training_prompt(first)); break;
      case PromptKind::kEvaluation: set_out(out, evaluation_prompt(first)); break;
    }
  });
}

mathaug_status mathaug_corpus_ingest(const char* dataset, const char* input_path, const char* split,
                                     mathaug_corpus** out, char** report_json) {
  return guarded([&] {
    require(dataset && input_path && split && out, "arguments");
    auto source = source_from_string(dataset);
    auto sp = split_from_string(split);
    if (!source) fail(ErrorCode::kInvalidArgument, "unknown dataset " + std::string(dataset));
    if (!sp) fail(ErrorCode::kInvalidArgument, "unknown split " + std::string(split));
    IngestResult r = *source == Source::kGsm8k ? load_gsm8k(input_path, *sp) : load_math(input_path, *sp);
    ordered_json report;
    report["records"] = r.records;
    report["ingested"] = r.problems.size();
    ordered_json issues = ordered_json::array();
    for (const auto& i : r.issues) {
      issues.push_back({{"line", i.line}, {"record_id", i.record_id}, {"message", i.message}});
    }
    report["issues"] = issues;
    auto corpus = std::make_unique<mathaug_corpus>(std::move(r.problems));
    set_out(report_json, report.dump());
    *out = corpus.release();
  });
}

mathaug_status mathaug_corpus_open(const char* const* paths, size_t n, mathaug_corpus** out) {
  return guarded([&] {
    require(paths && out, "arguments");
    if (n == 0) fail(ErrorCode::kInvalidArgument, "no corpus files given");
    std::vector<Problem> all;
    std::unordered_set<std::string> ids;
    for (size_t i = 0; i < n; ++i) {
      require(paths[i], "corpus path");
      for (auto& p : load_corpus(paths[i])) {
        if (!ids.insert(p.id).second) {
          fail(ErrorCode::kParse, "duplicate problem id " + p.id + " across corpus files");
        }
        all.push_back(std::move(p));
      }
    }
    *out = std::make_unique<mathaug_corpus>(std::move(all)).release();
  });
}

mathaug_status mathaug_corpus_save(const mathaug_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus && path, "arguments");
    write_file_atomic(path, corpus_to_jsonl(corpus->problems));
  });
}

size_t mathaug_corpus_size(const mathaug_corpus* corpus) {
  return corpus ? corpus->problems.size() : 0;
}

void mathaug_corpus_free(mathaug_corpus* corpus) { delete corpus; }

mathaug_status mathaug_personas_load(const char* path, uint64_t seed, mathaug_personas** out) {
  return guarded([&] {
    require(path && out, "arguments");
    *out = new mathaug_personas{PersonaStore::load(path, seed)};
  });
}

size_t mathaug_personas_size(const mathaug_personas* personas) {
  return personas ? personas->store.size() : 0;
}

mathaug_status mathaug_personas_sample(const mathaug_personas* personas, const char* problem_id,
                                       size_t n, size_t* ids) {
  return guarded([&] {
    require(personas && problem_id && (ids || n == 0), "arguments");
    auto sample = personas->store.sample_distinct(problem_id, n);
    for (size_t i = 0; i < sample.size(); ++i) ids[i] = sample[i].id;
  });
}

void mathaug_personas_free(mathaug_personas* personas) { delete personas; }

mathaug_status mathaug_gateway_create(const char* config_json, const char* mock_script_path,
                                      mathaug_gateway** out) {
  return guarded([&] {
    require(out, "out");
    GatewayConfig config = gateway_config_from_json(parse_config(config_json));
    auto handle = std::make_unique<mathaug_gateway>();
    std::shared_ptr<Backend> backend;
    if (mock_script_path && *mock_script_path) {
      backend = make_mock_backend(load_mock_script(mock_script_path));
      handle->mock = true;
    } else {
      const char* key = std::getenv(kApiKeyEnv);
      if (!key || !*key) {
        fail(ErrorCode::kAuth, std::string("environment variable ") + kApiKeyEnv + " is not set");
      }
      backend = make_http_backend(config, key);
    }
    handle->gateway = std::make_unique<Gateway>(config, std::move(backend));
    *out = handle.release();
  });
}

void mathaug_gateway_free(mathaug_gateway* gateway) { delete gateway; }

mathaug_status mathaug_run_stage1(const mathaug_corpus* corpus, const mathaug_personas* personas,
                                  mathaug_gateway* gateway, const char* config_json,
                                  const char* checkpoint_dir, char** summary_json) {
  return guarded([&] {
    require(corpus && personas && gateway && checkpoint_dir, "arguments");
    PipelineConfig config = stage_config(config_json, gateway);
    if (personas->store.seed() != config.seed) {
      fail(ErrorCode::kConfig, "persona store seed differs from the pipeline seed");
    }
    ordered_json cfg = stage_config_json(Stage::kStage1, config, corpus->fingerprint,
                                         personas->store.fingerprint());
    fs::path dir(checkpoint_dir);
    Journal journal = Journal::open(dir, cfg);
    TimestampSource ts = timestamps_for(gateway, journal);
    Stage1Result r = run_stage1(corpus->problems, personas->store, config,
                                RunContext{*gateway->gateway, journal, ts});
    write_file_atomic(dir / "samples.jsonl", samples_to_jsonl(r.samples));
    write_file_atomic(dir / "incorrect.jsonl", incorrect_to_jsonl(r.incorrect));
    ordered_json s = stage_summary(Stage::kStage1, journal, r.samples.size(), r.failures.size(),
                                   r.calls_issued, r.calls_replayed);
    s["problems"] = corpus->problems.size();
    s["correct"] = r.correct_ids.size();
    s["incorrect"] = r.incorrect.size();
    s["failed"] = r.failed_ids.size();
    s["failed_ids"] = r.failed_ids;
    s["samples_path"] = (dir / "samples.jsonl").string();
    s["incorrect_path"] = (dir / "incorrect.jsonl").string();
    s["config"] = cfg;
    write_file_atomic(dir / "summary.json", s.dump(2) + "\n");
    set_out(summary_json, s.dump());
  });
}

mathaug_status mathaug_run_stage2(const mathaug_corpus* corpus, const mathaug_personas* personas,
                                  mathaug_gateway* gateway, const char* config_json,
                                  const char* incorrect_path, const char* checkpoint_dir,
                                  char** summary_json) {
  return guarded([&] {
    require(corpus && personas && gateway && incorrect_path && checkpoint_dir, "arguments");
    PipelineConfig config = stage_config(config_json, gateway);
    if (personas->store.seed() != config.seed) {
      fail(ErrorCode::kConfig, "persona store seed differs from the pipeline seed");
    }
    std::string incorrect_text = read_file(incorrect_path);
    auto incorrect = load_incorrect(incorrect_path);
    ordered_json cfg = stage_config_json(Stage::kStage2, config, corpus->fingerprint,
                                         personas->store.fingerprint());
    cfg["incorrect_sha256"] = sha256_hex(incorrect_text);
    fs::path dir(checkpoint_dir);
    Journal journal = Journal::open(dir, cfg);
    TimestampSource ts = timestamps_for(gateway, journal);
    Stage2Result r = run_stage2(incorrect, corpus->index, personas->store, config,
                                RunContext{*gateway->gateway, journal, ts});
    write_file_atomic(dir / "samples.jsonl", samples_to_jsonl(r.samples));
    ordered_json s = stage_summary(Stage::kStage2, journal, r.samples.size(), r.failures.size(),
                                   r.calls_issued, r.calls_replayed);
    s["cases"] = incorrect.size();
    s["reflected"] = r.reflected_ids.size();
    s["discarded"] = r.discarded_ids.size();
    s["samples_path"] = (dir / "samples.jsonl").string();
    s["config"] = cfg;
    write_file_atomic(dir / "summary.json", s.dump(2) + "\n");
    set_out(summary_json, s.dump());
  });
}

mathaug_status mathaug_assemble(const char* const* stage1_paths, size_t n1,
                                const char* const* stage2_paths, size_t n2,
                                const mathaug_corpus* corpus, const char* out_path,
                                char** report_json, char** table_text) {
  return guarded([&] {
    require(corpus && out_path && (stage1_paths || n1 == 0) && (stage2_paths || n2 == 0),
            "arguments");
    auto s1 = load_all(stage1_paths, n1);
    auto s2 = load_all(stage2_paths, n2);
    for (const auto& s : s1) {
      if (s.stage != Stage::kStage1) fail(ErrorCode::kParse, "stage-2 sample in a stage-1 file");
    }
    for (const auto& s : s2) {
      if (s.stage != Stage::kStage2) fail(ErrorCode::kParse, "stage-1 sample in a stage-2 file");
    }
    AssembledDataset d = assemble_dataset(s1, s2, corpus->index);
    write_file_atomic(out_path, samples_to_jsonl(d.samples));
    set_out(report_json, to_json(d.report).dump());
    set_out(table_text, format_composition_table(d.report));
  });
}

mathaug_status mathaug_diversity(const char* path, char** report_json) {
  return guarded([&] {
    require(path, "path");
    set_out(report_json, to_json(diversity(dataset_questions(read_file(path)))).dump());
  });
}

mathaug_status mathaug_length_histogram(const char* path, size_t bin_width, char** report_json,
                                        char** csv) {
  return guarded([&] {
    require(path, "path");
    auto h = length_histogram(dataset_questions(read_file(path)), bin_width);
    set_out(report_json, to_json(h).dump());
    set_out(csv, histogram_csv(h));
  });
}

mathaug_status mathaug_level_split(const char* journal_path, const mathaug_corpus* corpus,
                                   char** report_json) {
  return guarded([&] {
    require(journal_path && corpus, "arguments");
    auto split = level_split(load_journal_records(journal_path), corpus->index);
    set_out(report_json, to_json(split).dump());
  });
}

mathaug_status mathaug_export_ablation(const char* dataset_path, const char* which,
                                       const char* out_path, size_t* written) {
  return guarded([&] {
    require(dataset_path && which && out_path, "arguments");
    auto set = ablation_from_string(which);
    if (!set) fail(ErrorCode::kInvalidArgument, "unknown ablation set " + std::string(which));
    std::string out = export_ablation(read_file(dataset_path), *set);
    write_file_atomic(out_path, out);
    if (written) {
      *written = 0;
      for (const auto& line : split_lines(out)) {
        if (!trim(line).empty()) ++*written;
      }
    }
  });
}

mathaug_status mathaug_evaluate(const char* predictions_path, const mathaug_corpus* corpus,
                                char** report_json, char** table_text) {
  return guarded([&] {
    require(predictions_path && corpus, "arguments");
    EvalReport r = evaluate(load_predictions(predictions_path), corpus->problems);
    set_out(report_json, to_json(r).dump());
    set_out(table_text, format_eval_table(r));
  });
}

mathaug_status mathaug_predict(const mathaug_corpus* corpus, mathaug_gateway* gateway,
                               int max_tokens, const char* out_path, char** summary_json) {
  return guarded([&] {
    require(corpus && gateway && out_path, "arguments");
    auto preds = generate_predictions(corpus->problems, *gateway->gateway,
                                      max_tokens > 0 ? max_tokens : kDefaultMaxTokens);
    write_file_atomic(out_path, predictions_to_jsonl(preds));
    std::size_t empty = 0;
    for (const auto& p : preds) empty += p.output.empty() ? 1 : 0;
    ordered_json s;
    s["predictions"] = preds.size();
    s["empty_outputs"] = empty;
    set_out(summary_json, s.dump());
  });
}

}  // extern "C"
