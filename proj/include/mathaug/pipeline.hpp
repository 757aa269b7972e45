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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mathaug/corpus.hpp"
#include "mathaug/gateway.hpp"
#include "mathaug/personas.hpp"

namespace mathaug {

enum class Phase {
  kS1Inference,
  kS1Rewrite,
  kS1RewriteSolve,
  kS2Reflect,
  kS2Rewrite,
  kS2RewriteReflect,
};

enum class Verdict { kCorrect, kIncorrect, kUnparseable, kNotGraded };
enum class Stage { kStage1, kStage2 };
enum class SamplePhase { kInference, kRewrite, kReflection, kReflectionRewrite };

std::string_view to_string(Phase phase);
std::string_view to_string(Verdict verdict);
std::string_view to_string(Stage stage);
std::string_view to_string(SamplePhase phase);
std::optional<Phase> phase_from_string(std::string_view name);
std::optional<Verdict> verdict_from_string(std::string_view name);
std::optional<Stage> stage_from_string(std::string_view name);
std::optional<SamplePhase> sample_phase_from_string(std::string_view name);
Stage stage_of(SamplePhase phase);

inline constexpr std::size_t kDefaultK1 = 5;
inline constexpr std::size_t kDefaultK2 = 11;

struct PipelineConfig {
  std::size_t k1 = kDefaultK1;
  std::size_t k2 = kDefaultK2;
  std::uint64_t seed = 0;
  int max_retries_unparseable = 1;
  double temperature = kGenerationTemperature;
  int max_tokens = kDefaultMaxTokens;
  GatewayConfig gateway;

  // k1 >= 1 and k2 > k1. Throws Error(kConfig).
  void validate() const;
};

// Reads k1, k2, seed, max_retries_unparseable, temperature, max_tokens and an
// optional "gateway" object. Missing keys keep defaults; the result is
// validated.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

/// Outcome of one completed LLM call, as journaled.
struct GenerationRecord {
  std::string request_key;
  std::string problem_id;
  Phase phase = Phase::kS1Inference;
  std::optional<std::size_t> persona_id;
  std::string prompt;
  std::string response;
  std::optional<std::string> extracted;
  Verdict verdict = Verdict::kNotGraded;
  std::string timestamp;
};

nlohmann::ordered_json to_json(const GenerationRecord& record);
GenerationRecord record_from_json(const nlohmann::json& j);

/// One (instruction, response) pair for the output dataset.
struct AugmentedSample {
  std::string instruction;
  std::string response;
  Stage stage = Stage::kStage1;
  SamplePhase phase = SamplePhase::kInference;
  std::string original_problem_id;
  std::optional<std::size_t> persona_id;
  Source source = Source::kGsm8k;
};

nlohmann::ordered_json to_json(const AugmentedSample& sample);
AugmentedSample sample_from_json(const nlohmann::json& j);
std::string samples_to_jsonl(const std::vector<AugmentedSample>& samples);
std::vector<AugmentedSample> parse_samples(std::string_view jsonl);
std::vector<AugmentedSample> load_samples(const std::filesystem::path& path);

/// A Stage-1 question the model got wrong, with its verbatim wrong solution.
struct IncorrectCase {
  std::string problem_id;
  std::string incorrect_solution;
};

std::string incorrect_to_jsonl(const std::vector<IncorrectCase>& cases);
std::vector<IncorrectCase> load_incorrect(const std::filesystem::path& path);

struct CallFailure {
  std::string request_key;
  std::string problem_id;
  Phase phase = Phase::kS1Inference;
  ErrorCode code = ErrorCode::kExhaustedRetries;
  std::string message;
  int attempts = 0;
};

nlohmann::ordered_json to_json(const CallFailure& failure);

/// Append-only checkpoint journal.
///
/// Directory layout: config.json (effective config + its hash), journal.jsonl
/// (one fsync-ed GenerationRecord per completed call), failures.jsonl (calls
/// that failed in the latest run). Opening a non-empty directory resumes it;
/// the stored hash must match the current config.
class Journal {
 public:
  static Journal open(const std::filesystem::path& dir, const nlohmann::ordered_json& config);
  // Nothing touches disk; used by tests and dry runs.
  static Journal in_memory();

  Journal(Journal&&) noexcept;
  Journal& operator=(Journal&&) noexcept;
  ~Journal();

  const GenerationRecord* find(const std::string& request_key) const;
  void append(const GenerationRecord& record);
  void append_failure(const CallFailure& failure);

  bool resumed() const { return resumed_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<GenerationRecord>& records() const { return records_; }
  const std::string& config_hash() const { return config_hash_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  Journal() = default;

  std::filesystem::path dir_;
  int journal_fd_ = -1;
  int failures_fd_ = -1;
  bool resumed_ = false;
  std::string config_hash_;
  std::vector<GenerationRecord> records_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

std::string config_hash(const nlohmann::ordered_json& config);
std::vector<GenerationRecord> load_journal_records(const std::filesystem::path& journal_file);

/// Everything a stage needs besides its inputs.
struct RunContext {
  Gateway& gateway;
  Journal& journal;
  TimestampSource& timestamps;
};

struct Stage1Result {
  std::vector<AugmentedSample> samples;
  std::vector<IncorrectCase> incorrect;
  std::vector<std::string> correct_ids;
  std::vector<std::string> failed_ids;  // inference never completed
  std::vector<CallFailure> failures;
  std::size_t calls_issued = 0;
  std::size_t calls_replayed = 0;
};

struct Stage2Result {
  std::vector<AugmentedSample> samples;
  std::vector<std::string> reflected_ids;  // reflection graded Correct
  std::vector<std::string> discarded_ids;
  std::vector<CallFailure> failures;
  std::size_t calls_issued = 0;
  std::size_t calls_replayed = 0;
};

// Request keys are "<problem id>/<phase>/<ordinal>"; the ordinal is the
// re-ask attempt for inference and the persona slot for rewrites.
std::string request_key(std::string_view problem_id, Phase phase, std::size_t ordinal);

Stage1Result run_stage1(const std::vector<Problem>& corpus, const PersonaStore& store,
                        const PipelineConfig& config, RunContext ctx);

Stage2Result run_stage2(const std::vector<IncorrectCase>& incorrect, const CorpusIndex& corpus,
                        const PersonaStore& store, const PipelineConfig& config, RunContext ctx);

nlohmann::ordered_json stage_config_json(Stage stage, const PipelineConfig& config,
                                         const std::string& corpus_fingerprint,
                                         const std::string& persona_fingerprint);

/// Counts per (source x stage/phase column), the layout of the composition
/// table: stage-1 inference, stage-1 rewrite, stage-2 reflection, stage-2
/// rewrite.
struct CompositionReport {
  std::map<Source, std::array<std::size_t, 4>> counts;
  std::size_t overall = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t lineage_violations = 0;

  std::size_t total(Source source) const;
  std::size_t column_total(SamplePhase phase) const;
};

nlohmann::ordered_json to_json(const CompositionReport& report);
std::string format_composition_table(const CompositionReport& report);

struct AssembledDataset {
  std::vector<AugmentedSample> samples;
  CompositionReport report;
};

/// Concatenates stage-1 then stage-2 samples, keeps the first of each exact
/// (instruction, response) duplicate, and drops samples whose boxed answer is
/// not equivalent to their problem's reference answer (counted as lineage
/// violations).
AssembledDataset assemble_dataset(const std::vector<AugmentedSample>& stage1,
                                  const std::vector<AugmentedSample>& stage2,
                                  const CorpusIndex& corpus);

/// True when the sample's boxed answer matches its problem's reference.
bool lineage_holds(const AugmentedSample& sample, const CorpusIndex& corpus);

}  // namespace mathaug
