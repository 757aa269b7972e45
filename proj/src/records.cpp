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

#include <array>

#include "mathaug/common.hpp"
#include "mathaug/pipeline.hpp"

namespace mathaug {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view name) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                         Enum value) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "unknown";
}

constexpr std::array<std::pair<Phase, std::string_view>, 6> kPhases{{
    {Phase::kS1Inference, "s1-inference"},
    {Phase::kS1Rewrite, "s1-rewrite"},
    {Phase::kS1RewriteSolve, "s1-rewrite-solve"},
    {Phase::kS2Reflect, "s2-reflect"},
    {Phase::kS2Rewrite, "s2-rewrite"},
    {Phase::kS2RewriteReflect, "s2-rewrite-reflect"},
}};

constexpr std::array<std::pair<Verdict, std::string_view>, 4> kVerdicts{{
    {Verdict::kCorrect, "correct"},
    {Verdict::kIncorrect, "incorrect"},
    {Verdict::kUnparseable, "unparseable"},
    {Verdict::kNotGraded, "not_graded"},
}};

constexpr std::array<std::pair<Stage, std::string_view>, 2> kStages{{
    {Stage::kStage1, "stage1"},
    {Stage::kStage2, "stage2"},
}};

constexpr std::array<std::pair<SamplePhase, std::string_view>, 4> kSamplePhases{{
    {SamplePhase::kInference, "inference"},
    {SamplePhase::kRewrite, "rewrite"},
    {SamplePhase::kReflection, "reflection"},
    {SamplePhase::kReflectionRewrite, "reflection_rewrite"},
}};

const json& require_field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::kParse, std::string(what) + " missing field \"" + key + "\"");
  return *it;
}

std::string require_string(const json& j, const char* key, const char* what) {
  const json& v = require_field(j, key, what);
  if (!v.is_string()) fail(ErrorCode::kParse, std::string(what) + " field \"" + key + "\" is not a string");
  return v.get<std::string>();
}

std::optional<std::size_t> optional_index(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned() && !it->is_number_integer()) {
    fail(ErrorCode::kParse, std::string("field \"") + key + "\" is not an index");
  }
  return it->get<std::size_t>();
}

template <typename T, typename Parse>
std::vector<T> parse_jsonl(std::string_view text, const char* what, Parse parse) {
  std::vector<T> out;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, std::string(what) + " line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(parse(j));
  }
  return out;
}

}  // namespace

std::string_view to_string(Phase phase) { return name_of(kPhases, phase); }
std::string_view to_string(Verdict verdict) { return name_of(kVerdicts, verdict); }
std::string_view to_string(Stage stage) { return name_of(kStages, stage); }
std::string_view to_string(SamplePhase phase) { return name_of(kSamplePhases, phase); }
std::optional<Phase> phase_from_string(std::string_view n) { return lookup(kPhases, n); }
std::optional<Verdict> verdict_from_string(std::string_view n) { return lookup(kVerdicts, n); }
std::optional<Stage> stage_from_string(std::string_view n) { return lookup(kStages, n); }
std::optional<SamplePhase> sample_phase_from_string(std::string_view n) {
  return lookup(kSamplePhases, n);
}

Stage stage_of(SamplePhase phase) {
  return phase == SamplePhase::kInference || phase == SamplePhase::kRewrite ? Stage::kStage1
                                                                            : Stage::kStage2;
}

void PipelineConfig::validate() const {
  if (k1 < 1) fail(ErrorCode::kConfig, "k1 must be >= 1");
  if (k2 <= k1) {
    fail(ErrorCode::kConfig, "k2 (" + std::to_string(k2) + ") must be greater than k1 (" +
                                 std::to_string(k1) + ")");
  }
  if (max_retries_unparseable < 0) fail(ErrorCode::kConfig, "max_retries_unparseable must be >= 0");
  if (temperature < 0 || temperature > 2) fail(ErrorCode::kConfig, "temperature must lie in [0, 2]");
  if (max_tokens < 1) fail(ErrorCode::kConfig, "max_tokens must be positive");
  gateway.validate();
}

PipelineConfig pipeline_config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfig, "pipeline config must be a JSON object");
  PipelineConfig c;
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "k1") c.k1 = v.get<std::size_t>();
      else if (key == "k2") c.k2 = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "max_retries_unparseable") c.max_retries_unparseable = v.get<int>();
      else if (key == "temperature") c.temperature = v.get<double>();
      else if (key == "max_tokens") c.max_tokens = v.get<int>();
      else if (key == "gateway") c.gateway = gateway_config_from_json(v);
      else fail(ErrorCode::kConfig, "unknown pipeline setting \"" + key + "\"");
    }
  } catch (const json::type_error& e) {
    fail(ErrorCode::kConfig, std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

ordered_json to_json(const GenerationRecord& r) {
  ordered_json j;
  j["request_key"] = r.request_key;
  j["problem_id"] = r.problem_id;
  j["phase"] = to_string(r.phase);
  j["persona_id"] = r.persona_id ? ordered_json(*r.persona_id) : nullptr;
  j["prompt"] = r.prompt;
  j["response"] = r.response;
  j["extracted"] = r.extracted ? ordered_json(*r.extracted) : nullptr;
  j["verdict"] = to_string(r.verdict);
  j["timestamp"] = r.timestamp;
  return j;
}

GenerationRecord record_from_json(const json& j) {
  constexpr const char* what = "journal record";
  GenerationRecord r;
  r.request_key = require_string(j, "request_key", what);
  r.problem_id = require_string(j, "problem_id", what);
  auto phase = phase_from_string(require_string(j, "phase", what));
  auto verdict = verdict_from_string(require_string(j, "verdict", what));
  if (!phase || !verdict) fail(ErrorCode::kParse, "journal record has unknown phase or verdict");
  r.phase = *phase;
  r.verdict = *verdict;
  r.persona_id = optional_index(j, "persona_id");
  r.prompt = require_string(j, "prompt", what);
  r.response = require_string(j, "response", what);
  if (auto it = j.find("extracted"); it != j.end() && it->is_string()) {
    r.extracted = it->get<std::string>();
  }
  r.timestamp = require_string(j, "timestamp", what);
  return r;
}

ordered_json to_json(const AugmentedSample& s) {
  ordered_json j;
  j["instruction"] = s.instruction;
  j["response"] = s.response;
  j["stage"] = to_string(s.stage);
  j["phase"] = to_string(s.phase);
  j["original_problem_id"] = s.original_problem_id;
  j["persona_id"] = s.persona_id ? ordered_json(*s.persona_id) : nullptr;
  j["source"] = to_string(s.source);
  return j;
}

AugmentedSample sample_from_json(const json& j) {
  constexpr const char* what = "dataset sample";
  AugmentedSample s;
  s.instruction = require_string(j, "instruction", what);
  s.response = require_string(j, "response", what);
  auto stage = stage_from_string(require_string(j, "stage", what));
  auto phase = sample_phase_from_string(require_string(j, "phase", what));
  auto source = source_from_string(require_string(j, "source", what));
  if (!stage || !phase || !source) fail(ErrorCode::kParse, "dataset sample has unknown stage/phase/source");
  if (stage_of(*phase) != *stage) fail(ErrorCode::kParse, "dataset sample phase does not belong to its stage");
  s.stage = *stage;
  s.phase = *phase;
  s.source = *source;
  s.original_problem_id = require_string(j, "original_problem_id", what);
  s.persona_id = optional_index(j, "persona_id");
  bool rewritten = s.phase == SamplePhase::kRewrite || s.phase == SamplePhase::kReflectionRewrite;
  if (rewritten && !s.persona_id) fail(ErrorCode::kParse, "rewrite sample without persona_id");
  return s;
}

std::string samples_to_jsonl(const std::vector<AugmentedSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<AugmentedSample> parse_samples(std::string_view jsonl) {
  return parse_jsonl<AugmentedSample>(jsonl, "dataset", sample_from_json);
}

std::vector<AugmentedSample> load_samples(const std::filesystem::path& path) {
  return parse_samples(read_file(path));
}

std::string incorrect_to_jsonl(const std::vector<IncorrectCase>& cases) {
  std::string out;
  for (const auto& c : cases) {
    ordered_json j;
    j["problem_id"] = c.problem_id;
    j["incorrect_solution"] = c.incorrect_solution;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<IncorrectCase> load_incorrect(const std::filesystem::path& path) {
  return parse_jsonl<IncorrectCase>(read_file(path), "incorrect cases", [](const json& j) {
    return IncorrectCase{require_string(j, "problem_id", "incorrect case"),
                         require_string(j, "incorrect_solution", "incorrect case")};
  });
}

ordered_json to_json(const CallFailure& f) {
  ordered_json j;
  j["request_key"] = f.request_key;
  j["problem_id"] = f.problem_id;
  j["phase"] = to_string(f.phase);
  j["error"] = to_string(f.code);
  j["message"] = f.message;
  j["attempts"] = f.attempts;
  return j;
}

}  // namespace mathaug
