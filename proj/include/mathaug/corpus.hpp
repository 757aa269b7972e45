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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace mathaug {

enum class Source { kGsm8k, kMath };
enum class Split { kTrain, kTest };

std::string_view to_string(Source source);
std::string_view to_string(Split split);
std::optional<Source> source_from_string(std::string_view name);
std::optional<Split> split_from_string(std::string_view name);

/// One source math question. `reference_answer` is always the canonical form
/// produced by normalize_answer.
struct Problem {
  std::string id;
  Source source = Source::kGsm8k;
  Split split = Split::kTrain;
  std::string question;
  std::string reference_solution;
  std::string reference_answer;
  std::optional<std::string> subject;
  std::optional<int> level;
};

struct IngestIssue {
  std::size_t line = 0;  // 1-based
  std::string record_id;
  std::string message;
};

struct IngestResult {
  std::vector<Problem> problems;
  std::vector<IngestIssue> issues;
  std::size_t records = 0;
};

// Files where more than this fraction of records fail are rejected outright.
inline constexpr double kMaxIngestFailureRatio = 0.10;

// GSM8K JSON Lines: {"question", "answer"} with the answer after the final
// "#### " marker. Throws Error(kParse) on malformed JSON, Error(kIngest) when
// too many records fail.
IngestResult load_gsm8k(const std::filesystem::path& path, Split split);
IngestResult parse_gsm8k(std::string_view jsonl, Split split);

// MATH JSON Lines: {"problem", "solution", "subject" | "type", "level"}.
IngestResult load_math(const std::filesystem::path& path, Split split);
IngestResult parse_math(std::string_view jsonl, Split split);

nlohmann::ordered_json to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& j);

std::string corpus_to_jsonl(const std::vector<Problem>& problems);
std::vector<Problem> parse_corpus(std::string_view jsonl);
std::vector<Problem> load_corpus(const std::filesystem::path& path);

/// Read-only id lookup over a corpus that outlives the index.
class CorpusIndex {
 public:
  CorpusIndex() = default;
  explicit CorpusIndex(const std::vector<Problem>& problems);

  const Problem* find(std::string_view id) const;
  const Problem& at(std::string_view id) const;
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<std::string, const Problem*> by_id_;
};

}  // namespace mathaug
