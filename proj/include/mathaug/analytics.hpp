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
#include <vector>

#include "json.hpp"
#include "mathaug/corpus.hpp"
#include "mathaug/pipeline.hpp"

namespace mathaug {

// Lowercase (ASCII), split on whitespace, strip leading/trailing ASCII
// punctuation from each token, drop empty tokens. Version 1 of the rule;
// reports carry the version so a rule change is visible.
inline constexpr int kTokenizerVersion = 1;
std::vector<std::string> tokenize(std::string_view text);

struct DiversityReport {
  std::size_t word_types = 0;
  std::size_t total_tokens = 0;
  double ttr = 0.0;
};

// Throws Error(kInvalidArgument) when no question yields a token.
DiversityReport diversity(const std::vector<std::string>& questions);
nlohmann::ordered_json to_json(const DiversityReport& report);

inline constexpr std::size_t kDefaultBinWidth = 10;

struct HistogramBin {
  std::size_t lower = 0;  // bin covers [lower, lower + width)
  std::size_t count = 0;
  double frequency = 0.0;  // count / (N * width)
};

struct LengthHistogram {
  std::size_t bin_width = kDefaultBinWidth;
  std::size_t questions = 0;
  std::vector<HistogramBin> bins;  // from 0 up to the last non-empty bin

  double area() const;
};

LengthHistogram length_histogram(const std::vector<std::string>& questions, std::size_t bin_width);
nlohmann::ordered_json to_json(const LengthHistogram& histogram);
std::string histogram_csv(const LengthHistogram& histogram);

struct LevelSplit {
  std::optional<double> correct_avg;
  std::optional<double> incorrect_avg;
  std::size_t correct_n = 0;
  std::size_t incorrect_n = 0;
};

// Uses the final S1Inference attempt per problem (the highest re-ask
// ordinal). Unparseable counts as incorrect. Problems without a level are
// skipped.
LevelSplit level_split(const std::vector<GenerationRecord>& records, const CorpusIndex& corpus);
nlohmann::ordered_json to_json(const LevelSplit& split);

enum class AblationSet { kStage1Only, kFull };
std::optional<AblationSet> ablation_from_string(std::string_view name);

// Filters dataset JSON Lines by stage, preserving line order and bytes.
// Throws Error(kParse) for a line without a "stage" field.
std::string export_ablation(std::string_view dataset_jsonl, AblationSet which);

// Questions of a dataset file ("instruction") or corpus file ("question"),
// in file order.
std::vector<std::string> dataset_questions(std::string_view jsonl);

}  // namespace mathaug
