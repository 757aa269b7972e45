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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mathaug/answer.hpp"
#include "mathaug/corpus.hpp"
#include "mathaug/gateway.hpp"
#include "mathaug/pipeline.hpp"

namespace mathaug {

struct Prediction {
  std::string problem_id;
  std::string output;
};

std::vector<Prediction> parse_predictions(std::string_view jsonl);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::string predictions_to_jsonl(const std::vector<Prediction>& predictions);

struct GradeResult {
  Verdict verdict = Verdict::kUnparseable;
  std::optional<std::string> extracted;
  bool used_fallback = false;  // no box; last numeric literal was graded
};

// Boxed answer first; without a box, the last standalone numeric literal.
// An empty box is unparseable.
GradeResult grade_prediction(std::string_view output, const CanonicalAnswer& reference);

struct EvalBucket {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unparseable = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  EvalBucket overall;
  std::size_t missing = 0;  // test problems without a prediction (unparseable)
  std::size_t fallback_used = 0;
  std::map<int, EvalBucket> by_level;
  std::map<std::string, EvalBucket> by_subject;
};

// Every prediction must resolve in the corpus and appear at most once
// (Error(kNotFound) / Error(kInvalidArgument)). Missing predictions count as
// unparseable; the denominator is the corpus size.
EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Problem>& corpus);
nlohmann::ordered_json to_json(const EvalReport& report);
std::string format_eval_table(const EvalReport& report);

// One evaluation-prompt call per problem at the evaluation temperature, keyed
// "<id>/eval/0". Failed calls yield an empty output. Output is in corpus order.
std::vector<Prediction> generate_predictions(const std::vector<Problem>& corpus, Gateway& gateway,
                                             int max_tokens = kDefaultMaxTokens);

}  // namespace mathaug
