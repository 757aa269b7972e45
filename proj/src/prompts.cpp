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

#include "mathaug/prompts.hpp"

#include "mathaug/common.hpp"

namespace mathaug {
namespace {

constexpr std::string_view kInferencePrefix =
    "Please provide a detailed, step-by-step explanation for the following math problem. "
    "At the end of the explanation, present the final answer enclosed in \\boxed{} \n"
    " Math problem: ";

constexpr std::string_view kRewriteHead = "Math problem: ";
constexpr std::string_view kRewriteMiddle =
    " \nPlease rephrase the above math problem with the following persona:\n";

constexpr std::string_view kReflectionHead =
    "The following input consists of a math problem and a corresponding explanation. "
    "However, this explanation is incorrect, please reflect on its errors and then generate "
    "a corrected, detailed, step-by-step explanation for the following math problem. "
    "Divide your response into two parts: Review of Incorrect Explanation and Corrected "
    "Explanation. At the end of the explanation, present the final answer enclosed in "
    "\\boxed{}.\nMath Problem: ";
constexpr std::string_view kReflectionMiddle = "\nIncorrect Explanation: ";

constexpr std::string_view kAlpacaHead =
    "Below is an instruction that describes a task. Write a response that appropriately "
    "completes the request.\n\n### Instruction:\n";
constexpr std::string_view kTrainingTail = "\n\n### Response:";
// U+2019 in "Let’s".
constexpr std::string_view kEvaluationTail = "\n\n### Response: Let\xe2\x80\x99s think step by step.";

void require(std::string_view value, const char* what) {
  if (value.empty()) fail(ErrorCode::kInvalidArgument, std::string(what) + " must be non-empty");
}

std::string concat(std::initializer_list<std::string_view> parts) {
  std::size_t n = 0;
  for (auto p : parts) n += p.size();
  std::string out;
  out.reserve(n);
  for (auto p : parts) out.append(p);
  return out;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kInference: return "inference";
    case PromptKind::kRewrite: return "rewrite";
    case PromptKind::kReflection: return "reflection";
    case PromptKind::kTraining: return "training";
    case PromptKind::kEvaluation: return "evaluation";
  }
  return "unknown";
}

std::optional<PromptKind> prompt_kind_from_string(std::string_view name) {
  for (PromptKind k : {PromptKind::kInference, PromptKind::kRewrite, PromptKind::kReflection,
                       PromptKind::kTraining, PromptKind::kEvaluation}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view inference_prompt_prefix() { return kInferencePrefix; }

std::string inference_prompt(std::string_view question) {
  require(question, "question");
  return concat({kInferencePrefix, question});
}

std::string rewrite_prompt(std::string_view question, std::string_view persona) {
  require(question, "question");
  require(persona, "persona");
  return concat({kRewriteHead, question, kRewriteMiddle, persona});
}

std::string reflection_prompt(std::string_view question, std::string_view incorrect_explanation) {
  require(question, "question");
  require(incorrect_explanation, "incorrect explanation");
  return concat({kReflectionHead, question, kReflectionMiddle, incorrect_explanation});
}

std::string training_prompt(std::string_view instruction) {
  require(instruction, "instruction");
  return concat({kAlpacaHead, instruction, kTrainingTail});
}

std::string evaluation_prompt(std::string_view instruction) {
  require(instruction, "instruction");
  return concat({kAlpacaHead, instruction, kEvaluationTail});
}

}  // namespace mathaug
