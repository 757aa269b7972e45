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

#include <optional>
#include <string>
#include <string_view>

namespace mathaug {

enum class PromptKind { kInference, kRewrite, kReflection, kTraining, kEvaluation };

std::string_view to_string(PromptKind kind);
std::optional<PromptKind> prompt_kind_from_string(std::string_view name);

// Each builder throws Error(kInvalidArgument) when a substituted field is
// empty. Substitution is verbatim: no escaping, no trimming.
std::string inference_prompt(std::string_view question);
std::string rewrite_prompt(std::string_view question, std::string_view persona);
std::string reflection_prompt(std::string_view question, std::string_view incorrect_explanation);
std::string training_prompt(std::string_view instruction);
std::string evaluation_prompt(std::string_view instruction);

// Fixed text that precedes the question in inference_prompt.
std::string_view inference_prompt_prefix();

}  // namespace mathaug
