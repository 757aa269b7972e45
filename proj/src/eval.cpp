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

#include "mathaug/eval.hpp"

#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mathaug/log.hpp"
#include "mathaug/prompts.hpp"

namespace mathaug {
namespace {

void tally(EvalBucket& b, Verdict v) {
  ++b.total;
  switch (v) {
    case Verdict::kCorrect: ++b.correct; break;
    case Verdict::kIncorrect: ++b.incorrect; break;
    default: ++b.unparseable; break;
  }
}

nlohmann::ordered_json bucket_json(const EvalBucket& b) {
  nlohmann::ordered_json j;
  j["total"] = b.total;
  j["correct"] = b.correct;
  j["incorrect"] = b.incorrect;
  j["unparseable"] = b.unparseable;
  j["accuracy"] = b.accuracy();
  return j;
}

}  // namespace

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "predictions line " + std::to_string(i + 1) + ": " + e.what());
    }
    auto id = j.find("problem_id");
    auto output = j.find("output");
    if (id == j.end() || !id->is_string() || output == j.end() || !output->is_string()) {
      fail(ErrorCode::kParse,
           "predictions line " + std::to_string(i + 1) + " needs string problem_id and output");
    }
    out.push_back({id->get<std::string>(), output->get<std::string>()});
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::string predictions_to_jsonl(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    nlohmann::ordered_json j;
    j["problem_id"] = p.problem_id;
    j["output"] = p.output;
    out += j.dump();
    out += '\n';
  }
  return out;
}

GradeResult grade_prediction(std::string_view output, const CanonicalAnswer& reference) {
  GradeResult g;
  g.extracted = extract_boxed(output);
  if (!g.extracted) {
    g.extracted = last_numeric_literal(output);
    if (!g.extracted) return g;
    g.used_fallback = true;
  }
  if (trim(*g.extracted).empty()) return g;
  try {
    g.verdict = answers_equivalent(normalize_answer(*g.extracted), reference) ? Verdict::kCorrect
                                                                              : Verdict::kIncorrect;
  } catch (const Error&) {
    g.verdict = Verdict::kUnparseable;
  }
  return g;
}

EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Problem>& corpus) {
  CorpusIndex index(corpus);
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!index.find(p.problem_id)) {
      fail(ErrorCode::kNotFound, "prediction for unknown problem " + p.problem_id);
    }
    if (!by_id.emplace(p.problem_id, &p).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate prediction for " + p.problem_id);
    }
  }
  EvalReport report;
  for (const auto& problem : corpus) {
    Verdict v = Verdict::kUnparseable;
    auto it = by_id.find(problem.id);
    if (it == by_id.end()) {
      ++report.missing;
    } else {
      GradeResult g = grade_prediction(it->second->output, normalize_answer(problem.reference_answer));
      v = g.verdict;
      if (g.used_fallback) ++report.fallback_used;
    }
    tally(report.overall, v);
    if (problem.level) tally(report.by_level[*problem.level], v);
    if (problem.subject) tally(report.by_subject[*problem.subject], v);
  }
  return report;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["overall"] = bucket_json(report.overall);
  j["missing"] = report.missing;
  j["fallback_used"] = report.fallback_used;
  nlohmann::ordered_json levels = nlohmann::ordered_json::object();
  for (const auto& [level, b] : report.by_level) levels[std::to_string(level)] = bucket_json(b);
  nlohmann::ordered_json subjects = nlohmann::ordered_json::object();
  for (const auto& [subject, b] : report.by_subject) subjects[subject] = bucket_json(b);
  j["by_level"] = levels;
  j["by_subject"] = subjects;
  return j;
}

std::string format_eval_table(const EvalReport& report) {
  std::ostringstream os;
  auto row = [&os](const std::string& name, const EvalBucket& b) {
    os << std::left << std::setw(28) << name << std::right << std::setw(8) << b.total
       << std::setw(9) << b.correct << std::setw(11) << b.incorrect << std::setw(13)
       << b.unparseable << std::setw(10) << std::fixed << std::setprecision(4) << b.accuracy()
       << '\n';
  };
  os << std::left << std::setw(28) << "Group" << std::right << std::setw(8) << "Total"
     << std::setw(9) << "Correct" << std::setw(11) << "Incorrect" << std::setw(13) << "Unparseable"
     << std::setw(10) << "Accuracy" << '\n';
  row("Overall", report.overall);
  for (const auto& [level, b] : report.by_level) row("level " + std::to_string(level), b);
  for (const auto& [subject, b] : report.by_subject) row(subject, b);
  os << "missing predictions: " << report.missing << ", numeric fallback used: "
     << report.fallback_used << '\n';
  return os.str();
}

std::vector<Prediction> generate_predictions(const std::vector<Problem>& corpus, Gateway& gateway,
                                             int max_tokens) {
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "corpus is empty");
  std::vector<CompletionRequest> requests;
  std::vector<Prediction> out;
  for (const auto& p : corpus) {
    requests.push_back({evaluation_prompt(p.question), kEvaluationTemperature, max_tokens,
                        p.id + "/eval/0"});
    out.push_back({p.id, ""});
  }
  std::size_t failed = 0;
  gateway.complete_batch(requests, [&](std::size_t i, CompletionOutcome outcome) {
    if (auto* r = std::get_if<CompletionResult>(&outcome)) {
      out[i].output = std::move(r->text);
    } else {
      ++failed;
      log_event(LogLevel::kWarn, "predict.call_failed",
                {{"request_key", requests[i].request_key},
                 {"message", std::get<GatewayFailure>(outcome).message}});
    }
  });
  log_event(LogLevel::kInfo, "predict.done", {{"problems", corpus.size()}, {"failed", failed}});
  return out;
}

}  // namespace mathaug
