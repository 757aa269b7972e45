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

#include "mathaug/corpus.hpp"

#include <cstdio>
#include <functional>
#include <unordered_set>
#include <variant>

#include "mathaug/answer.hpp"
#include "mathaug/common.hpp"

namespace mathaug {
namespace {

using nlohmann::json;

std::string make_id(Source source, Split split, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05zu", ordinal);
  return std::string(to_string(source)) + "-" + std::string(to_string(split)) + "-" + buf;
}

const json* string_field(const json& j, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    auto it = j.find(name);
    if (it != j.end() && it->is_string()) return &*it;
  }
  return nullptr;
}

std::optional<int> parse_level(const json& value) {
  if (value.is_number_integer()) return value.get<int>();
  if (value.is_string()) {
    std::string s = trim(value.get<std::string>());
    if (starts_with(s, "Level ")) s = s.substr(6);
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() < 4) {
      return std::stoi(s);
    }
  }
  return std::nullopt;
}

// Per-record conversion; returns an error message instead of a Problem.
using RecordParser = std::function<std::variant<Problem, std::string>(const json&, Problem)>;

IngestResult ingest(std::string_view jsonl, Source source, Split split, const RecordParser& parse) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json record;
    try {
      record = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, "line " + std::to_string(i + 1) + ": malformed JSON: " + e.what());
    }
    if (!record.is_object()) {
      fail(ErrorCode::kParse, "line " + std::to_string(i + 1) + ": record is not a JSON object");
    }
    Problem base;
    base.source = source;
    base.split = split;
    const json* id = string_field(record, {"id"});
    base.id = id ? id->get<std::string>() : make_id(source, split, result.records);
    ++result.records;

    auto parsed = parse(record, base);
    if (auto* msg = std::get_if<std::string>(&parsed)) {
      result.issues.push_back({i + 1, base.id, *msg});
      continue;
    }
    auto& problem = std::get<Problem>(parsed);
    if (!seen.insert(problem.id).second) {
      result.issues.push_back({i + 1, problem.id, "duplicate id"});
      continue;
    }
    result.problems.push_back(std::move(problem));
  }
  if (result.records > 0 &&
      static_cast<double>(result.issues.size()) >
          kMaxIngestFailureRatio * static_cast<double>(result.records)) {
    std::string first = result.issues.front().record_id + ": " + result.issues.front().message;
    fail(ErrorCode::kIngest, std::to_string(result.issues.size()) + " of " +
                                 std::to_string(result.records) +
                                 " records failed ingestion (first: " + first + ")");
  }
  return result;
}

std::optional<std::string> canonical_reference(std::string_view raw) {
  try {
    return normalize_answer(raw).canonical;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(Source source) {
  return source == Source::kGsm8k ? "gsm8k" : "math";
}

std::string_view to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::optional<Source> source_from_string(std::string_view name) {
  std::string lower = to_lower_ascii(name);
  if (lower == "gsm8k") return Source::kGsm8k;
  if (lower == "math") return Source::kMath;
  return std::nullopt;
}

std::optional<Split> split_from_string(std::string_view name) {
  std::string lower = to_lower_ascii(name);
  if (lower == "train") return Split::kTrain;
  if (lower == "test") return Split::kTest;
  return std::nullopt;
}

IngestResult parse_gsm8k(std::string_view jsonl, Split split) {
  return ingest(jsonl, Source::kGsm8k, split,
                [](const json& rec, Problem p) -> std::variant<Problem, std::string> {
                  const json* q = string_field(rec, {"question"});
                  const json* a = string_field(rec, {"answer"});
                  if (!q || trim(q->get<std::string>()).empty()) return "missing question";
                  if (!a) return "missing answer";
                  p.question = q->get<std::string>();
                  p.reference_solution = a->get<std::string>();
                  std::size_t marker = p.reference_solution.rfind("#### ");
                  if (marker == std::string::npos) return "solution has no \"#### \" marker";
                  auto canonical = canonical_reference(p.reference_solution.substr(marker + 5));
                  if (!canonical) return "empty answer after \"#### \" marker";
                  p.reference_answer = *canonical;
                  return p;
                });
}

IngestResult parse_math(std::string_view jsonl, Split split) {
  return ingest(jsonl, Source::kMath, split,
                [](const json& rec, Problem p) -> std::variant<Problem, std::string> {
                  const json* q = string_field(rec, {"problem", "question"});
                  const json* s = string_field(rec, {"solution"});
                  if (!q || trim(q->get<std::string>()).empty()) return "missing problem";
                  if (!s) return "missing solution";
                  p.question = q->get<std::string>();
                  p.reference_solution = s->get<std::string>();
                  if (const json* subject = string_field(rec, {"subject", "type"})) {
                    p.subject = subject->get<std::string>();
                  } else {
                    return "missing subject";
                  }
                  auto it = rec.find("level");
                  if (it == rec.end()) return "missing level";
                  auto level = parse_level(*it);
                  if (!level || *level < 1 || *level > 5) {
                    return "level must be an integer in 1..5, got " + it->dump();
                  }
                  p.level = level;
                  auto boxed = extract_boxed(p.reference_solution);
                  if (!boxed) return "solution has no \\boxed{} answer";
                  auto canonical = canonical_reference(*boxed);
                  if (!canonical) return "empty \\boxed{} answer";
                  p.reference_answer = *canonical;
                  return p;
                });
}

IngestResult load_gsm8k(const std::filesystem::path& path, Split split) {
  return parse_gsm8k(read_file(path), split);
}

IngestResult load_math(const std::filesystem::path& path, Split split) {
  return parse_math(read_file(path), split);
}

nlohmann::ordered_json to_json(const Problem& problem) {
  nlohmann::ordered_json j;
  j["id"] = problem.id;
  j["source"] = to_string(problem.source);
  j["split"] = to_string(problem.split);
  j["question"] = problem.question;
  j["reference_solution"] = problem.reference_solution;
  j["reference_answer"] = problem.reference_answer;
  if (problem.subject) j["subject"] = *problem.subject;
  if (problem.level) j["level"] = *problem.level;
  return j;
}

Problem problem_from_json(const json& j) {
  auto str = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      fail(ErrorCode::kParse, std::string("corpus record missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
  };
  Problem p;
  p.id = str("id");
  auto source = source_from_string(str("source"));
  auto split = split_from_string(str("split"));
  if (!source || !split) fail(ErrorCode::kParse, "corpus record " + p.id + ": bad source/split");
  p.source = *source;
  p.split = *split;
  p.question = str("question");
  p.reference_solution = str("reference_solution");
  p.reference_answer = str("reference_answer");
  if (p.reference_answer.empty()) {
    fail(ErrorCode::kParse, "corpus record " + p.id + ": empty reference_answer");
  }
  if (auto it = j.find("subject"); it != j.end() && it->is_string()) p.subject = it->get<std::string>();
  if (auto it = j.find("level"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int>() < 1 || it->get<int>() > 5) {
      fail(ErrorCode::kParse, "corpus record " + p.id + ": level outside 1..5");
    }
    p.level = it->get<int>();
  }
  return p;
}

std::string corpus_to_jsonl(const std::vector<Problem>& problems) {
  std::string out;
  for (const auto& p : problems) {
    out += to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<Problem> parse_corpus(std::string_view jsonl) {
  std::vector<Problem> problems;
  std::unordered_set<std::string> seen;
  auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, "corpus line " + std::to_string(i + 1) + ": " + e.what());
    }
    Problem p = problem_from_json(j);
    if (!seen.insert(p.id).second) fail(ErrorCode::kParse, "duplicate problem id " + p.id);
    problems.push_back(std::move(p));
  }
  return problems;
}

std::vector<Problem> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path));
}

CorpusIndex::CorpusIndex(const std::vector<Problem>& problems) {
  for (const auto& p : problems) by_id_.emplace(p.id, &p);
}

const Problem* CorpusIndex::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : it->second;
}

const Problem& CorpusIndex::at(std::string_view id) const {
  const Problem* p = find(id);
  if (!p) fail(ErrorCode::kNotFound, "unknown problem id " + std::string(id));
  return *p;
}

}  // namespace mathaug
