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

#include "mathaug/analytics.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <unordered_set>

#include "mathaug/common.hpp"

namespace mathaug {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

std::size_t attempt_of(const std::string& request_key) {
  auto slash = request_key.rfind('/');
  return std::stoul(request_key.substr(slash + 1));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    std::size_t end = i;
    while (start < end && is_punct(text[start])) ++start;
    while (end > start && is_punct(text[end - 1])) --end;
    if (start < end) tokens.push_back(to_lower_ascii(text.substr(start, end - start)));
  }
  return tokens;
}

DiversityReport diversity(const std::vector<std::string>& questions) {
  std::unordered_set<std::string> types;
  DiversityReport r;
  for (const auto& q : questions) {
    for (auto& t : tokenize(q)) {
      types.insert(std::move(t));
      ++r.total_tokens;
    }
  }
  if (r.total_tokens == 0) fail(ErrorCode::kInvalidArgument, "diversity needs at least one token");
  r.word_types = types.size();
  r.ttr = static_cast<double>(r.word_types) / static_cast<double>(r.total_tokens);
  return r;
}

nlohmann::ordered_json to_json(const DiversityReport& report) {
  nlohmann::ordered_json j;
  j["word_types"] = report.word_types;
  j["total_tokens"] = report.total_tokens;
  j["ttr"] = report.ttr;
  j["tokenizer_version"] = kTokenizerVersion;
  return j;
}

double LengthHistogram::area() const {
  double a = 0;
  for (const auto& b : bins) a += b.frequency * static_cast<double>(bin_width);
  return a;
}

LengthHistogram length_histogram(const std::vector<std::string>& questions, std::size_t bin_width) {
  if (bin_width < 1) fail(ErrorCode::kInvalidArgument, "bin width must be >= 1");
  if (questions.empty()) fail(ErrorCode::kInvalidArgument, "length histogram needs questions");
  LengthHistogram h;
  h.bin_width = bin_width;
  h.questions = questions.size();
  std::vector<std::size_t> counts;
  for (const auto& q : questions) {
    std::size_t bin = tokenize(q).size() / bin_width;
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
  double denom = static_cast<double>(questions.size()) * static_cast<double>(bin_width);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    h.bins.push_back({b * bin_width, counts[b], static_cast<double>(counts[b]) / denom});
  }
  return h;
}

nlohmann::ordered_json to_json(const LengthHistogram& histogram) {
  nlohmann::ordered_json j;
  j["bin_width"] = histogram.bin_width;
  j["questions"] = histogram.questions;
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const auto& b : histogram.bins) {
    bins.push_back({{"lower", b.lower}, {"count", b.count}, {"frequency", b.frequency}});
  }
  j["bins"] = bins;
  j["area"] = histogram.area();
  return j;
}

std::string histogram_csv(const LengthHistogram& histogram) {
  std::ostringstream os;
  os.precision(17);
  os << "lower,upper,count,frequency\n";
  for (const auto& b : histogram.bins) {
    os << b.lower << ',' << b.lower + histogram.bin_width << ',' << b.count << ',' << b.frequency
       << '\n';
  }
  return os.str();
}

LevelSplit level_split(const std::vector<GenerationRecord>& records, const CorpusIndex& corpus) {
  std::map<std::string, const GenerationRecord*> last;
  for (const auto& r : records) {
    if (r.phase != Phase::kS1Inference) continue;
    auto& slot = last[r.problem_id];
    if (!slot || attempt_of(r.request_key) > attempt_of(slot->request_key)) slot = &r;
  }
  LevelSplit s;
  long correct_sum = 0;
  long incorrect_sum = 0;
  for (const auto& [id, rec] : last) {
    const Problem* p = corpus.find(id);
    if (!p) fail(ErrorCode::kNotFound, "journal refers to unknown problem " + id);
    if (!p->level) continue;
    if (rec->verdict == Verdict::kCorrect) {
      ++s.correct_n;
      correct_sum += *p->level;
    } else if (rec->verdict == Verdict::kIncorrect || rec->verdict == Verdict::kUnparseable) {
      ++s.incorrect_n;
      incorrect_sum += *p->level;
    }
  }
  if (s.correct_n) s.correct_avg = static_cast<double>(correct_sum) / static_cast<double>(s.correct_n);
  if (s.incorrect_n) {
    s.incorrect_avg = static_cast<double>(incorrect_sum) / static_cast<double>(s.incorrect_n);
  }
  return s;
}

nlohmann::ordered_json to_json(const LevelSplit& split) {
  nlohmann::ordered_json j;
  j["correct_avg"] = split.correct_avg ? nlohmann::ordered_json(*split.correct_avg) : nullptr;
  j["incorrect_avg"] = split.incorrect_avg ? nlohmann::ordered_json(*split.incorrect_avg) : nullptr;
  j["correct_n"] = split.correct_n;
  j["incorrect_n"] = split.incorrect_n;
  return j;
}

std::optional<AblationSet> ablation_from_string(std::string_view name) {
  if (name == "stage1-only") return AblationSet::kStage1Only;
  if (name == "full") return AblationSet::kFull;
  return std::nullopt;
}

std::string export_ablation(std::string_view dataset_jsonl, AblationSet which) {
  std::string out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < dataset_jsonl.size()) {
    std::size_t nl = dataset_jsonl.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? dataset_jsonl.size() : nl + 1;
    std::string_view line = dataset_jsonl.substr(pos, end - pos);
    pos = end;
    ++line_no;
    if (trim(line).empty()) {
      if (which == AblationSet::kFull) out.append(line);
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    auto it = j.find("stage");
    if (it == j.end() || !it->is_string() || !stage_from_string(it->get<std::string>())) {
      fail(ErrorCode::kParse, "dataset line " + std::to_string(line_no) + " has no stage provenance");
    }
    if (which == AblationSet::kFull || it->get<std::string>() == to_string(Stage::kStage1)) {
      out.append(line);
    }
  }
  return out;
}

std::vector<std::string> dataset_questions(std::string_view jsonl) {
  std::vector<std::string> out;
  auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    auto it = j.find("instruction");
    if (it == j.end()) it = j.find("question");
    if (it == j.end() || !it->is_string()) {
      fail(ErrorCode::kParse, "line " + std::to_string(i + 1) + " has no instruction or question");
    }
    out.push_back(it->get<std::string>());
  }
  return out;
}

}  // namespace mathaug
