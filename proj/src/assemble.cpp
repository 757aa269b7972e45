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

#include <iomanip>
#include <set>
#include <sstream>

#include "mathaug/answer.hpp"
#include "mathaug/pipeline.hpp"

namespace mathaug {
namespace {

std::size_t column_of(SamplePhase phase) {
  switch (phase) {
    case SamplePhase::kInference: return 0;
    case SamplePhase::kRewrite: return 1;
    case SamplePhase::kReflection: return 2;
    case SamplePhase::kReflectionRewrite: return 3;
  }
  return 0;
}

constexpr Source kSources[] = {Source::kGsm8k, Source::kMath};

}  // namespace

std::size_t CompositionReport::total(Source source) const {
  auto it = counts.find(source);
  if (it == counts.end()) return 0;
  std::size_t sum = 0;
  for (std::size_t c : it->second) sum += c;
  return sum;
}

std::size_t CompositionReport::column_total(SamplePhase phase) const {
  std::size_t sum = 0;
  for (const auto& [source, row] : counts) sum += row[column_of(phase)];
  return sum;
}

bool lineage_holds(const AugmentedSample& sample, const CorpusIndex& corpus) {
  const Problem* problem = corpus.find(sample.original_problem_id);
  if (!problem) return false;
  auto boxed = extract_boxed(sample.response);
  if (!boxed) return false;
  try {
    return answers_equivalent(normalize_answer(*boxed), normalize_answer(problem->reference_answer));
  } catch (const Error&) {
    return false;
  }
}

AssembledDataset assemble_dataset(const std::vector<AugmentedSample>& stage1,
                                  const std::vector<AugmentedSample>& stage2,
                                  const CorpusIndex& corpus) {
  AssembledDataset out;
  for (Source s : kSources) out.report.counts[s] = {0, 0, 0, 0};
  std::set<std::pair<std::string, std::string>> seen;
  auto take = [&](const std::vector<AugmentedSample>& samples) {
    for (const auto& s : samples) {
      if (!seen.emplace(s.instruction, s.response).second) {
        ++out.report.duplicates_dropped;
        continue;
      }
      if (!lineage_holds(s, corpus)) {
        ++out.report.lineage_violations;
        continue;
      }
      ++out.report.counts[s.source][column_of(s.phase)];
      out.samples.push_back(s);
    }
  };
  take(stage1);
  take(stage2);
  out.report.overall = out.samples.size();
  return out;
}

nlohmann::ordered_json to_json(const CompositionReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::object();
  for (const auto& [source, row] : report.counts) {
    nlohmann::ordered_json r;
    r["stage1_inference"] = row[0];
    r["stage1_rewrite"] = row[1];
    r["stage2_reflection"] = row[2];
    r["stage2_rewrite"] = row[3];
    r["total"] = report.total(source);
    rows[std::string(to_string(source))] = r;
  }
  j["sources"] = rows;
  j["overall"] = report.overall;
  j["duplicates_dropped"] = report.duplicates_dropped;
  j["lineage_violations"] = report.lineage_violations;
  return j;
}

std::string format_composition_table(const CompositionReport& report) {
  std::ostringstream os;
  auto row = [&os](const std::string& name, auto a, auto b, auto c, auto d, auto t) {
    os << std::left << std::setw(10) << name << std::right << std::setw(12) << a << std::setw(12)
       << b << std::setw(12) << c << std::setw(12) << d << std::setw(10) << t << '\n';
  };
  os << std::left << std::setw(10) << "" << std::right << std::setw(24) << "Stage 1"
     << std::setw(24) << "Stage 2" << '\n';
  row("Dataset", "Inference", "Rewrite", "Reflection", "Rewrite", "Total");
  for (const auto& [source, r] : report.counts) {
    row(std::string(to_string(source)), r[0], r[1], r[2], r[3], report.total(source));
  }
  row("Overall", report.column_total(SamplePhase::kInference),
      report.column_total(SamplePhase::kRewrite), report.column_total(SamplePhase::kReflection),
      report.column_total(SamplePhase::kReflectionRewrite), report.overall);
  os << "duplicates dropped: " << report.duplicates_dropped
     << ", lineage violations: " << report.lineage_violations << '\n';
  return os.str();
}

}  // namespace mathaug
