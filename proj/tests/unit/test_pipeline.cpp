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

#include <fstream>

#include "doctest.h"
#include "mathaug/common.hpp"
#include "mathaug/pipeline.hpp"
#include "mathaug/prompts.hpp"
#include "test_support.hpp"

using namespace mathaug;
using testing_support::TempDir;

namespace {

Problem make_problem(const std::string& id, const std::string& question, const std::string& answer,
                     Source source = Source::kGsm8k) {
  Problem p;
  p.id = id;
  p.source = source;
  p.question = question;
  p.reference_solution = "#### " + answer;
  p.reference_answer = answer;
  return p;
}

PersonaStore personas() { return PersonaStore::parse("a baker\na sailor\na farmer\na poet\n", 3); }

PipelineConfig small_config() {
  PipelineConfig c;
  c.k1 = 2;
  c.k2 = 3;
  c.seed = 3;
  c.gateway.backoff_initial_ms = 1;
  c.gateway.backoff_max_ms = 1;
  return c;
}

struct Harness {
  explicit Harness(MockScript script, const PipelineConfig& cfg = small_config())
      : gateway(cfg.gateway, make_mock_backend(std::move(script)), std::make_shared<VirtualClock>()),
        journal(Journal::in_memory()),
        clock(TimestampSource::deterministic()) {}
  RunContext ctx() { return RunContext{gateway, journal, clock}; }

  Gateway gateway;
  Journal journal;
  TimestampSource clock;
};

// p1 right with both rewrites solved, p2 wrong.
MockScript two_problem_script() {
  MockScript s;
  s.responses["p1/s1-inference/0"] = "2 + 2 = \\boxed{4}";
  s.responses["p1/s1-rewrite/0"] = "A baker has 2 and 2 buns. Total?";
  s.responses["p1/s1-rewrite/1"] = "A sailor has 2 and 2 ropes. Total?";
  s.responses["p1/s1-rewrite-solve/0"] = "\\boxed{4}";
  s.responses["p1/s1-rewrite-solve/1"] = "so \\boxed{4.0}";
  s.responses["p2/s1-inference/0"] = "3 * 3 = \\boxed{6}";
  return s;
}

std::vector<Problem> two_problems() {
  return {make_problem("p1", "What is 2 + 2?", "4"), make_problem("p2", "What is 3 * 3?", "9")};
}

}  // namespace

TEST_CASE("stage 1: two problems give three samples and one incorrect case") {
  Harness h(two_problem_script());
  auto store = personas();
  auto r = run_stage1(two_problems(), store, small_config(), h.ctx());
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[0].phase == SamplePhase::kInference);
  CHECK(r.samples[0].instruction == "What is 2 + 2?");
  CHECK(r.samples[0].response == "2 + 2 = \\boxed{4}");
  CHECK_FALSE(r.samples[0].persona_id.has_value());
  CHECK(r.samples[1].phase == SamplePhase::kRewrite);
  CHECK(r.samples[1].instruction == "A baker has 2 and 2 buns. Total?");
  CHECK(r.samples[1].persona_id.has_value());
  CHECK(r.samples[2].response == "so \\boxed{4.0}");
  REQUIRE(r.incorrect.size() == 1);
  CHECK(r.incorrect[0].problem_id == "p2");
  CHECK(r.incorrect[0].incorrect_solution == "3 * 3 = \\boxed{6}");
  CHECK(r.correct_ids == std::vector<std::string>{"p1"});
  CHECK(r.failed_ids.empty());

  auto expected = store.sample_distinct("p1", 2);
  CHECK(r.samples[1].persona_id.value() == expected[0].id);
  CHECK(r.samples[2].persona_id.value() == expected[1].id);
}

TEST_CASE("stage 1 journal records carry phase, persona and verdict") {
  Harness h(two_problem_script());
  run_stage1(two_problems(), personas(), small_config(), h.ctx());
  const auto* rw = h.journal.find("p1/s1-rewrite/0");
  REQUIRE(rw);
  CHECK(rw->phase == Phase::kS1Rewrite);
  CHECK(rw->verdict == Verdict::kNotGraded);
  CHECK(rw->persona_id.has_value());
  const auto* inf = h.journal.find("p2/s1-inference/0");
  REQUIRE(inf);
  CHECK(inf->verdict == Verdict::kIncorrect);
  CHECK(inf->extracted.value() == "6");
  CHECK(inf->prompt == inference_prompt("What is 3 * 3?"));
}

TEST_CASE("stage 1: mismatching rewrite answer is discarded") {
  auto s = two_problem_script();
  s.responses["p1/s1-rewrite-solve/1"] = "\\boxed{5}";
  Harness h(s);
  auto r = run_stage1(two_problems(), personas(), small_config(), h.ctx());
  CHECK(r.samples.size() == 2);
}

TEST_CASE("stage 1: unparseable inference is re-asked, then classed incorrect") {
  MockScript s;
  s.responses["p/s1-inference/0"] = "I think it is four.";
  s.responses["p/s1-inference/1"] = "Still no box.";
  Harness h(s);
  auto r = run_stage1({make_problem("p", "2+2?", "4")}, personas(), small_config(), h.ctx());
  CHECK(r.samples.empty());
  REQUIRE(r.incorrect.size() == 1);
  CHECK(r.incorrect[0].incorrect_solution == "Still no box.");
}

TEST_CASE("stage 1: failed call leaves the problem in the failed set") {
  MockScript s;
  s.responses["ok/s1-inference/0"] = "\\boxed{1}";
  s.responses["ok/s1-rewrite/0"] = "q0";
  s.responses["ok/s1-rewrite/1"] = "q1";
  s.responses["ok/s1-rewrite-solve/0"] = "\\boxed{1}";
  s.responses["ok/s1-rewrite-solve/1"] = "\\boxed{1}";
  Harness h(s);
  std::vector<Problem> corpus{make_problem("ok", "one?", "1"), make_problem("bad", "two?", "2")};
  auto r = run_stage1(corpus, personas(), small_config(), h.ctx());
  CHECK(r.samples.size() == 3);
  CHECK(r.failed_ids == std::vector<std::string>{"bad"});
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].request_key == "bad/s1-inference/0");
}

TEST_CASE("stage 1: empty corpus and bad k values are errors") {
  Harness h(MockScript{});
  CHECK_THROWS_AS(run_stage1({}, personas(), small_config(), h.ctx()), Error);
  auto cfg = small_config();
  cfg.k2 = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.k1 = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

namespace {

MockScript stage2_script() {
  MockScript s;
  s.responses["p2/s2-reflect/0"] =
      "### Review of Incorrect Explanation:\nWrong product.\n### Corrected Explanation:\n3 * 3 = \\boxed{9}";
  s.responses["p2/s2-rewrite/0"] = "A farmer has 3 rows of 3. Total?";
  s.responses["p2/s2-rewrite/1"] = "A poet writes 3 lines thrice. Total?";
  s.responses["p2/s2-rewrite/2"] = "A baker bakes 3 trays of 3. Total?";
  s.responses["p2/s2-rewrite-reflect/0"] = "Review: off.\n### Corrected Explanation\nSo \\boxed{9}";
  s.responses["p2/s2-rewrite-reflect/1"] = "Review: off.\n### Corrected Explanation\nSo \\boxed{10}";
  s.responses["p2/s2-rewrite-reflect/2"] = "Review: off.\n### Corrected Explanation\nSo \\boxed{9.00}";
  return s;
}

}  // namespace

TEST_CASE("stage 2: reflection plus two accepted rewrites gives three samples") {
  Harness h(stage2_script());
  auto corpus = two_problems();
  CorpusIndex index(corpus);
  std::vector<IncorrectCase> cases{{"p2", "3 * 3 = \\boxed{6}"}};
  auto r = run_stage2(cases, index, personas(), small_config(), h.ctx());
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[0].phase == SamplePhase::kReflection);
  CHECK(r.samples[0].stage == Stage::kStage2);
  CHECK(r.samples[0].instruction == "What is 3 * 3?");
  CHECK(r.samples[0].response == "3 * 3 = \\boxed{9}");
  CHECK(r.samples[1].phase == SamplePhase::kReflectionRewrite);
  CHECK(r.samples[1].instruction == "A farmer has 3 rows of 3. Total?");
  CHECK(r.samples[2].response == "So \\boxed{9.00}");
  CHECK(r.reflected_ids == std::vector<std::string>{"p2"});

  // Rewrite-reflect prompts reuse the original wrong solution.
  const auto* rr = h.journal.find("p2/s2-rewrite-reflect/1");
  REQUIRE(rr);
  CHECK(rr->prompt == reflection_prompt("A poet writes 3 lines thrice. Total?", "3 * 3 = \\boxed{6}"));
}

TEST_CASE("stage 2: missing heading discards the question") {
  auto s = stage2_script();
  s.responses["p2/s2-reflect/0"] = "It should be \\boxed{9}.";
  Harness h(s);
  auto corpus = two_problems();
  CorpusIndex index(corpus);
  auto r = run_stage2({{"p2", "\\boxed{6}"}}, index, personas(), small_config(), h.ctx());
  CHECK(r.samples.empty());
  CHECK(r.discarded_ids == std::vector<std::string>{"p2"});
  CHECK(h.journal.find("p2/s2-rewrite/0") == nullptr);
}

TEST_CASE("stage 2: all rewrites wrong still keeps the reflection") {
  auto s = stage2_script();
  for (int i = 0; i < 3; ++i) {
    s.responses["p2/s2-rewrite-reflect/" + std::to_string(i)] = "### Corrected Explanation\n\\boxed{1}";
  }
  Harness h(s);
  auto corpus = two_problems();
  CorpusIndex index(corpus);
  auto r = run_stage2({{"p2", "\\boxed{6}"}}, index, personas(), small_config(), h.ctx());
  CHECK(r.samples.size() == 1);
}

TEST_CASE("stage 2: unknown case id is an error") {
  Harness h(stage2_script());
  auto corpus = two_problems();
  CorpusIndex index(corpus);
  CHECK_THROWS_AS(run_stage2({{"nope", "x"}}, index, personas(), small_config(), h.ctx()), Error);
}

TEST_CASE("assembly counts, deduplicates and checks lineage") {
  auto corpus = two_problems();
  CorpusIndex index(corpus);
  Harness h1(two_problem_script());
  auto s1 = run_stage1(corpus, personas(), small_config(), h1.ctx());
  Harness h2(stage2_script());
  auto s2 = run_stage2(s1.incorrect, index, personas(), small_config(), h2.ctx());

  auto dup = s1.samples;
  dup.push_back(s1.samples[0]);
  AugmentedSample bad = s1.samples[0];
  bad.response = "\\boxed{5}";
  dup.push_back(bad);
  auto ds = assemble_dataset(dup, s2.samples, index);
  CHECK(ds.samples.size() == 6);
  CHECK(ds.report.duplicates_dropped == 1);
  CHECK(ds.report.lineage_violations == 1);
  CHECK(ds.report.overall == 6);
  const auto& gsm = ds.report.counts.at(Source::kGsm8k);
  CHECK(gsm[0] == 1);
  CHECK(gsm[1] == 2);
  CHECK(gsm[2] == 1);
  CHECK(gsm[3] == 2);
  CHECK(ds.report.total(Source::kGsm8k) == 6);
  CHECK(ds.report.total(Source::kMath) == 0);
  CHECK(ds.report.column_total(SamplePhase::kRewrite) == 2);
  auto table = format_composition_table(ds.report);
  CHECK(table.find("Overall") != std::string::npos);
  CHECK(to_json(ds.report)["overall"] == 6);
}

TEST_CASE("composition additivity") {
  CompositionReport r;
  r.counts[Source::kGsm8k] = {3, 5, 0, 0};
  r.counts[Source::kMath] = {0, 0, 1, 2};
  r.overall = 11;
  CHECK(r.total(Source::kGsm8k) + r.total(Source::kMath) == r.overall);
}

TEST_CASE("sample and record JSON round trip") {
  AugmentedSample s;
  s.instruction = "q";
  s.response = "\\boxed{1}";
  s.stage = Stage::kStage2;
  s.phase = SamplePhase::kReflectionRewrite;
  s.original_problem_id = "p";
  s.persona_id = 7;
  s.source = Source::kMath;
  auto text = samples_to_jsonl({s});
  auto back = parse_samples(text);
  REQUIRE(back.size() == 1);
  CHECK(samples_to_jsonl(back) == text);
  CHECK(request_key("p", Phase::kS2RewriteReflect, 4) == "p/s2-rewrite-reflect/4");
}

namespace {

struct DiskRun {
  std::string samples;
  std::size_t issued;
  std::size_t replayed;
  bool resumed;
};

DiskRun disk_run(const std::filesystem::path& dir, const MockScript& script) {
  auto corpus = two_problems();
  auto store = personas();
  auto cfg = small_config();
  auto config = stage_config_json(Stage::kStage1, cfg, "corpus-fp", store.fingerprint());
  auto journal = Journal::open(dir, config);
  Gateway gateway(cfg.gateway, make_mock_backend(script), std::make_shared<VirtualClock>());
  auto clock = TimestampSource::deterministic(journal.size());
  auto r = run_stage1(corpus, store, cfg, RunContext{gateway, journal, clock});
  return {samples_to_jsonl(r.samples), r.calls_issued, r.calls_replayed, journal.resumed()};
}

}  // namespace

TEST_CASE("resume: finished journal is a no-op") {
  TempDir dir;
  auto first = disk_run(dir.path(), two_problem_script());
  CHECK_FALSE(first.resumed);
  CHECK(first.issued == 6);
  auto journal_bytes = testing_support::slurp(dir / "journal.jsonl");
  auto second = disk_run(dir.path(), MockScript{});
  CHECK(second.resumed);
  CHECK(second.issued == 0);
  CHECK(second.replayed == 6);
  CHECK(second.samples == first.samples);
  CHECK(testing_support::slurp(dir / "journal.jsonl") == journal_bytes);
}

TEST_CASE("resume: truncated journal only re-issues missing calls") {
  TempDir full;
  auto reference = disk_run(full.path(), two_problem_script());
  auto full_journal = testing_support::slurp(full / "journal.jsonl");

  TempDir part;
  disk_run(part.path(), two_problem_script());
  auto lines = split_lines(full_journal);
  std::string kept;
  for (std::size_t i = 0; i < 3; ++i) kept += lines[i] + "\n";
  kept += lines[3].substr(0, lines[3].size() / 2);  // torn write
  testing_support::spit(part / "journal.jsonl", kept);

  auto resumed = disk_run(part.path(), two_problem_script());
  CHECK(resumed.resumed);
  CHECK(resumed.replayed == 3);
  CHECK(resumed.issued == 3);
  CHECK(resumed.samples == reference.samples);
  CHECK(testing_support::slurp(part / "journal.jsonl") == full_journal);
}

TEST_CASE("resume: edited config hash is fatal") {
  TempDir dir;
  disk_run(dir.path(), two_problem_script());
  auto cfg = nlohmann::json::parse(testing_support::slurp(dir / "config.json"));
  cfg["config_hash"] = "0000";
  testing_support::spit(dir / "config.json", cfg.dump());
  try {
    disk_run(dir.path(), two_problem_script());
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kJournalMismatch);
    CHECK(std::string(e.what()).find("journal belongs to a different run") != std::string::npos);
  }
}

TEST_CASE("resume: changed settings are fatal") {
  TempDir dir;
  disk_run(dir.path(), two_problem_script());
  auto cfg = small_config();
  cfg.k1 = 1;
  auto config = stage_config_json(Stage::kStage1, cfg, "corpus-fp", personas().fingerprint());
  CHECK_THROWS_AS(Journal::open(dir.path(), config), Error);
}

TEST_CASE("pipeline config from JSON") {
  auto c = pipeline_config_from_json(nlohmann::json::parse(R"({"k1": 3, "k2": 7, "seed": 9,
      "gateway": {"max_concurrency": 2}})"));
  CHECK(c.k1 == 3);
  CHECK(c.k2 == 7);
  CHECK(c.seed == 9);
  CHECK(c.gateway.max_concurrency == 2);
  CHECK_THROWS_AS(pipeline_config_from_json(nlohmann::json::parse(R"({"k1": 3, "k2": 3})")), Error);
  CHECK_THROWS_AS(pipeline_config_from_json(nlohmann::json::parse(R"({"kk": 1})")), Error);
}
