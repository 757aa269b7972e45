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

#include "mathaug/pipeline.hpp"

#include <functional>

#include "mathaug/answer.hpp"
#include "mathaug/log.hpp"
#include "mathaug/prompts.hpp"

namespace mathaug {
namespace {

struct Grade {
  std::optional<std::string> extracted;
  Verdict verdict = Verdict::kNotGraded;
};

Grade grade_solution(std::string_view solution, const std::string& reference) {
  Grade g;
  g.extracted = extract_boxed(solution);
  if (!g.extracted) {
    g.verdict = Verdict::kUnparseable;
    return g;
  }
  try {
    auto got = normalize_answer(*g.extracted);
    auto want = normalize_answer(reference);
    g.verdict = answers_equivalent(got, want) ? Verdict::kCorrect : Verdict::kIncorrect;
  } catch (const Error&) {
    g.verdict = Verdict::kUnparseable;
  }
  return g;
}

Grade grade_reflection(std::string_view response, const std::string& reference) {
  auto parts = try_split_reflection(response);
  if (!parts) return Grade{std::nullopt, Verdict::kUnparseable};
  return grade_solution(parts->corrected, reference);
}

struct Call {
  std::string key;
  std::string problem_id;
  Phase phase = Phase::kS1Inference;
  std::optional<std::size_t> persona_id;
  std::string prompt;
  // Empty for rewrites (not graded).
  std::function<Grade(std::string_view)> grade;
};

struct WaveStats {
  std::size_t issued = 0;
  std::size_t replayed = 0;
};

// Runs one batch of independent calls. Results already in the journal are
// replayed; the rest go through the gateway. New records are journaled in
// call order regardless of completion order, so the journal is deterministic
// for a deterministic backend. Returns one entry per call; absent means the
// call failed.
std::vector<std::optional<GenerationRecord>> run_wave(const std::vector<Call>& calls,
                                                      const PipelineConfig& config,
                                                      RunContext& ctx,
                                                      std::vector<CallFailure>& failures,
                                                      WaveStats& stats) {
  std::vector<std::optional<GenerationRecord>> out(calls.size());
  std::vector<bool> done(calls.size(), false);
  std::vector<std::size_t> pending;
  std::vector<CompletionRequest> requests;

  for (std::size_t i = 0; i < calls.size(); ++i) {
    if (const GenerationRecord* prior = ctx.journal.find(calls[i].key)) {
      if (prior->prompt != calls[i].prompt) {
        fail(ErrorCode::kJournalMismatch,
             "journal belongs to a different run (prompt changed for " + calls[i].key + ")");
      }
      out[i] = *prior;
      done[i] = true;
      ++stats.replayed;
      continue;
    }
    pending.push_back(i);
    CompletionRequest req;
    req.prompt = calls[i].prompt;
    req.temperature = config.temperature;
    req.max_tokens = config.max_tokens;
    req.request_key = calls[i].key;
    requests.push_back(std::move(req));
  }

  // Slots for pending calls, flushed to the journal in order.
  std::vector<std::optional<CompletionOutcome>> arrived(pending.size());
  std::size_t next_flush = 0;

  auto flush = [&] {
    while (next_flush < pending.size() && arrived[next_flush]) {
      std::size_t i = pending[next_flush];
      const Call& call = calls[i];
      auto& outcome = *arrived[next_flush];
      if (auto* result = std::get_if<CompletionResult>(&outcome)) {
        GenerationRecord rec;
        rec.request_key = call.key;
        rec.problem_id = call.problem_id;
        rec.phase = call.phase;
        rec.persona_id = call.persona_id;
        rec.prompt = call.prompt;
        rec.response = std::move(result->text);
        if (call.grade) {
          Grade g = call.grade(rec.response);
          rec.extracted = std::move(g.extracted);
          rec.verdict = g.verdict;
        }
        rec.timestamp = ctx.timestamps.next();
        ctx.journal.append(rec);
        out[i] = std::move(rec);
      } else {
        auto& f = std::get<GatewayFailure>(outcome);
        CallFailure failure{call.key, call.problem_id, call.phase, f.code, f.message, f.attempts};
        log_event(LogLevel::kWarn, "pipeline.call_failed",
                  {{"request_key", call.key}, {"message", f.message}, {"attempts", f.attempts}});
        ctx.journal.append_failure(failure);
        failures.push_back(std::move(failure));
      }
      arrived[next_flush].reset();
      done[i] = true;
      ++next_flush;
    }
  };

  ctx.gateway.complete_batch(requests, [&](std::size_t j, CompletionOutcome outcome) {
    arrived[j] = std::move(outcome);
    flush();
  });
  stats.issued += pending.size();
  return out;
}

std::string trimmed_rewrite(const std::optional<GenerationRecord>& rec) {
  return rec ? trim(rec->response) : std::string();
}

}  // namespace

std::string request_key(std::string_view problem_id, Phase phase, std::size_t ordinal) {
  return std::string(problem_id) + "/" + std::string(to_string(phase)) + "/" +
         std::to_string(ordinal);
}

Stage1Result run_stage1(const std::vector<Problem>& corpus, const PersonaStore& store,
                        const PipelineConfig& config, RunContext ctx) {
  config.validate();
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "corpus is empty");
  if (config.k1 > store.size()) {
    fail(ErrorCode::kConfig, "k1 (" + std::to_string(config.k1) + ") exceeds persona store size (" +
                                 std::to_string(store.size()) + ")");
  }
  Stage1Result result;
  WaveStats stats;

  // Inference, with re-asks for unparseable answers.
  struct InferenceState {
    std::optional<GenerationRecord> last;
    bool failed = false;
  };
  std::vector<InferenceState> inference(corpus.size());
  std::vector<std::size_t> to_ask(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) to_ask[i] = i;

  for (int attempt = 0; attempt <= config.max_retries_unparseable && !to_ask.empty(); ++attempt) {
    std::vector<Call> calls;
    for (std::size_t i : to_ask) {
      const Problem& p = corpus[i];
      calls.push_back({request_key(p.id, Phase::kS1Inference, static_cast<std::size_t>(attempt)),
                       p.id, Phase::kS1Inference, std::nullopt, inference_prompt(p.question),
                       [&p](std::string_view r) { return grade_solution(r, p.reference_answer); }});
    }
    auto records = run_wave(calls, config, ctx, result.failures, stats);
    std::vector<std::size_t> again;
    for (std::size_t c = 0; c < to_ask.size(); ++c) {
      InferenceState& st = inference[to_ask[c]];
      if (!records[c]) {
        st.failed = true;
        continue;
      }
      st.last = std::move(records[c]);
      if (st.last->verdict == Verdict::kUnparseable) again.push_back(to_ask[c]);
    }
    to_ask = std::move(again);
  }

  std::vector<std::size_t> correct;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const InferenceState& st = inference[i];
    if (st.failed) {
      result.failed_ids.push_back(corpus[i].id);
    } else if (st.last->verdict == Verdict::kCorrect) {
      correct.push_back(i);
      result.correct_ids.push_back(corpus[i].id);
    } else {
      // Incorrect, or still unparseable after every re-ask.
      result.incorrect.push_back({corpus[i].id, st.last->response});
    }
  }

  // Persona rewrites of the correctly answered questions.
  std::vector<Call> rewrite_calls;
  for (std::size_t i : correct) {
    const Problem& p = corpus[i];
    auto personas = store.sample_distinct(p.id, config.k1);
    for (std::size_t s = 0; s < personas.size(); ++s) {
      rewrite_calls.push_back({request_key(p.id, Phase::kS1Rewrite, s), p.id, Phase::kS1Rewrite,
                               personas[s].id, rewrite_prompt(p.question, personas[s].description),
                               nullptr});
    }
  }
  auto rewrites = run_wave(rewrite_calls, config, ctx, result.failures, stats);

  // Solve each rewritten question; grade against the original reference.
  std::vector<Call> solve_calls;
  std::vector<std::size_t> solve_source;  // index into rewrite_calls
  CorpusIndex index(corpus);
  for (std::size_t r = 0; r < rewrite_calls.size(); ++r) {
    std::string question = trimmed_rewrite(rewrites[r]);
    if (question.empty()) continue;
    const Problem& p = index.at(rewrite_calls[r].problem_id);
    std::size_t slot = r % config.k1;
    solve_calls.push_back({request_key(p.id, Phase::kS1RewriteSolve, slot), p.id,
                           Phase::kS1RewriteSolve, rewrite_calls[r].persona_id,
                           inference_prompt(question),
                           [&p](std::string_view resp) { return grade_solution(resp, p.reference_answer); }});
    solve_source.push_back(r);
  }
  auto solves = run_wave(solve_calls, config, ctx, result.failures, stats);

  // Samples in corpus order: the inference sample, then accepted rewrites.
  std::vector<std::vector<std::size_t>> accepted(corpus.size());
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < corpus.size(); ++i) position[corpus[i].id] = i;
  for (std::size_t s = 0; s < solve_calls.size(); ++s) {
    if (solves[s] && solves[s]->verdict == Verdict::kCorrect) {
      accepted[position[solve_calls[s].problem_id]].push_back(s);
    }
  }
  for (std::size_t i : correct) {
    const Problem& p = corpus[i];
    result.samples.push_back({p.question, inference[i].last->response, Stage::kStage1,
                              SamplePhase::kInference, p.id, std::nullopt, p.source});
    for (std::size_t s : accepted[i]) {
      result.samples.push_back({trimmed_rewrite(rewrites[solve_source[s]]), solves[s]->response,
                                Stage::kStage1, SamplePhase::kRewrite, p.id,
                                solve_calls[s].persona_id, p.source});
    }
  }

  result.calls_issued = stats.issued;
  result.calls_replayed = stats.replayed;
  log_event(LogLevel::kInfo, "stage1.done",
            {{"problems", corpus.size()},
             {"correct", result.correct_ids.size()},
             {"incorrect", result.incorrect.size()},
             {"failed", result.failed_ids.size()},
             {"samples", result.samples.size()},
             {"calls_issued", stats.issued},
             {"calls_replayed", stats.replayed}});
  return result;
}

Stage2Result run_stage2(const std::vector<IncorrectCase>& incorrect, const CorpusIndex& corpus,
                        const PersonaStore& store, const PipelineConfig& config, RunContext ctx) {
  config.validate();
  if (config.k2 > store.size()) {
    fail(ErrorCode::kConfig, "k2 (" + std::to_string(config.k2) + ") exceeds persona store size (" +
                                 std::to_string(store.size()) + ")");
  }
  for (const auto& c : incorrect) {
    if (!corpus.find(c.problem_id)) {
      fail(ErrorCode::kNotFound, "incorrect case refers to unknown problem " + c.problem_id);
    }
    if (c.incorrect_solution.empty()) {
      fail(ErrorCode::kInvalidArgument, "incorrect case " + c.problem_id + " has no solution");
    }
  }
  Stage2Result result;
  WaveStats stats;

  std::vector<Call> reflect_calls;
  for (const auto& c : incorrect) {
    const Problem& p = corpus.at(c.problem_id);
    reflect_calls.push_back({request_key(p.id, Phase::kS2Reflect, 0), p.id, Phase::kS2Reflect,
                             std::nullopt, reflection_prompt(p.question, c.incorrect_solution),
                             [&p](std::string_view r) { return grade_reflection(r, p.reference_answer); }});
  }
  auto reflections = run_wave(reflect_calls, config, ctx, result.failures, stats);

  std::vector<std::size_t> kept;  // indexes into `incorrect`
  for (std::size_t c = 0; c < incorrect.size(); ++c) {
    if (reflections[c] && reflections[c]->verdict == Verdict::kCorrect) {
      kept.push_back(c);
      result.reflected_ids.push_back(incorrect[c].problem_id);
    } else {
      result.discarded_ids.push_back(incorrect[c].problem_id);
    }
  }

  std::vector<Call> rewrite_calls;
  for (std::size_t c : kept) {
    const Problem& p = corpus.at(incorrect[c].problem_id);
    auto personas = store.sample_distinct(p.id, config.k2);
    for (std::size_t s = 0; s < personas.size(); ++s) {
      rewrite_calls.push_back({request_key(p.id, Phase::kS2Rewrite, s), p.id, Phase::kS2Rewrite,
                               personas[s].id, rewrite_prompt(p.question, personas[s].description),
                               nullptr});
    }
  }
  auto rewrites = run_wave(rewrite_calls, config, ctx, result.failures, stats);

  // Rewritten questions reuse the original wrong solution.
  std::vector<Call> reflect_rewrite_calls;
  std::vector<std::size_t> source_rewrite;
  std::unordered_map<std::string, std::size_t> case_of;
  for (std::size_t c : kept) case_of[incorrect[c].problem_id] = c;
  for (std::size_t r = 0; r < rewrite_calls.size(); ++r) {
    std::string question = trimmed_rewrite(rewrites[r]);
    if (question.empty()) continue;
    const Problem& p = corpus.at(rewrite_calls[r].problem_id);
    const IncorrectCase& ic = incorrect[case_of.at(p.id)];
    std::size_t slot = r % config.k2;
    reflect_rewrite_calls.push_back(
        {request_key(p.id, Phase::kS2RewriteReflect, slot), p.id, Phase::kS2RewriteReflect,
         rewrite_calls[r].persona_id, reflection_prompt(question, ic.incorrect_solution),
         [&p](std::string_view resp) { return grade_reflection(resp, p.reference_answer); }});
    source_rewrite.push_back(r);
  }
  auto reflected_rewrites = run_wave(reflect_rewrite_calls, config, ctx, result.failures, stats);

  std::unordered_map<std::string, std::vector<std::size_t>> accepted;
  for (std::size_t s = 0; s < reflect_rewrite_calls.size(); ++s) {
    if (reflected_rewrites[s] && reflected_rewrites[s]->verdict == Verdict::kCorrect) {
      accepted[reflect_rewrite_calls[s].problem_id].push_back(s);
    }
  }
  for (std::size_t c : kept) {
    const Problem& p = corpus.at(incorrect[c].problem_id);
    auto parts = split_reflection(reflections[c]->response);
    result.samples.push_back({p.question, parts.corrected, Stage::kStage2,
                              SamplePhase::kReflection, p.id, std::nullopt, p.source});
    for (std::size_t s : accepted[p.id]) {
      auto rp = split_reflection(reflected_rewrites[s]->response);
      result.samples.push_back({trimmed_rewrite(rewrites[source_rewrite[s]]), rp.corrected,
                                Stage::kStage2, SamplePhase::kReflectionRewrite, p.id,
                                reflect_rewrite_calls[s].persona_id, p.source});
    }
  }

  result.calls_issued = stats.issued;
  result.calls_replayed = stats.replayed;
  log_event(LogLevel::kInfo, "stage2.done",
            {{"cases", incorrect.size()},
             {"reflected", result.reflected_ids.size()},
             {"discarded", result.discarded_ids.size()},
             {"samples", result.samples.size()},
             {"calls_issued", stats.issued},
             {"calls_replayed", stats.replayed}});
  return result;
}

nlohmann::ordered_json stage_config_json(Stage stage, const PipelineConfig& config,
                                         const std::string& corpus_fingerprint,
                                         const std::string& persona_fingerprint) {
  nlohmann::ordered_json j;
  j["stage"] = to_string(stage);
  j["k1"] = config.k1;
  j["k2"] = config.k2;
  j["seed"] = config.seed;
  j["max_retries_unparseable"] = config.max_retries_unparseable;
  j["temperature"] = config.temperature;
  j["max_tokens"] = config.max_tokens;
  j["model_name"] = config.gateway.model_name;
  j["corpus_sha256"] = corpus_fingerprint;
  j["personas_sha256"] = persona_fingerprint;
  return j;
}

}  // namespace mathaug
