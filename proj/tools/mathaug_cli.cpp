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

// mathaug command-line front end. Talks to the library only through the C
// interface in mathaug/mathaug.h.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mathaug/mathaug.h"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Failure {
  mathaug_status status;
  std::string message;
};

void check(mathaug_status status) {
  if (status != MATHAUG_OK) throw Failure{status, mathaug_last_error()};
}

// Owns a char* handed out by the library.
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { mathaug_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct CorpusDeleter {
  void operator()(mathaug_corpus* c) const { mathaug_corpus_free(c); }
};
struct PersonasDeleter {
  void operator()(mathaug_personas* p) const { mathaug_personas_free(p); }
};
struct GatewayDeleter {
  void operator()(mathaug_gateway* g) const { mathaug_gateway_free(g); }
};
using CorpusPtr = std::unique_ptr<mathaug_corpus, CorpusDeleter>;
using PersonasPtr = std::unique_ptr<mathaug_personas, PersonasDeleter>;
using GatewayPtr = std::unique_ptr<mathaug_gateway, GatewayDeleter>;

int level_rank(std::string_view level) {
  if (level == "debug") return 0;
  if (level == "info") return 1;
  if (level == "warn") return 2;
  if (level == "error") return 3;
  return 4;
}

int g_min_rank = 1;

void log_line(const char* level, const std::string& event, ordered_json fields = ordered_json::object()) {
  if (g_min_rank >= 4 || level_rank(level) < g_min_rank) return;
  ordered_json j;
  j["level"] = level;
  j["event"] = event;
  for (auto& [k, v] : fields.items()) j[k] = v;
  std::cerr << j.dump() << '\n';
}

std::string utc_now(bool deterministic) {
  if (deterministic) return "1970-01-01T00:00:00.000Z";
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms % 1000));
  return buf;
}

std::string sha256(const std::string& text) {
  OwnedString out;
  check(mathaug_sha256_hex(text.data(), text.size(), out.out()));
  return out.str();
}

void write_atomic(const std::string& path, const std::string& text) {
  check(mathaug_write_file_atomic(path.c_str(), text.data(), text.size()));
}

CorpusPtr open_corpus(const std::vector<std::string>& paths) {
  std::vector<const char*> raw;
  for (const auto& p : paths) raw.push_back(p.c_str());
  mathaug_corpus* c = nullptr;
  check(mathaug_corpus_open(raw.data(), raw.size(), &c));
  return CorpusPtr(c);
}

struct GatewayOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini-2024-07-18";
  std::size_t concurrency = 4;
  int max_retries = 3;
  int rpm = 0;  // 0 = unlimited
  double timeout = 120;
  std::string mock_script;

  ordered_json to_json() const {
    ordered_json j;
    j["max_concurrency"] = concurrency;
    j["max_retries"] = max_retries;
    j["requests_per_minute"] = rpm > 0 ? ordered_json(rpm) : nullptr;
    j["timeout_seconds"] = timeout;
    j["base_url"] = base_url;
    j["model_name"] = model;
    return j;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--base-url", base_url, "Chat-completions endpoint base URL")->capture_default_str();
    cmd->add_option("--model", model, "Model name sent to the endpoint")->capture_default_str();
    cmd->add_option("--concurrency", concurrency, "Maximum in-flight requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-retries", max_retries, "Retries for transient failures")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--rpm", rpm, "Requests per minute (0 = unlimited)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--timeout", timeout, "Per-request timeout in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--mock-script", mock_script, "Offline scripted backend (JSON)")
        ->check(CLI::ExistingFile);
  }

  GatewayPtr create() const {
    mathaug_gateway* g = nullptr;
    std::string cfg = to_json().dump();
    check(mathaug_gateway_create(cfg.c_str(), mock_script.empty() ? nullptr : mock_script.c_str(), &g));
    return GatewayPtr(g);
  }
};

struct StageOptions {
  std::vector<std::string> corpus;
  std::string personas;
  std::size_t k1 = 5;
  std::size_t k2 = 11;
  std::uint64_t seed = 0;
  int max_retries_unparseable = 1;
  double temperature = 0.7;
  int max_tokens = 2048;
  std::string checkpoint;
  std::string incorrect;
  GatewayOptions gateway;

  void add_to(CLI::App* cmd, bool stage2) {
    cmd->add_option("--corpus", corpus, "Corpus file(s) from `ingest`")->required()->check(CLI::ExistingFile);
    cmd->add_option("--personas", personas, "Persona file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k1", k1, "Persona rewrites per stage-1 question")->capture_default_str();
    cmd->add_option("--k2", k2, "Persona rewrites per stage-2 question")->capture_default_str();
    cmd->add_option("--seed", seed, "Persona sampling seed")->capture_default_str();
    cmd->add_option("--max-retries-unparseable", max_retries_unparseable,
                    "Re-asks for stage-1 answers without a boxed result")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--temperature", temperature, "Sampling temperature")->capture_default_str();
    cmd->add_option("--max-tokens", max_tokens, "Completion token limit")->capture_default_str();
    cmd->add_option("--checkpoint", checkpoint, "Checkpoint directory (resumed when non-empty)")->required();
    if (stage2) {
      cmd->add_option("--incorrect", incorrect, "incorrect.jsonl from stage 1")
          ->required()
          ->check(CLI::ExistingFile);
    }
    gateway.add_to(cmd);
  }

  ordered_json to_json() const {
    ordered_json j;
    j["k1"] = k1;
    j["k2"] = k2;
    j["seed"] = seed;
    j["max_retries_unparseable"] = max_retries_unparseable;
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    return j;
  }
};

class Usage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  ordered_json config;
  std::string started_at;
  ordered_json inputs = ordered_json::object();
  ordered_json outputs = ordered_json::object();
  ordered_json counts = ordered_json::object();

  void write(const std::string& path, bool deterministic) const {
    ordered_json j;
    j["command"] = command;
    j["config_hash"] = sha256(config.dump());
    j["config"] = config;
    j["started_at"] = started_at;
    j["finished_at"] = utc_now(deterministic);
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["counts"] = counts;
    j["library_version"] = mathaug_version();
    write_atomic(path, j.dump(2) + "\n");
  }
};

ordered_json parse_json(const std::string& text) { return ordered_json::parse(text); }

int exit_code_for(mathaug_status status) {
  return status == MATHAUG_E_CONFIG ? kExitUsage : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persona-driven math data augmentation pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  std::string log_level = "info";
  bool deterministic = false;
  std::string manifest_path;
  app.add_option("--log-level", log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}))
      ->capture_default_str();
  app.add_flag("--deterministic", deterministic,
               "Fixed manifest timestamps (implied by --mock-script)");
  app.add_option("--manifest", manifest_path, "Run manifest path (default depends on command)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert a GSM8K or MATH file into a corpus file");
  std::string dataset, input, split = "train", out;
  ingest->add_option("--dataset", dataset, "gsm8k or math")
      ->required()
      ->check(CLI::IsMember({"gsm8k", "math"}));
  ingest->add_option("--input", input, "Source JSON Lines file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--split", split, "train or test")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  ingest->add_option("--out", out, "Corpus output file")->required();

  // stage1 / stage2
  StageOptions s1_opts, s2_opts;
  auto* stage1 = app.add_subcommand("stage1", "Inference and persona rewriting");
  s1_opts.add_to(stage1, false);
  auto* stage2 = app.add_subcommand("stage2", "Reflection on stage-1 failures and persona rewriting");
  s2_opts.add_to(stage2, true);

  // assemble
  auto* assemble = app.add_subcommand("assemble", "Merge stage outputs into the final dataset");
  std::vector<std::string> asm_s1, asm_s2, asm_corpus;
  std::string asm_out, asm_report;
  assemble->add_option("--stage1", asm_s1, "Stage-1 samples.jsonl file(s)")->check(CLI::ExistingFile);
  assemble->add_option("--stage2", asm_s2, "Stage-2 samples.jsonl file(s)")->check(CLI::ExistingFile);
  assemble->add_option("--corpus", asm_corpus, "Corpus file(s) the samples came from")
      ->required()
      ->check(CLI::ExistingFile);
  assemble->add_option("--out", asm_out, "Dataset output file")->required();
  assemble->add_option("--report", asm_report, "Composition report JSON output");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Diversity, length, level and ablation analytics");
  std::string an_input, an_csv, an_journal, an_ablation, an_out, an_report;
  std::vector<std::string> an_compare, an_corpus;
  std::size_t bin_width = 10;
  auto* an_input_opt =
      analyze->add_option("--input", an_input, "Dataset or corpus file")->check(CLI::ExistingFile);
  analyze->add_option("--compare", an_compare, "Two dataset files for a side-by-side diversity report")
      ->expected(2)
      ->check(CLI::ExistingFile)
      ->excludes(an_input_opt);
  analyze->add_option("--bin-width", bin_width, "Length histogram bin width in tokens")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze->add_option("--histogram-csv", an_csv, "Write the length histogram as CSV");
  auto* journal_opt = analyze->add_option("--journal", an_journal, "Stage-1 journal for the level split")
                          ->check(CLI::ExistingFile);
  analyze->add_option("--corpus", an_corpus, "Corpus file(s) for the level split")
      ->check(CLI::ExistingFile)
      ->needs(journal_opt);
  auto* ablation_opt = analyze->add_option("--ablation", an_ablation, "stage1-only or full")
                           ->check(CLI::IsMember({"stage1-only", "full"}))
                           ->needs(an_input_opt);
  analyze->add_option("--out", an_out, "Ablation dataset output")->needs(ablation_opt);
  analyze->add_option("--report", an_report, "Write the JSON report here as well as to stdout");

  // eval
  auto* eval = app.add_subcommand("eval", "Grade predictions against a test corpus");
  std::string ev_predictions, ev_report;
  std::vector<std::string> ev_corpus;
  eval->add_option("--predictions", ev_predictions, "Predictions JSON Lines {problem_id, output}")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--corpus", ev_corpus, "Test corpus file(s)")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", ev_report, "Write the JSON report here as well as to stdout");

  // predict
  auto* predict = app.add_subcommand("predict", "Query the model with the evaluation prompt");
  std::vector<std::string> pr_corpus;
  std::string pr_out;
  int pr_max_tokens = 2048;
  GatewayOptions pr_gateway;
  predict->add_option("--corpus", pr_corpus, "Test corpus file(s)")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", pr_out, "Predictions output file")->required();
  predict->add_option("--max-tokens", pr_max_tokens, "Completion token limit")->capture_default_str();
  pr_gateway.add_to(predict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    check(mathaug_set_log_level(log_level.c_str()));
    g_min_rank = level_rank(log_level);
    Manifest manifest;
    manifest.started_at = utc_now(deterministic);
    std::string default_manifest;

    if (ingest->parsed()) {
      manifest.command = "ingest";
      manifest.config = {{"dataset", dataset}, {"split", split}};
      manifest.inputs["input"] = input;
      mathaug_corpus* raw = nullptr;
      OwnedString report;
      check(mathaug_corpus_ingest(dataset.c_str(), input.c_str(), split.c_str(), &raw, report.out()));
      CorpusPtr corpus(raw);
      check(mathaug_corpus_save(corpus.get(), out.c_str()));
      ordered_json r = parse_json(report.str());
      for (const auto& issue : r["issues"]) log_line("warn", "ingest.record_skipped", issue);
      manifest.outputs["corpus"] = out;
      manifest.counts = {{"records", r["records"]}, {"ingested", r["ingested"]},
                         {"skipped", r["issues"].size()}};
      default_manifest = out + ".manifest.json";
      std::cout << manifest.counts.dump() << '\n';
    } else if (stage1->parsed() || stage2->parsed()) {
      bool is2 = stage2->parsed();
      StageOptions& o = is2 ? s2_opts : s1_opts;
      if (o.k1 < 1) throw Usage("--k1 must be at least 1");
      if (o.k2 <= o.k1) {
        throw Usage("--k2 (" + std::to_string(o.k2) + ") must be greater than --k1 (" +
                    std::to_string(o.k1) + ")");
      }
      if (!o.gateway.mock_script.empty()) deterministic = true;
      manifest.started_at = utc_now(deterministic);
      manifest.command = is2 ? "stage2" : "stage1";
      manifest.config = o.to_json();
      manifest.config["gateway"] = o.gateway.to_json();
      manifest.config["mock"] = !o.gateway.mock_script.empty();
      manifest.inputs = {{"corpus", o.corpus}, {"personas", o.personas}};
      if (is2) manifest.inputs["incorrect"] = o.incorrect;
      if (!o.gateway.mock_script.empty()) manifest.inputs["mock_script"] = o.gateway.mock_script;

      CorpusPtr corpus = open_corpus(o.corpus);
      mathaug_personas* rawp = nullptr;
      check(mathaug_personas_load(o.personas.c_str(), o.seed, &rawp));
      PersonasPtr personas(rawp);
      GatewayPtr gateway = o.gateway.create();
      std::string cfg = o.to_json().dump();
      OwnedString summary;
      if (is2) {
        check(mathaug_run_stage2(corpus.get(), personas.get(), gateway.get(), cfg.c_str(),
                                 o.incorrect.c_str(), o.checkpoint.c_str(), summary.out()));
      } else {
        check(mathaug_run_stage1(corpus.get(), personas.get(), gateway.get(), cfg.c_str(),
                                 o.checkpoint.c_str(), summary.out()));
      }
      ordered_json s = parse_json(summary.str());
      manifest.outputs["checkpoint"] = o.checkpoint;
      manifest.outputs["samples"] = s["samples_path"];
      if (!is2) manifest.outputs["incorrect"] = s["incorrect_path"];
      manifest.config["journal_config_hash"] = s["config_hash"];
      s.erase("config");
      manifest.counts = s;
      for (const char* key : {"samples_path", "incorrect_path", "config_hash"}) manifest.counts.erase(key);
      if (s["failed_calls"].get<std::size_t>() > 0) {
        log_line("warn", "stage.failures", {{"failed_calls", s["failed_calls"]},
                                            {"see", (fs::path(o.checkpoint) / "failures.jsonl").string()}});
      }
      default_manifest = (fs::path(o.checkpoint) / "manifest.json").string();
      std::cout << s.dump() << '\n';
    } else if (assemble->parsed()) {
      if (asm_s1.empty() && asm_s2.empty()) throw Usage("give at least one --stage1 or --stage2 file");
      manifest.command = "assemble";
      manifest.config = ordered_json::object();
      manifest.inputs = {{"stage1", asm_s1}, {"stage2", asm_s2}, {"corpus", asm_corpus}};
      CorpusPtr corpus = open_corpus(asm_corpus);
      std::vector<const char*> p1, p2;
      for (const auto& p : asm_s1) p1.push_back(p.c_str());
      for (const auto& p : asm_s2) p2.push_back(p.c_str());
      OwnedString report, table;
      check(mathaug_assemble(p1.data(), p1.size(), p2.data(), p2.size(), corpus.get(),
                             asm_out.c_str(), report.out(), table.out()));
      ordered_json r = parse_json(report.str());
      if (!asm_report.empty()) write_atomic(asm_report, r.dump(2) + "\n");
      manifest.outputs["dataset"] = asm_out;
      if (!asm_report.empty()) manifest.outputs["report"] = asm_report;
      manifest.counts = r;
      default_manifest = asm_out + ".manifest.json";
      std::cout << table.str();
    } else if (analyze->parsed()) {
      manifest.command = "analyze";
      manifest.config = {{"bin_width", bin_width}};
      ordered_json doc = ordered_json::object();
      std::ostringstream text;
      if (!an_compare.empty()) {
        ordered_json cmp = ordered_json::array();
        text << "Diversity comparison\n";
        for (const auto& path : an_compare) {
          OwnedString r;
          check(mathaug_diversity(path.c_str(), r.out()));
          ordered_json d = parse_json(r.str());
          cmp.push_back({{"input", path}, {"diversity", d}});
          text << "  " << path << ": word types " << d["word_types"] << ", tokens "
               << d["total_tokens"] << ", TTR " << d["ttr"] << '\n';
        }
        doc["compare"] = cmp;
        manifest.inputs["compare"] = an_compare;
      }
      if (!an_input.empty()) {
        manifest.inputs["input"] = an_input;
        if (!an_ablation.empty()) {
          if (an_out.empty()) throw Usage("--ablation needs --out");
          std::size_t written = 0;
          check(mathaug_export_ablation(an_input.c_str(), an_ablation.c_str(), an_out.c_str(), &written));
          doc["ablation"] = {{"set", an_ablation}, {"out", an_out}, {"samples", written}};
          manifest.outputs["ablation"] = an_out;
          text << "Ablation " << an_ablation << ": " << written << " samples -> " << an_out << '\n';
        } else {
          OwnedString d, h, csv;
          check(mathaug_diversity(an_input.c_str(), d.out()));
          check(mathaug_length_histogram(an_input.c_str(), bin_width, h.out(), csv.out()));
          doc["diversity"] = parse_json(d.str());
          doc["length_histogram"] = parse_json(h.str());
          if (!an_csv.empty()) {
            write_atomic(an_csv, csv.str());
            manifest.outputs["histogram_csv"] = an_csv;
          }
          text << "Word types " << doc["diversity"]["word_types"] << ", tokens "
               << doc["diversity"]["total_tokens"] << ", TTR " << doc["diversity"]["ttr"] << '\n';
        }
      }
      if (!an_journal.empty()) {
        if (an_corpus.empty()) throw Usage("--journal needs --corpus");
        CorpusPtr corpus = open_corpus(an_corpus);
        OwnedString r;
        check(mathaug_level_split(an_journal.c_str(), corpus.get(), r.out()));
        doc["level_split"] = parse_json(r.str());
        manifest.inputs["journal"] = an_journal;
        manifest.inputs["corpus"] = an_corpus;
        const auto& ls = doc["level_split"];
        text << "Average level: correct " << ls["correct_avg"] << " (n=" << ls["correct_n"]
             << "), incorrect " << ls["incorrect_avg"] << " (n=" << ls["incorrect_n"] << ")\n";
      }
      if (doc.empty()) throw Usage("analyze needs --input, --compare or --journal");
      if (!an_report.empty()) {
        write_atomic(an_report, doc.dump(2) + "\n");
        manifest.outputs["report"] = an_report;
        default_manifest = an_report + ".manifest.json";
      }
      manifest.counts = ordered_json::object();
      std::cerr << text.str();
      std::cout << doc.dump(2) << '\n';
    } else if (eval->parsed()) {
      manifest.command = "eval";
      manifest.config = ordered_json::object();
      manifest.inputs = {{"predictions", ev_predictions}, {"corpus", ev_corpus}};
      CorpusPtr corpus = open_corpus(ev_corpus);
      OwnedString report, table;
      check(mathaug_evaluate(ev_predictions.c_str(), corpus.get(), report.out(), table.out()));
      ordered_json r = parse_json(report.str());
      if (!ev_report.empty()) {
        write_atomic(ev_report, r.dump(2) + "\n");
        manifest.outputs["report"] = ev_report;
        default_manifest = ev_report + ".manifest.json";
      }
      manifest.counts = {{"total", r["overall"]["total"]}, {"correct", r["overall"]["correct"]}, {"accuracy", r["overall"]["accuracy"]}};
      std::cerr << table.str();
      std::cout << r.dump(2) << '\n';
    } else if (predict->parsed()) {
      if (!pr_gateway.mock_script.empty()) deterministic = true;
      manifest.started_at = utc_now(deterministic);
      manifest.command = "predict";
      manifest.config = {{"max_tokens", pr_max_tokens}, {"gateway", pr_gateway.to_json()},
                         {"mock", !pr_gateway.mock_script.empty()}};
      manifest.inputs = {{"corpus", pr_corpus}};
      CorpusPtr corpus = open_corpus(pr_corpus);
      GatewayPtr gateway = pr_gateway.create();
      OwnedString summary;
      check(mathaug_predict(corpus.get(), gateway.get(), pr_max_tokens, pr_out.c_str(), summary.out()));
      manifest.outputs["predictions"] = pr_out;
      manifest.counts = parse_json(summary.str());
      default_manifest = pr_out + ".manifest.json";
      std::cout << manifest.counts.dump() << '\n';
    }

    std::string where = manifest_path.empty() ? default_manifest : manifest_path;
    if (!where.empty()) manifest.write(where, deterministic);
    log_line("info", "cli.done", {{"command", manifest.command}});
    return kExitOk;
  } catch (const Usage& e) {
    log_line("error", "cli.usage", {{"message", e.what()}});
    std::cerr << app.help() << '\n';
    return kExitUsage;
  } catch (const Failure& f) {
    log_line("error", "cli.failed", {{"status", static_cast<int>(f.status)}, {"message", f.message}});
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    log_line("error", "cli.failed", {{"message", e.what()}});
    return kExitRuntime;
  }
}
