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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mathaug/common.hpp"

namespace mathaug {

inline constexpr double kGenerationTemperature = 0.7;
inline constexpr double kEvaluationTemperature = 0.0;
inline constexpr int kDefaultMaxTokens = 2048;
inline constexpr const char* kApiKeyEnv = "MATHAUG_API_KEY";

struct CompletionRequest {
  std::string prompt;
  double temperature = kGenerationTemperature;
  int max_tokens = kDefaultMaxTokens;
  // Problem id + prompt kind + ordinal. Transport retries reuse it.
  std::string request_key;
};

enum class BackendKind { kLive, kMock };

struct CompletionResult {
  std::string request_key;
  std::string text;
  double latency_ms = 0;
  int attempt = 1;
  BackendKind backend = BackendKind::kMock;
};

struct GatewayConfig {
  std::size_t max_concurrency = 4;
  int max_retries = 3;
  std::optional<int> requests_per_minute;
  double timeout_seconds = 120;
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4o-mini-2024-07-18";
  int backoff_initial_ms = 500;
  int backoff_max_ms = 30000;

  // Throws Error(kConfig) on out-of-range values.
  void validate() const;
};

nlohmann::ordered_json to_json(const GatewayConfig& config);
// Missing keys keep their defaults; unknown keys and wrong types are
// Error(kConfig).
GatewayConfig gateway_config_from_json(const nlohmann::json& j);

enum class FailureKind { kTransient, kAuth, kMalformed, kBadRequest };

struct BackendFailure {
  FailureKind kind = FailureKind::kTransient;
  std::string message;
};

using BackendOutcome = std::variant<std::string, BackendFailure>;

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendOutcome call(const CompletionRequest& request,
                              std::chrono::milliseconds timeout) = 0;
  virtual BackendKind kind() const = 0;
};

/// Terminal failure of one logical call. `code` is one of kExhaustedRetries,
/// kAuth, kMalformedResponse, kBadRequest.
struct GatewayFailure {
  std::string request_key;
  ErrorCode code = ErrorCode::kExhaustedRetries;
  std::string message;  // last cause
  int attempts = 0;
};

using CompletionOutcome = std::variant<CompletionResult, GatewayFailure>;

/// Deterministic scripted backend. Lookup order: request key, then
/// "sha256:<hex of prompt>", then the fallback. Without a fallback an
/// unscripted call is a malformed response.
struct MockScript {
  std::map<std::string, std::string> responses;
  std::map<std::string, int> transient_failures;  // failures before success
  std::optional<std::string> fallback;
  int latency_ms = 0;
};

MockScript mock_script_from_json(const nlohmann::json& j);
MockScript load_mock_script(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const MockScript& script);
std::string prompt_hash_key(std::string_view prompt);

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockScript script);
  BackendOutcome call(const CompletionRequest& request, std::chrono::milliseconds timeout) override;
  BackendKind kind() const override { return BackendKind::kMock; }

 private:
  MockScript script_;
  std::mutex mu_;
  std::map<std::string, int> failures_seen_;
};

std::shared_ptr<Backend> make_mock_backend(MockScript script);

/// Chat-completions over HTTP(S): one user message, temperature, max_tokens.
/// The bearer token comes from `api_key` (normally the MATHAUG_API_KEY env
/// var) and is never logged.
std::shared_ptr<Backend> make_http_backend(const GatewayConfig& config, std::string api_key);

/// Bounded-concurrency, rate-limited, retrying front end to a backend.
class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<Backend> backend,
          std::shared_ptr<Clock> clock = std::make_shared<SteadyClock>());

  CompletionOutcome try_complete(const CompletionRequest& request);
  // Throws Error with the failure's code.
  CompletionResult complete(const CompletionRequest& request);

  // Runs the requests on up to max_concurrency workers. `on_result` is
  // invoked on the calling thread, one result at a time, in completion order.
  void complete_batch(const std::vector<CompletionRequest>& requests,
                      const std::function<void(std::size_t, CompletionOutcome)>& on_result);

  const GatewayConfig& config() const { return config_; }
  BackendKind backend_kind() const { return backend_->kind(); }

 private:
  void acquire_slot();
  void release_slot();
  void wait_for_rate_limit();

  GatewayConfig config_;
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<Clock> clock_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;

  std::mutex rate_mu_;
  std::optional<Clock::TimePoint> next_slot_;
};

}  // namespace mathaug
