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

#include "mathaug/gateway.hpp"

#include <algorithm>
#include <deque>
#include <thread>

#include "mathaug/log.hpp"

namespace mathaug {

void GatewayConfig::validate() const {
  if (max_concurrency < 1) fail(ErrorCode::kConfig, "max_concurrency must be >= 1");
  if (max_retries < 0) fail(ErrorCode::kConfig, "max_retries must be >= 0");
  if (requests_per_minute && *requests_per_minute < 1) {
    fail(ErrorCode::kConfig, "requests_per_minute must be positive");
  }
  if (!(timeout_seconds > 0)) fail(ErrorCode::kConfig, "timeout must be positive");
  if (backoff_initial_ms < 0 || backoff_max_ms < 0) {
    fail(ErrorCode::kConfig, "backoff must be non-negative");
  }
  if (model_name.empty()) fail(ErrorCode::kConfig, "model name must be non-empty");
}

nlohmann::ordered_json to_json(const GatewayConfig& c) {
  nlohmann::ordered_json j;
  j["max_concurrency"] = c.max_concurrency;
  j["max_retries"] = c.max_retries;
  j["requests_per_minute"] =
      c.requests_per_minute ? nlohmann::ordered_json(*c.requests_per_minute) : nullptr;
  j["timeout_seconds"] = c.timeout_seconds;
  j["base_url"] = c.base_url;
  j["model_name"] = c.model_name;
  j["backoff_initial_ms"] = c.backoff_initial_ms;
  j["backoff_max_ms"] = c.backoff_max_ms;
  return j;
}

GatewayConfig gateway_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfig, "gateway config must be a JSON object");
  GatewayConfig c;
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "max_concurrency") c.max_concurrency = v.get<std::size_t>();
      else if (key == "max_retries") c.max_retries = v.get<int>();
      else if (key == "requests_per_minute") {
        if (v.is_null()) c.requests_per_minute.reset();
        else c.requests_per_minute = v.get<int>();
      }
      else if (key == "timeout_seconds") c.timeout_seconds = v.get<double>();
      else if (key == "base_url") c.base_url = v.get<std::string>();
      else if (key == "model_name") c.model_name = v.get<std::string>();
      else if (key == "backoff_initial_ms") c.backoff_initial_ms = v.get<int>();
      else if (key == "backoff_max_ms") c.backoff_max_ms = v.get<int>();
      else fail(ErrorCode::kConfig, "unknown gateway setting \"" + key + "\"");
    }
  } catch (const nlohmann::json::type_error& e) {
    fail(ErrorCode::kConfig, std::string("gateway config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string prompt_hash_key(std::string_view prompt) { return "sha256:" + sha256_hex(prompt); }

MockScript mock_script_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kParse, "mock script must be a JSON object");
  MockScript script;
  if (auto it = j.find("responses"); it != j.end()) {
    for (auto& [k, v] : it->items()) {
      if (!v.is_string()) fail(ErrorCode::kParse, "mock response for " + k + " is not a string");
      script.responses[k] = v.get<std::string>();
    }
  }
  if (auto it = j.find("transient_failures"); it != j.end()) {
    for (auto& [k, v] : it->items()) script.transient_failures[k] = v.get<int>();
  }
  if (auto it = j.find("fallback"); it != j.end() && !it->is_null()) {
    script.fallback = it->get<std::string>();
  }
  if (auto it = j.find("latency_ms"); it != j.end()) script.latency_ms = it->get<int>();
  if (script.responses.empty() && !script.fallback) {
    fail(ErrorCode::kInvalidArgument, "mock script is empty");
  }
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParse, "mock script " + path.string() + ": " + e.what());
  }
  return mock_script_from_json(j);
}

nlohmann::ordered_json to_json(const MockScript& script) {
  nlohmann::ordered_json j;
  j["responses"] = script.responses;
  if (!script.transient_failures.empty()) j["transient_failures"] = script.transient_failures;
  j["fallback"] = script.fallback ? nlohmann::ordered_json(*script.fallback) : nullptr;
  if (script.latency_ms > 0) j["latency_ms"] = script.latency_ms;
  return j;
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

BackendOutcome MockBackend::call(const CompletionRequest& request, std::chrono::milliseconds) {
  if (script_.latency_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(script_.latency_ms));
  }
  std::string key = request.request_key;
  auto it = script_.responses.find(key);
  if (it == script_.responses.end()) {
    key = prompt_hash_key(request.prompt);
    it = script_.responses.find(key);
  }
  if (auto f = script_.transient_failures.find(request.request_key);
      f != script_.transient_failures.end()) {
    std::lock_guard lock(mu_);
    int& seen = failures_seen_[request.request_key];
    if (seen < f->second) {
      ++seen;
      return BackendFailure{FailureKind::kTransient, "scripted transient failure"};
    }
  }
  if (it != script_.responses.end()) return it->second;
  if (script_.fallback) return *script_.fallback;
  return BackendFailure{FailureKind::kMalformed,
                        "mock script has no response for " + request.request_key};
}

std::shared_ptr<Backend> make_mock_backend(MockScript script) {
  return std::make_shared<MockBackend>(std::move(script));
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Backend> backend,
                 std::shared_ptr<Clock> clock)
    : config_(std::move(config)), backend_(std::move(backend)), clock_(std::move(clock)) {
  config_.validate();
  if (!backend_) fail(ErrorCode::kInvalidArgument, "gateway needs a backend");
}

void Gateway::acquire_slot() {
  std::unique_lock lock(slot_mu_);
  slot_cv_.wait(lock, [&] { return in_flight_ < config_.max_concurrency; });
  ++in_flight_;
}

void Gateway::release_slot() {
  {
    std::lock_guard lock(slot_mu_);
    --in_flight_;
  }
  slot_cv_.notify_one();
}

void Gateway::wait_for_rate_limit() {
  if (!config_.requests_per_minute) return;
  auto interval = std::chrono::duration_cast<Clock::Duration>(std::chrono::minutes(1)) /
                  *config_.requests_per_minute;
  Clock::TimePoint slot;
  {
    std::lock_guard lock(rate_mu_);
    auto now = clock_->now();
    slot = next_slot_ ? std::max(now, *next_slot_) : now;
    next_slot_ = slot + interval;
  }
  clock_->sleep_until(slot);
}

CompletionOutcome Gateway::try_complete(const CompletionRequest& request) {
  if (request.prompt.empty()) {
    return GatewayFailure{request.request_key, ErrorCode::kBadRequest, "prompt is empty", 0};
  }
  auto timeout = std::chrono::milliseconds(static_cast<long long>(config_.timeout_seconds * 1000));
  std::string last_cause;
  const int max_attempts = config_.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    wait_for_rate_limit();
    acquire_slot();
    auto start = clock_->now();
    BackendOutcome outcome;
    try {
      outcome = backend_->call(request, timeout);
    } catch (const std::exception& e) {
      outcome = BackendFailure{FailureKind::kTransient, e.what()};
    }
    auto elapsed = clock_->now() - start;
    release_slot();

    if (auto* text = std::get_if<std::string>(&outcome)) {
      CompletionResult result;
      result.request_key = request.request_key;
      result.text = std::move(*text);
      result.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
      result.attempt = attempt;
      result.backend = backend_->kind();
      return result;
    }
    auto& failure = std::get<BackendFailure>(outcome);
    last_cause = failure.message;
    switch (failure.kind) {
      case FailureKind::kAuth:
        return GatewayFailure{request.request_key, ErrorCode::kAuth, last_cause, attempt};
      case FailureKind::kMalformed:
        return GatewayFailure{request.request_key, ErrorCode::kMalformedResponse, last_cause,
                              attempt};
      case FailureKind::kBadRequest:
        return GatewayFailure{request.request_key, ErrorCode::kBadRequest, last_cause, attempt};
      case FailureKind::kTransient:
        break;
    }
    log_event(LogLevel::kDebug, "gateway.retry",
              {{"request_key", request.request_key}, {"attempt", attempt}, {"cause", last_cause}});
    if (attempt < max_attempts) {
      long long backoff = static_cast<long long>(config_.backoff_initial_ms) << std::min(attempt - 1, 20);
      backoff = std::min<long long>(backoff, config_.backoff_max_ms);
      clock_->sleep_for(std::chrono::milliseconds(backoff));
    }
  }
  return GatewayFailure{request.request_key, ErrorCode::kExhaustedRetries, last_cause,
                        max_attempts};
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
  auto outcome = try_complete(request);
  if (auto* failure = std::get_if<GatewayFailure>(&outcome)) {
    fail(failure->code, failure->request_key + ": " + failure->message + " (after " +
                            std::to_string(failure->attempts) + " attempts)");
  }
  return std::get<CompletionResult>(std::move(outcome));
}

void Gateway::complete_batch(const std::vector<CompletionRequest>& requests,
                             const std::function<void(std::size_t, CompletionOutcome)>& on_result) {
  if (requests.empty()) return;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<std::size_t, CompletionOutcome>> ready;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> cancelled{false};

  auto worker = [&] {
    for (;;) {
      if (cancelled) return;
      std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      auto outcome = try_complete(requests[i]);
      {
        std::lock_guard lock(mu);
        ready.emplace_back(i, std::move(outcome));
      }
      cv.notify_one();
    }
  };

  std::size_t n_workers = std::min(config_.max_concurrency, requests.size());
  std::vector<std::jthread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);

  std::exception_ptr error;
  for (std::size_t delivered = 0; delivered < requests.size(); ++delivered) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !ready.empty(); });
    auto item = std::move(ready.front());
    ready.pop_front();
    lock.unlock();
    try {
      on_result(item.first, std::move(item.second));
    } catch (...) {
      error = std::current_exception();
      cancelled = true;
      break;
    }
  }
  workers.clear();  // joins
  if (error) std::rethrow_exception(error);
}

}  // namespace mathaug
