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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "mathaug/gateway.hpp"

namespace mathaug {
namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl parse_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::kConfig, "base_url needs a scheme: " + url);
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorCode::kConfig, "unsupported base_url scheme: " + scheme);
  }
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  out.path += "/chat/completions";
  return out;
}

class HttpBackend final : public Backend {
 public:
  HttpBackend(const GatewayConfig& config, std::string api_key)
      : url_(parse_base_url(config.base_url)),
        model_(config.model_name),
        api_key_(std::move(api_key)) {}

  BackendOutcome call(const CompletionRequest& request,
                      std::chrono::milliseconds timeout) override {
    httplib::Client client(url_.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    nlohmann::ordered_json body;
    body["model"] = model_;
    body["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;

    auto res = client.Post(url_.path, headers, body.dump(), "application/json");
    if (!res) {
      return BackendFailure{FailureKind::kTransient,
                            "transport error: " + httplib::to_string(res.error())};
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      return BackendFailure{FailureKind::kAuth, "HTTP " + std::to_string(status)};
    }
    if (status == 408 || status == 429 || status >= 500) {
      return BackendFailure{FailureKind::kTransient, "HTTP " + std::to_string(status)};
    }
    if (status < 200 || status >= 300) {
      return BackendFailure{FailureKind::kBadRequest,
                            "HTTP " + std::to_string(status) + ": " + scrub(res->body)};
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) return BackendFailure{FailureKind::kMalformed, "response is not JSON"};
    try {
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) {
        return BackendFailure{FailureKind::kMalformed, "completion content is not a string"};
      }
      return content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      return BackendFailure{FailureKind::kMalformed, "response lacks choices[0].message.content"};
    }
  }

  BackendKind kind() const override { return BackendKind::kLive; }

 private:
  std::string scrub(std::string text) const {
    if (api_key_.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(api_key_, pos)) != std::string::npos) {
      text.replace(pos, api_key_.size(), "[REDACTED]");
    }
    return text;
  }

  ParsedUrl url_;
  std::string model_;
  std::string api_key_;
};

}  // namespace

std::shared_ptr<Backend> make_http_backend(const GatewayConfig& config, std::string api_key) {
  return std::make_shared<HttpBackend>(config, std::move(api_key));
}

}  // namespace mathaug
