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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mathaug {

// Mirrors mathaug_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kIngest = 4,
  kConfig = 5,
  kExhaustedRetries = 6,
  kAuth = 7,
  kMalformedResponse = 8,
  kBadRequest = 9,
  kJournalMismatch = 10,
  kSplit = 11,
  kNotFound = 12,
  kInternal = 99,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// One entry per physical line; a trailing newline does not produce an empty
// final entry.
std::vector<std::string> split_lines(std::string_view text);

// Wall-clock timestamp source. The deterministic variant emits a logical
// sequence so that mock-backed runs are byte-reproducible.
class TimestampSource {
 public:
  static TimestampSource system();
  // Starts at `start` seconds past the epoch; resumed runs pass the number
  // of records already journaled.
  static TimestampSource deterministic(std::uint64_t start = 0);

  std::string next();
  bool is_deterministic() const { return deterministic_; }

 private:
  TimestampSource(bool deterministic, std::uint64_t start)
      : deterministic_(deterministic), counter_(start) {}
  bool deterministic_;
  std::uint64_t counter_;
};

std::string format_utc_iso8601(std::chrono::system_clock::time_point tp);

// Monotonic clock used by the gateway for backoff and rate limiting.
class Clock {
 public:
  using Duration = std::chrono::nanoseconds;
  using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_until(TimePoint t) = 0;
  void sleep_for(Duration d) { sleep_until(now() + d); }
};

class SteadyClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_until(TimePoint t) override;
};

// Time only advances when someone sleeps. Thread-safe.
class VirtualClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_until(TimePoint t) override;

 private:
  std::mutex mu_;
  Duration elapsed_{0};
};

}  // namespace mathaug
