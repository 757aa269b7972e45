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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "mathaug/common.hpp"
#include "mathaug/pipeline.hpp"

namespace mathaug {
namespace {

namespace fs = std::filesystem;

constexpr const char* kConfigFile = "config.json";
constexpr const char* kJournalFile = "journal.jsonl";
constexpr const char* kFailuresFile = "failures.jsonl";

int open_append(const fs::path& path, bool truncate) {
  int flags = O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC;
  if (truncate) flags |= O_TRUNC;
  int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) fail(ErrorCode::kIo, "cannot open " + path.string() + ": " + std::strerror(errno));
  return fd;
}

void write_line_synced(int fd, const std::string& line) {
  std::string buf = line;
  buf.push_back('\n');
  const char* p = buf.data();
  std::size_t left = buf.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kIo, std::string("journal write failed: ") + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) fail(ErrorCode::kIo, std::string("fsync failed: ") + std::strerror(errno));
}

[[noreturn]] void different_run(const std::string& detail) {
  fail(ErrorCode::kJournalMismatch, "journal belongs to a different run (" + detail + ")");
}

}  // namespace

std::string config_hash(const nlohmann::ordered_json& config) {
  return sha256_hex(config.dump());
}

std::vector<GenerationRecord> load_journal_records(const fs::path& journal_file) {
  std::vector<GenerationRecord> records;
  std::string text = read_file(journal_file);
  // A crash can leave a partial final line; it is not a completed call.
  std::size_t complete = text.rfind('\n');
  text.resize(complete == std::string::npos ? 0 : complete + 1);
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(lines[i])));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "journal line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return records;
}

Journal Journal::in_memory() { return Journal(); }

Journal Journal::open(const fs::path& dir, const nlohmann::ordered_json& config) {
  Journal journal;
  journal.dir_ = dir;
  journal.config_hash_ = mathaug::config_hash(config);
  fs::create_directories(dir);

  const fs::path config_path = dir / kConfigFile;
  const fs::path journal_path = dir / kJournalFile;
  bool has_config = fs::exists(config_path);
  bool has_journal = fs::exists(journal_path);

  if (has_config || has_journal) {
    if (!has_config) different_run("config.json is missing");
    nlohmann::ordered_json stored;
    try {
      stored = nlohmann::ordered_json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error&) {
      different_run("config.json is unreadable");
    }
    auto hash_it = stored.find("config_hash");
    auto cfg_it = stored.find("config");
    if (hash_it == stored.end() || cfg_it == stored.end() || !hash_it->is_string()) {
      different_run("config.json lacks config_hash");
    }
    if (hash_it->get<std::string>() != mathaug::config_hash(*cfg_it)) {
      different_run("stored hash does not match stored config");
    }
    if (hash_it->get<std::string>() != journal.config_hash_) {
      different_run("config hash " + hash_it->get<std::string>() + " != " + journal.config_hash_);
    }
    journal.resumed_ = true;
  } else {
    nlohmann::ordered_json doc;
    doc["config_hash"] = journal.config_hash_;
    doc["config"] = config;
    write_file_atomic(config_path, doc.dump(2) + "\n");
  }

  if (has_journal) {
    journal.records_ = load_journal_records(journal_path);
    // Drop any partial tail so appends start on a fresh line.
    std::string text = read_file(journal_path);
    std::size_t complete = text.rfind('\n');
    std::uintmax_t keep = complete == std::string::npos ? 0 : complete + 1;
    if (keep != text.size()) fs::resize_file(journal_path, keep);
    for (std::size_t i = 0; i < journal.records_.size(); ++i) {
      journal.by_key_.emplace(journal.records_[i].request_key, i);
    }
  }
  journal.journal_fd_ = open_append(journal_path, false);
  journal.failures_fd_ = open_append(dir / kFailuresFile, true);
  return journal;
}

Journal::Journal(Journal&& other) noexcept
    : dir_(std::move(other.dir_)),
      journal_fd_(std::exchange(other.journal_fd_, -1)),
      failures_fd_(std::exchange(other.failures_fd_, -1)),
      resumed_(other.resumed_),
      config_hash_(std::move(other.config_hash_)),
      records_(std::move(other.records_)),
      by_key_(std::move(other.by_key_)) {}

Journal& Journal::operator=(Journal&& other) noexcept {
  if (this != &other) {
    if (journal_fd_ >= 0) ::close(journal_fd_);
    if (failures_fd_ >= 0) ::close(failures_fd_);
    dir_ = std::move(other.dir_);
    journal_fd_ = std::exchange(other.journal_fd_, -1);
    failures_fd_ = std::exchange(other.failures_fd_, -1);
    resumed_ = other.resumed_;
    config_hash_ = std::move(other.config_hash_);
    records_ = std::move(other.records_);
    by_key_ = std::move(other.by_key_);
  }
  return *this;
}

Journal::~Journal() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  if (failures_fd_ >= 0) ::close(failures_fd_);
}

const GenerationRecord* Journal::find(const std::string& request_key) const {
  auto it = by_key_.find(request_key);
  return it == by_key_.end() ? nullptr : &records_[it->second];
}

void Journal::append(const GenerationRecord& record) {
  if (by_key_.count(record.request_key)) {
    fail(ErrorCode::kInternal, "request key journaled twice: " + record.request_key);
  }
  if (journal_fd_ >= 0) write_line_synced(journal_fd_, to_json(record).dump());
  by_key_.emplace(record.request_key, records_.size());
  records_.push_back(record);
}

void Journal::append_failure(const CallFailure& failure) {
  if (failures_fd_ >= 0) write_line_synced(failures_fd_, to_json(failure).dump());
}

}  // namespace mathaug
