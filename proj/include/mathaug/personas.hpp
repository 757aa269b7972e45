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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mathaug {

struct Persona {
  std::size_t id = 0;  // position in the store
  std::string description;
};

/// Immutable, ordered persona collection. Sampling is a pure function of
/// (seed, problem id, n), so it is safe to call from any thread and stable
/// across resumes.
class PersonaStore {
 public:
  // Plain text (one persona per line) or JSON Lines with a "persona" or
  // "description" field. Blank lines are skipped. Throws Error(kInvalidArgument)
  // with "persona store empty" when nothing remains.
  static PersonaStore load(const std::filesystem::path& path, std::uint64_t seed);
  static PersonaStore parse(std::string_view text, std::uint64_t seed);

  std::size_t size() const { return personas_.size(); }
  std::uint64_t seed() const { return seed_; }
  const Persona& at(std::size_t id) const { return personas_.at(id); }
  const std::vector<Persona>& personas() const { return personas_; }

  // Content fingerprint, used in the checkpoint config hash.
  std::string fingerprint() const;

  // n distinct personas for one problem. Throws Error(kInvalidArgument) when
  // n exceeds the store size.
  std::vector<Persona> sample_distinct(std::string_view problem_id, std::size_t n) const;

 private:
  PersonaStore(std::vector<Persona> personas, std::uint64_t seed)
      : personas_(std::move(personas)), seed_(seed) {}

  std::vector<Persona> personas_;
  std::uint64_t seed_;
};

}  // namespace mathaug
