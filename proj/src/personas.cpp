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

#include "mathaug/personas.hpp"

#include <random>
#include <unordered_map>

#include "json.hpp"
#include "mathaug/common.hpp"

namespace mathaug {
namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, bound). std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries, so do it by hand.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

PersonaStore PersonaStore::parse(std::string_view text, std::uint64_t seed) {
  std::vector<Persona> personas;
  for (const std::string& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::string description = line;
    if (line.front() == '{') {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.is_object()) {
        auto it = j.find("persona");
        if (it == j.end()) it = j.find("description");
        if (it == j.end() || !it->is_string()) {
          fail(ErrorCode::kParse, "persona record lacks a \"persona\" field: " + line);
        }
        description = trim(it->get<std::string>());
        if (description.empty()) continue;
      }
    }
    personas.push_back({personas.size(), std::move(description)});
  }
  if (personas.empty()) fail(ErrorCode::kInvalidArgument, "persona store empty");
  return PersonaStore(std::move(personas), seed);
}

PersonaStore PersonaStore::load(const std::filesystem::path& path, std::uint64_t seed) {
  return parse(read_file(path), seed);
}

std::string PersonaStore::fingerprint() const {
  std::string all;
  for (const auto& p : personas_) {
    all += p.description;
    all += '\n';
  }
  return sha256_hex(all);
}

std::vector<Persona> PersonaStore::sample_distinct(std::string_view problem_id,
                                                   std::size_t n) const {
  if (n > personas_.size()) {
    fail(ErrorCode::kInvalidArgument, "cannot sample " + std::to_string(n) +
                                          " distinct personas from a store of " +
                                          std::to_string(personas_.size()));
  }
  std::mt19937_64 gen(splitmix64(seed_ ^ splitmix64(fnv1a64(problem_id))));
  // Partial Fisher-Yates over a virtual identity permutation.
  std::unordered_map<std::size_t, std::size_t> swapped;
  auto slot = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<Persona> out;
  out.reserve(n);
  const std::size_t total = personas_.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(gen, total - i));
    std::size_t pick = slot(j);
    swapped[j] = slot(i);
    out.push_back(personas_[pick]);
  }
  return out;
}

}  // namespace mathaug
