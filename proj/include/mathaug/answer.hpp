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

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace mathaug {

using Rational = boost::multiprecision::cpp_rational;

/// A final answer in comparable form.
///
/// `canonical` is a fixed point of normalize_answer. When the answer is an
/// integer, decimal or simple fraction, `numeric` holds its exact value and
/// `canonical` is its reduced rendering ("448000", "-3/4").
struct CanonicalAnswer {
  std::string raw;
  std::string canonical;
  std::optional<Rational> numeric;
};

struct ReflectionParts {
  std::string review;
  std::string corrected;
};

/// Contents of the last complete `\boxed{...}` group, braces matched with
/// LaTeX escapes (`\{`, `\}`) ignored. Absent when no group closes.
std::optional<std::string> extract_boxed(std::string_view text);

/// Throws Error(kInvalidArgument) on empty input or input that normalizes to
/// nothing.
CanonicalAnswer normalize_answer(std::string_view raw);

/// Exact rational equality when both sides are numeric, canonical string
/// identity otherwise.
bool answers_equivalent(const CanonicalAnswer& a, const CanonicalAnswer& b);

/// Splits at the last heading that names the corrected explanation. Throws
/// Error(kSplit) when no heading exists or the corrected part is empty.
ReflectionParts split_reflection(std::string_view text);
std::optional<ReflectionParts> try_split_reflection(std::string_view text);

/// Parses an integer, decimal, `a/b` or `\frac{a}{b}` literal (optional sign).
std::optional<Rational> parse_rational_literal(std::string_view text);
std::string format_rational(const Rational& value);

/// Last standalone integer or decimal literal in free text, thousands
/// separators allowed. Used when an output carries no box.
std::optional<std::string> last_numeric_literal(std::string_view text);

}  // namespace mathaug
