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

#include "mathaug/answer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <iterator>

#include "mathaug/common.hpp"

namespace mathaug {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Index one past the brace that closes the group opened at `open`, or npos.
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      ++i;
      continue;
    }
    if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Removes a control word only when it is not the prefix of a longer one
// (`\left(` goes, `\leftarrow` stays).
void remove_control_word(std::string& s, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = s.find(word, pos)) != std::string::npos) {
    std::size_t end = pos + word.size();
    if (end < s.size() && is_alpha(s[end])) {
      pos = end;
      continue;
    }
    s.erase(pos, word.size());
  }
}

std::string remove_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!is_space(c)) out.push_back(c);
  }
  return out;
}

constexpr std::array<std::string_view, 4> kTextWrappers = {"\\text", "\\textbf", "\\mbox",
                                                           "\\mathrm"};

// If `s` is exactly `\text{...}` (or a sibling wrapper), returns the inside.
std::optional<std::string> unwrap_text(std::string_view s) {
  for (std::string_view w : kTextWrappers) {
    if (!starts_with(s, w)) continue;
    std::size_t open = w.size();
    while (open < s.size() && is_space(s[open])) ++open;
    if (open >= s.size() || s[open] != '{') continue;
    if (match_brace(s, open) == s.size()) {
      return std::string(s.substr(open + 1, s.size() - open - 2));
    }
  }
  return std::nullopt;
}

std::string strip_decorations(std::string_view raw) {
  std::string s(raw);
  replace_all(s, "\\$", "");
  replace_all(s, "$", "");
  remove_control_word(s, "\\left");
  remove_control_word(s, "\\right");
  for (std::string_view spacing : {"\\!", "\\,", "\\;", "\\:"}) replace_all(s, spacing, "");
  replace_all(s, "{,}", ",");
  replace_all(s, "\\dfrac", "\\frac");
  replace_all(s, "\\tfrac", "\\frac");
  replace_all(s, "\\%", "%");

  for (;;) {
    std::string before = s;
    s = trim(s);
    while (!s.empty() && s.back() == '.') {
      s.pop_back();
      s = trim(s);
    }
    if (auto inner = unwrap_text(s)) s = *inner;
    if (s == before) break;
  }
  return s;
}

constexpr std::string_view kUnitWords[] = {
    "dollar", "dollars", "usd", "cent", "cents", "euro", "euros", "cm", "mm", "m", "km",
    "meter", "meters", "metre", "metres", "centimeter", "centimeters", "kilometer",
    "kilometers", "mile", "miles", "inch", "inches", "foot", "feet", "ft", "yard", "yards",
    "hour", "hours", "hr", "hrs", "minute", "minutes", "min", "mins", "second", "seconds",
    "day", "days", "week", "weeks", "month", "months", "year", "years", "kg", "gram", "grams",
    "pound", "pounds", "lb", "lbs", "ounce", "ounces", "liter", "liters", "gallon",
    "gallons", "degree", "degrees", "units"};

bool is_unit_word(std::string_view w) {
  std::string lower = to_lower_ascii(w);
  if (lower == "square" || lower == "sq" || lower == "cubic" || lower == "percent") return true;
  return std::find(std::begin(kUnitWords), std::end(kUnitWords), lower) != std::end(kUnitWords);
}

// Peels trailing unit markers off `s`. Returns the remaining head.
std::string strip_unit_tail(std::string s) {
  for (;;) {
    s = trim(s);
    if (s.empty()) return s;
    if (ends_with(s, "%")) {
      s.pop_back();
      continue;
    }
    bool stripped = false;
    for (std::string_view deg : {"^\\circ", "^{\\circ}", "\xc2\xb0"}) {
      if (ends_with(s, deg)) {
        s.resize(s.size() - deg.size());
        stripped = true;
        break;
      }
    }
    if (stripped) continue;
    // Exponent on a unit (cm^2); a bare number keeps its exponent.
    for (std::string_view ex : {"^2", "^3", "^{2}", "^{3}"}) {
      if (ends_with(s, ex)) {
        std::string rest = trim(std::string_view(s).substr(0, s.size() - ex.size()));
        if (!rest.empty() && (is_alpha(rest.back()) || rest.back() == '}')) {
          s = rest;
          stripped = true;
        }
        break;
      }
    }
    if (stripped) continue;
    if (s.back() == '}') {
      // Find the group start by scanning for a wrapper whose group ends here.
      for (std::string_view w : kTextWrappers) {
        std::size_t pos = s.rfind(w);
        while (pos != std::string::npos) {
          std::size_t open = pos + w.size();
          while (open < s.size() && is_space(s[open])) ++open;
          if (open < s.size() && s[open] == '{' && match_brace(s, open) == s.size()) {
            s.resize(pos);
            stripped = true;
            break;
          }
          if (pos == 0) break;
          pos = s.rfind(w, pos - 1);
        }
        if (stripped) break;
      }
      if (stripped) continue;
      return s;
    }
    std::size_t end = s.size();
    std::size_t begin = end;
    while (begin > 0 && is_alpha(s[begin - 1])) --begin;
    if (begin == end) return s;
    bool separated = begin == 0 || is_space(s[begin - 1]) || is_digit(s[begin - 1]);
    if (begin > 0 && s[begin - 1] == '\\') separated = false;
    if (!separated || !is_unit_word(std::string_view(s).substr(begin))) return s;
    s.resize(begin);
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

// Base-10 digits to an integer. cpp_int's string constructor treats a
// leading 0 as an octal prefix, so zeros are stripped first.
boost::multiprecision::cpp_int decimal_digits(std::string_view digits) {
  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return 0;
  return boost::multiprecision::cpp_int{std::string(digits.substr(first))};
}

std::optional<Rational> parse_signed_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) return std::nullopt;
  boost::multiprecision::cpp_int v = decimal_digits(s);
  return Rational(neg ? -v : v);
}

// Reads one \frac argument: a braced group or a single character.
std::optional<std::string_view> frac_argument(std::string_view s, std::size_t& pos) {
  if (pos >= s.size()) return std::nullopt;
  if (s[pos] == '{') {
    std::size_t end = match_brace(s, pos);
    if (end == std::string_view::npos) return std::nullopt;
    std::string_view arg = s.substr(pos + 1, end - pos - 2);
    pos = end;
    return arg;
  }
  std::string_view arg = s.substr(pos, 1);
  ++pos;
  return arg;
}

// Removes thousands separators when the whole literal is grouped correctly.
std::string strip_thousands(std::string_view s) {
  std::string_view body = s;
  std::string_view sign;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    sign = body.substr(0, 1);
    body.remove_prefix(1);
  }
  if (body.find(',') == std::string_view::npos) return std::string(s);
  std::string_view integer = body;
  std::string_view fraction;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    integer = body.substr(0, dot);
    fraction = body.substr(dot);
    if (fraction.size() < 2 || !all_digits(fraction.substr(1))) return std::string(s);
  }
  std::size_t first = integer.find(',');
  if (first == 0 || first > 3 || !all_digits(integer.substr(0, first))) return std::string(s);
  for (std::size_t i = first; i < integer.size(); i += 4) {
    if (integer[i] != ',' || i + 4 > integer.size() || !all_digits(integer.substr(i + 1, 3))) {
      return std::string(s);
    }
  }
  std::string out(sign);
  for (char c : integer) {
    if (c != ',') out.push_back(c);
  }
  out.append(fraction);
  return out;
}

}  // namespace

std::optional<Rational> parse_rational_literal(std::string_view text) {
  std::string_view s = text;
  if (s.empty()) return std::nullopt;

  if (auto v = parse_signed_integer(s)) return v;

  bool neg = false;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }

  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = body.substr(0, dot);
    std::string_view frac_part = body.substr(dot + 1);
    if ((int_part.empty() || all_digits(int_part)) && all_digits(frac_part)) {
      boost::multiprecision::cpp_int num =
          decimal_digits(std::string(int_part) + std::string(frac_part));
      boost::multiprecision::cpp_int den = boost::multiprecision::pow(
          boost::multiprecision::cpp_int(10), static_cast<unsigned>(frac_part.size()));
      Rational r(num, den);
      return neg ? Rational(-r) : r;
    }
    return std::nullopt;
  }

  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view a = body.substr(0, slash);
    std::string_view b = body.substr(slash + 1);
    if (!all_digits(a) || !all_digits(b)) return std::nullopt;
    boost::multiprecision::cpp_int den = decimal_digits(b);
    if (den == 0) return std::nullopt;
    Rational r(decimal_digits(a), den);
    return neg ? Rational(-r) : r;
  }

  if (starts_with(body, "\\frac")) {
    std::size_t pos = 5;
    auto num = frac_argument(body, pos);
    if (!num) return std::nullopt;
    auto den = frac_argument(body, pos);
    if (!den || pos != body.size()) return std::nullopt;
    auto n = parse_signed_integer(*num);
    auto d = parse_signed_integer(*den);
    if (!n || !d || *d == 0) return std::nullopt;
    Rational r = *n / *d;
    return neg ? Rational(-r) : r;
  }
  return std::nullopt;
}

std::string format_rational(const Rational& value) {
  auto num = boost::multiprecision::numerator(value);
  auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::optional<std::string> extract_boxed(std::string_view text) {
  static constexpr std::string_view kMarker = "\\boxed";
  std::optional<std::string> last;
  std::size_t pos = 0;
  while ((pos = text.find(kMarker, pos)) != std::string_view::npos) {
    std::size_t open = pos + kMarker.size();
    while (open < text.size() && is_space(text[open])) ++open;
    pos += kMarker.size();
    if (open >= text.size() || text[open] != '{') continue;
    std::size_t end = match_brace(text, open);
    if (end == std::string_view::npos) continue;
    last = std::string(text.substr(open + 1, end - open - 2));
  }
  return last;
}

CanonicalAnswer normalize_answer(std::string_view raw) {
  if (trim(raw).empty()) fail(ErrorCode::kInvalidArgument, "answer is empty");
  CanonicalAnswer out;
  out.raw = std::string(raw);

  std::string s = strip_decorations(raw);
  if (s.empty()) fail(ErrorCode::kInvalidArgument, "answer is empty after normalization");

  auto try_numeric = [](std::string_view candidate) -> std::optional<Rational> {
    std::string compact = strip_thousands(remove_whitespace(candidate));
    return parse_rational_literal(compact);
  };

  std::optional<Rational> numeric = try_numeric(s);
  if (!numeric) {
    std::string head = strip_unit_tail(s);
    if (!head.empty() && head != s) numeric = try_numeric(head);
  }

  if (numeric) {
    out.canonical = format_rational(*numeric);
    out.numeric = std::move(numeric);
  } else {
    out.canonical = remove_whitespace(s);
  }
  return out;
}

bool answers_equivalent(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.numeric && b.numeric) return *a.numeric == *b.numeric;
  return a.canonical == b.canonical;
}

std::optional<ReflectionParts> try_split_reflection(std::string_view text) {
  static constexpr std::string_view kHeading = "corrected explanation";
  std::string lower = to_lower_ascii(text);

  std::size_t pos = lower.rfind(kHeading);
  while (pos != std::string::npos) {
    // Walk back over decoration on the same line: spaces, bold markers, then
    // a run of '#'.
    std::size_t b = pos;
    while (b > 0 && (text[b - 1] == ' ' || text[b - 1] == '\t' || text[b - 1] == '*')) --b;
    std::size_t hashes = 0;
    while (b > 0 && text[b - 1] == '#') {
      --b;
      ++hashes;
    }
    while (b > 0 && (text[b - 1] == ' ' || text[b - 1] == '\t')) --b;
    bool line_start = b == 0 || text[b - 1] == '\n';
    if (hashes > 0 || line_start) {
      std::size_t e = pos + kHeading.size();
      while (e < text.size() && (text[e] == '*' || text[e] == ' ' || text[e] == '\t')) ++e;
      if (e < text.size() && text[e] == ':') ++e;
      while (e < text.size() && text[e] == '*') ++e;
      std::size_t review_end = b;
      ReflectionParts parts{trim(text.substr(0, review_end)), trim(text.substr(e))};
      if (parts.corrected.empty()) return std::nullopt;
      return parts;
    }
    if (pos == 0) break;
    pos = lower.rfind(kHeading, pos - 1);
  }
  return std::nullopt;
}

ReflectionParts split_reflection(std::string_view text) {
  auto parts = try_split_reflection(text);
  if (!parts) fail(ErrorCode::kSplit, "reflection response has no Corrected Explanation part");
  return *std::move(parts);
}

std::optional<std::string> last_numeric_literal(std::string_view text) {
  std::optional<std::string> last;
  auto word_char = [](char c) { return is_alpha(c) || is_digit(c) || c == '_'; };
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    bool standalone = start == 0 || (!word_char(text[start - 1]) && text[start - 1] != '.');
    std::size_t end = i;
    while (end < text.size() && is_digit(text[end])) ++end;
    // Thousands groups.
    while (end + 3 < text.size() && text[end] == ',' && all_digits(text.substr(end + 1, 3)) &&
           (end + 4 >= text.size() || !is_digit(text[end + 4]))) {
      end += 4;
    }
    if (end + 1 < text.size() && text[end] == '.' && is_digit(text[end + 1])) {
      ++end;
      while (end < text.size() && is_digit(text[end])) ++end;
    } else if (end + 1 < text.size() && text[end] == '/' && is_digit(text[end + 1])) {
      ++end;
      while (end < text.size() && is_digit(text[end])) ++end;
    }
    if (end < text.size() && word_char(text[end])) standalone = false;
    if (standalone) {
      std::string literal(text.substr(start, end - start));
      if (start > 0 && text[start - 1] == '-' &&
          (start == 1 || !word_char(text[start - 2]))) {
        literal.insert(literal.begin(), '-');
      }
      last = std::move(literal);
    }
    i = end;
    while (i < text.size() && (is_digit(text[i]) || word_char(text[i]))) ++i;
  }
  return last;
}

}  // namespace mathaug
