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

#include "doctest.h"
#include "mathaug/answer.hpp"
#include "mathaug/common.hpp"
#include "test_support.hpp"

using namespace mathaug;
using testing_support::fixtures;
using testing_support::slurp;

TEST_CASE("extract_boxed takes the last complete group") {
  CHECK(extract_boxed("a \\boxed{1} b \\boxed{22}").value() == "22");
  CHECK(extract_boxed("\\boxed{\\frac{1}{2}}").value() == "\\frac{1}{2}");
  CHECK(extract_boxed("\\boxed{3} then \\boxed{4").value() == "3");
  CHECK(extract_boxed("\\boxed {7}").value() == "7");
  CHECK(extract_boxed("\\boxed{\\{1\\}}").value() == "\\{1\\}");
  CHECK_FALSE(extract_boxed("no box").has_value());
  CHECK_FALSE(extract_boxed("\\boxed{unterminated").has_value());
  CHECK_FALSE(extract_boxed("").has_value());
}

TEST_CASE("normalize_answer canonical forms") {
  CHECK(normalize_answer("448,000").canonical == "448000");
  CHECK(normalize_answer("\\$1,250").canonical == "1250");
  CHECK(normalize_answer("\\frac{6}{8}").canonical == "3/4");
  CHECK(normalize_answer("\\dfrac{-2}{4}").canonical == "-1/2");
  CHECK(normalize_answer("2.50").canonical == "5/2");
  CHECK(normalize_answer("12.").canonical == "12");
  CHECK(normalize_answer("40\\%").canonical == "40");
  CHECK(normalize_answer("30^\\circ").canonical == "30");
  CHECK(normalize_answer("5 \\text{ hours}").canonical == "5");
  CHECK(normalize_answer("\\text{(A)}").canonical == "(A)");
  CHECK(normalize_answer("x^2 + 1").canonical == "x^2+1");
  CHECK_FALSE(normalize_answer("\\sqrt{2}").numeric.has_value());
  CHECK(normalize_answer("0.75").numeric.value() == Rational(3, 4));
}

TEST_CASE("normalize_answer rejects empty input") {
  CHECK_THROWS_AS(normalize_answer(""), Error);
  CHECK_THROWS_AS(normalize_answer("   "), Error);
  try {
    normalize_answer("");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("normalize_answer is idempotent on a sample") {
  for (const char* raw : {"1,000", "\\frac{10}{4}", "-0.50", "(1, 2)", "\\textbf{B}", "3\\pi"}) {
    auto once = normalize_answer(raw).canonical;
    CHECK(normalize_answer(once).canonical == once);
  }
}

TEST_CASE("answers_equivalent uses exact rationals") {
  CHECK(answers_equivalent(normalize_answer("0.5"), normalize_answer("\\frac12")));
  CHECK(answers_equivalent(normalize_answer("448000"), normalize_answer("448,000")));
  CHECK_FALSE(answers_equivalent(normalize_answer("0.333"), normalize_answer("1/3")));
  CHECK(answers_equivalent(normalize_answer("(1,2)"), normalize_answer("(1, 2)")));
  CHECK_FALSE(answers_equivalent(normalize_answer("(1,2)"), normalize_answer("(2,1)")));
}

TEST_CASE("parse_rational_literal and format_rational") {
  CHECK(parse_rational_literal("-3/9").value() == Rational(-1, 3));
  CHECK(parse_rational_literal("\\frac{4}{2}").value() == Rational(2));
  CHECK(parse_rational_literal("1.25").value() == Rational(5, 4));
  CHECK_FALSE(parse_rational_literal("1/0").has_value());
  CHECK_FALSE(parse_rational_literal("abc").has_value());
  CHECK(format_rational(Rational(-6, 4)) == "-3/2");
  CHECK(format_rational(Rational(7)) == "7");
  CHECK(parse_rational_literal("007").value() == Rational(7));
  CHECK(parse_rational_literal("0.05").value() == Rational(1, 20));
  CHECK(parse_rational_literal("010/020").value() == Rational(1, 2));
  CHECK(parse_rational_literal("-0.75").value() == Rational(-3, 4));
}

TEST_CASE("split_reflection on recorded responses") {
  auto math = split_reflection(slurp(fixtures() / "reflection_samples" / "math_reflection.txt"));
  CHECK(starts_with(math.review, "### Review"));
  CHECK(starts_with(math.corrected, "To solve the equation"));
  CHECK(extract_boxed(math.corrected).value() == "13");

  auto gsm = split_reflection(slurp(fixtures() / "reflection_samples" / "gsm8k_reflection.txt"));
  CHECK(starts_with(gsm.corrected, "To solve the problem correctly"));
  CHECK(extract_boxed(gsm.corrected).value() == "448000");
}

TEST_CASE("split_reflection heading variants") {
  auto p = split_reflection("Review: bad.\n**Corrected Explanation:** fixed \\boxed{2}");
  CHECK(p.review == "Review: bad.");
  CHECK(p.corrected == "fixed \\boxed{2}");
  auto q = split_reflection("## Review of Incorrect Explanation and Corrected Explanation\nx\n## Corrected Explanation\ny");
  CHECK(q.corrected == "y");
}

TEST_CASE("split_reflection failures") {
  CHECK_FALSE(try_split_reflection("Only a review here.").has_value());
  CHECK_FALSE(try_split_reflection("### Corrected Explanation:   ").has_value());
  try {
    split_reflection("nothing");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSplit);
  }
}

TEST_CASE("last_numeric_literal") {
  CHECK(last_numeric_literal("we get 12 then 15.").value() == "15");
  CHECK(last_numeric_literal("cost 1,250 in total").value() == "1,250");
  CHECK(last_numeric_literal("ratio 2/6").value() == "2/6");
  CHECK(last_numeric_literal("down to -4").value() == "-4");
  CHECK(last_numeric_literal("value 3.75 m").value() == "3.75");
  CHECK_FALSE(last_numeric_literal("x2 and y3").has_value());
  CHECK_FALSE(last_numeric_literal("none").has_value());
}
