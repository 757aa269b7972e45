#!/usr/bin/env python3
# Copyright 2026 The mathaug Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes tests/fixtures/answer_stress.jsonl.

Each case is a model-style response with the expected boxed extraction, the
expected canonical answer, and (for numeric answers) the exact value as
"n/d". Values come from fractions.Fraction, so the fixture does not depend on
the C++ normalizer.
"""

import json
import random
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "answer_stress.jsonl"

WRAPPERS = [
    "The answer is $\\boxed{%s}$.",
    "Thus the result is \\(\\boxed{%s}\\)",
    "so we get \\boxed{%s}",
    "Final Answer: \\boxed {%s}",
    "First we guess \\boxed{0}, but checking again gives \\boxed{%s}",
    "Step 3 gives 12.\n\nTherefore:\n$$\\boxed{%s}$$\n",
]


def value_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def group_thousands(n: int) -> str:
    return f"{n:,}"


def decimal_str(v: Fraction, places: int) -> str:
    scaled = v * 10**places
    assert scaled.denominator == 1
    n = abs(scaled.numerator)
    digits = str(n).rjust(places + 1, "0")
    body = digits[:-places] + "." + digits[-places:] if places else digits
    return ("-" if v < 0 else "") + body


def numeric_forms(rng: random.Random):
    cases = []
    # Integers in several surface forms.
    for _ in range(50):
        n = rng.choice([rng.randint(0, 999), rng.randint(1000, 10**7), -rng.randint(1, 500)])
        v = Fraction(n)
        forms = [str(n)]
        if abs(n) >= 1000:
            forms.append(("-" if n < 0 else "") + group_thousands(abs(n)))
        forms.append(f"{n}.")
        forms.append(f"{n}.0")
        forms.append(f"\\text{{{n}}}")
        if n >= 0:
            forms.append(f"{n} dollars")
            forms.append(f"\\${n}")
        cases.append((rng.choice(forms), v))
    # Fractions.
    for _ in range(45):
        d = rng.randint(2, 40)
        num = rng.randint(1, 200)
        v = Fraction(num, d)
        forms = [
            f"\\frac{{{num}}}{{{d}}}",
            f"\\dfrac{{{num}}}{{{d}}}",
            f"{num}/{d}",
            f"\\tfrac{{{num}}}{{{d}}}",
        ]
        if num < 10 and d < 10:
            forms.append(f"\\frac{num}{d}")
        cases.append((rng.choice(forms), v))
    # Negative fractions.
    for _ in range(10):
        d = rng.randint(2, 12)
        num = rng.randint(1, 30)
        v = Fraction(-num, d)
        cases.append((rng.choice([f"-\\frac{{{num}}}{{{d}}}", f"-{num}/{d}"]), v))
    # Terminating decimals.
    for _ in range(35):
        places = rng.randint(1, 4)
        n = rng.randint(-5000, 5000)
        v = Fraction(n, 10**places)
        s = decimal_str(v, places)
        if rng.random() < 0.3:
            s += "0"
        cases.append((s, v))
    # Percent and degree markers around a number.
    for _ in range(10):
        n = rng.randint(1, 99)
        cases.append((rng.choice([f"{n}\\%", f"{n}^\\circ", f"{n}%"]), Fraction(n)))
    return cases


# Symbolic answers keep their text with whitespace removed.
SYMBOLIC = [
    ("\\sqrt{2}", "\\sqrt{2}"),
    ("2\\sqrt{3}", "2\\sqrt{3}"),
    ("\\frac{\\sqrt{3}}{2}", "\\frac{\\sqrt{3}}{2}"),
    ("x^2 + 1", "x^2+1"),
    ("(1, 2)", "(1,2)"),
    ("\\pi", "\\pi"),
    ("3\\pi", "3\\pi"),
    ("\\{1, 2, 3\\}", "\\{1,2,3\\}"),
    ("[0, 1)", "[0,1)"),
    ("\\text{(A)}", "(A)"),
    ("y = 2x + 3", "y=2x+3"),
    ("\\infty", "\\infty"),
    ("-\\infty", "-\\infty"),
    ("a^{2}b", "a^{2}b"),
    ("\\begin{pmatrix} 1 \\\\ 2 \\end{pmatrix}", "\\begin{pmatrix}1\\\\2\\end{pmatrix}"),
    ("\\mathrm{Monday}", "Monday"),
    ("\\textbf{B}", "B"),
    ("\\sqrt{\\frac{1}{2}}", "\\sqrt{\\frac{1}{2}}"),
    ("e^{i\\pi}", "e^{i\\pi}"),
    ("x \\in (0, 5]", "x\\in(0,5]"),
]

# Responses without a complete box.
UNBOXED = [
    "The answer is 42.",
    "We conclude \\boxed{17",
    "Nothing to box here: \\boxed",
    "\\boxed x = 3",
    "",
    "The final answer is $\\fbox{5}$",
]


def main() -> None:
    rng = random.Random(20240611)
    rows = []
    for raw, v in numeric_forms(rng):
        wrapper = rng.choice(WRAPPERS)
        rows.append({"input": wrapper % raw, "extraction": raw, "canonical": value_str(v),
                     "value": value_str(v)})
    for raw, canonical in SYMBOLIC:
        for wrapper in rng.sample(WRAPPERS, 2):
            rows.append({"input": wrapper % raw, "extraction": raw, "canonical": canonical,
                         "value": None})
    for text in UNBOXED:
        rows.append({"input": text, "extraction": None, "canonical": None, "value": None})
    # Nested braces deep inside the last box.
    for depth in range(1, 6):
        inner = "{" * depth + "7" + "}" * depth
        rows.append({"input": f"result \\boxed{{{inner}}}", "extraction": inner,
                     "canonical": inner, "value": None})
    # A complete box followed by an unterminated one: the complete box wins.
    rows.append({"input": "\\boxed{3} and then \\boxed{4", "extraction": "3", "canonical": "3",
                 "value": "3"})
    # Escaped braces do not close the group.
    rows.append({"input": "\\boxed{\\{1\\}}", "extraction": "\\{1\\}", "canonical": "\\{1\\}",
                 "value": None})
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    print(f"wrote {len(rows)} cases to {OUT}")


if __name__ == "__main__":
    main()
