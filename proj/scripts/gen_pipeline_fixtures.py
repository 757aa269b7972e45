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

"""Writes the scripted-backend fixtures used by the pipeline tests.

tests/fixtures/e2e/
  gsm8k_raw.jsonl, math_raw.jsonl  raw source files (10 problems each)
  personas.txt                     persona store
  scenario.json                    per-problem outcome table (the test oracle
                                   input; k1=2, k2=3, one unparseable re-ask)
  mock_script.json                 backend responses realising the scenario

tests/fixtures/diversity/
  gsm8k_raw.jsonl, personas.txt
  persona_script.json              rewrites written in persona voices
  template_script.json             rewrites from one fixed template

The mock keys are request keys "<problem id>/<phase>/<ordinal>", so nothing
here depends on which personas the sampler picks.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
K1, K2 = 2, 3

PERSONAS = [
    "A retired sea captain who measures everything in knots and fathoms",
    "A pastry chef in Lyon obsessed with precise butter ratios",
    "A high-school robotics coach preparing for a regional tournament",
    "A beekeeper tracking honey yields across mountain hives",
    "A jazz drummer counting syncopated rhythms between gigs",
    "A marathon runner planning split times for a desert race",
    "A medieval history professor cataloguing castle inventories",
    "A nurse on night shift balancing medication schedules",
    "A teenage skateboarder saving up for a custom deck",
    "An astronomer logging meteor counts from an observatory",
    "A rice farmer in the Mekong delta managing irrigation channels",
    "A chess grandmaster analysing tournament prize splits",
    "A wildlife photographer budgeting for an arctic expedition",
    "A taxi driver in Mumbai estimating fuel costs per route",
    "A librarian reorganising rare manuscripts by century",
    "A volcanologist sampling lava temperatures",
    "A ballet instructor scheduling rehearsals for a winter gala",
    "A software tester chasing flaky nightly builds",
    "A carpenter building oak bookshelves for a community hall",
    "A grandmother knitting scarves for a charity bazaar",
    "An urban cyclist mapping bike lanes through Copenhagen",
    "A sommelier pairing vintages for a harvest dinner",
    "A street food vendor selling tamales at a weekend market",
    "A glacier researcher measuring annual ice retreat",
    "A puppeteer touring village festivals",
    "A cricket statistician compiling batting averages",
    "A museum guard counting visitors during a holiday rush",
    "A beach lifeguard rotating tower shifts",
    "A violin maker selecting spruce for soundboards",
    "A fire lookout scanning ridgelines through summer",
]

GSM8K_TEMPLATES = [
    ("A shop sells {a} boxes of pencils with {b} pencils in each box. How many pencils are there?",
     lambda a, b: a * b),
    ("Maria had {a} stickers and bought {b} more. How many stickers does she have now?",
     lambda a, b: a + b),
    ("A train travels {a} miles each day for {b} days. How far does it travel?", lambda a, b: a * b),
    ("Tom read {a} pages on Monday and {b} pages on Tuesday. How many pages did he read?",
     lambda a, b: a + b),
    ("A farm has {a} rows of apple trees with {b} trees per row. How many trees are there?",
     lambda a, b: a * b),
]

MATH_ITEMS = [
    ("What is $\\frac{{{a}}}{{{b}}}$ in lowest terms?", "Prealgebra"),
    ("Compute $\\frac{{{a}}}{{{b}}}$ as a reduced fraction.", "Number Theory"),
    ("Simplify $\\frac{{{a}}}{{{b}}}$.", "Algebra"),
]


def gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def write_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                    encoding="utf-8")


def make_problems(rng, n_gsm, n_math):
    """Returns (gsm_raw, math_raw, problems) where problems carry id, question,
    the numeric answer as (num, den), and a surface form for model output."""
    gsm_raw, math_raw, problems = [], [], []
    for i in range(n_gsm):
        text, fn = GSM8K_TEMPLATES[i % len(GSM8K_TEMPLATES)]
        a, b = rng.randint(12, 60), rng.randint(11, 40)
        ans = fn(a, b)
        q = text.format(a=a, b=b)
        shown = f"{ans:,}" if ans >= 1000 else str(ans)
        gsm_raw.append({"question": q, "answer": f"We compute the result step by step.\n#### {shown}"})
        problems.append({"id": f"gsm8k-train-{i:05d}", "source": "gsm8k", "question": q,
                         "num": ans, "den": 1})
    for i in range(n_math):
        text, subject = MATH_ITEMS[i % len(MATH_ITEMS)]
        b = rng.choice([4, 6, 8, 10, 12, 15, 16, 20])
        a = rng.randint(1, 3 * b)
        g = gcd(a, b)
        num, den = a // g, b // g
        q = text.format(a=a, b=b)
        boxed = str(num) if den == 1 else f"\\frac{{{num}}}{{{den}}}"
        level = 1 + (i * 3) % 5
        math_raw.append({"problem": q, "solution": f"Divide by {g}. The answer is $\\boxed{{{boxed}}}$.",
                         "type": subject, "level": f"Level {level}"})
        problems.append({"id": f"math-train-{i:05d}", "source": "math", "question": q,
                         "num": num, "den": den})
    return gsm_raw, math_raw, problems


def answer_form(p, rng, wrong=False):
    num, den = p["num"], p["den"]
    if wrong:
        num += den
    if den == 1:
        return rng.choice([str(num), f"{num:,}" if num >= 1000 else f"{num}.0"])
    forms = [f"\\frac{{{num}}}{{{den}}}", f"{num}/{den}", f"\\dfrac{{{num}}}{{{den}}}"]
    if 10**6 % den == 0:
        forms.append(str(num * (10**6 // den) / 10**6).rstrip("0"))
    return rng.choice(forms)


def solution(p, tag, rng, outcome):
    body = f"Working through {tag}: we set up the quantities and combine them carefully."
    if outcome == "unparseable":
        return body + " The result is unclear."
    return body + f" Hence the answer is $\\boxed{{{answer_form(p, rng, outcome == 'wrong')}}}$."


def reflection(p, tag, rng, outcome):
    review = f"### Review of Incorrect Explanation: the earlier work on {tag} dropped a term."
    fixed = f"Recomputing {tag} with every term kept gives"
    if outcome == "nosplit":
        return f"{review} {fixed} $\\boxed{{{answer_form(p, rng)}}}$."
    ans = answer_form(p, rng, outcome == "wrong")
    return f"{review}\n\n### Corrected Explanation:\n{fixed} $\\boxed{{{ans}}}$."


def build_e2e():
    rng = random.Random(7)
    gsm_raw, math_raw, problems = make_problems(rng, 10, 10)
    # Inference attempt sequences (max one re-ask), fixed by hand so every
    # branch occurs.
    inference_plan = [
        ["correct"], ["correct"], ["incorrect"], ["unparseable", "correct"], ["correct"],
        ["fail"], ["unparseable", "unparseable"], ["correct"], ["incorrect"], ["correct"],
        ["correct"], ["incorrect"], ["correct"], ["unparseable", "incorrect"], ["correct"],
        ["incorrect"], ["correct"], ["correct"], ["incorrect"], ["correct"],
    ]
    rewrite_outcomes = ["ok", "wrong", "unparseable", "empty"]
    reflect_plan = ["correct", "nosplit", "correct", "incorrect", "correct", "correct", "correct"]
    scenario = {"k1": K1, "k2": K2, "max_retries_unparseable": 1, "problems": []}
    script = {"responses": {}, "transient_failures": {}, "latency_ms": 0}
    r = script["responses"]
    reflect_i = 0
    for p, plan in zip(problems, inference_plan):
        entry = {"id": p["id"], "source": p["source"], "inference": plan}
        pid = p["id"]
        for attempt, outcome in enumerate(plan):
            if outcome == "fail":
                continue  # unscripted: the backend reports a malformed response
            key = f"{pid}/s1-inference/{attempt}"
            r[key] = solution(p, f"{pid} attempt {attempt}", rng,
                              {"correct": "ok", "incorrect": "wrong"}.get(outcome, outcome))
        final = plan[-1]
        if final == "correct":
            outs = rng.choices(rewrite_outcomes, weights=[5, 2, 1, 1], k=K1)
            if pid == "gsm8k-train-00000":
                outs = ["ok", "ok"]
            entry["rewrites"] = outs
            for s, o in enumerate(outs):
                rq = f"Rewritten question {s} for {pid}: {p['question']}"
                r[f"{pid}/s1-rewrite/{s}"] = "   " if o == "empty" else rq
                if o != "empty":
                    r[f"{pid}/s1-rewrite-solve/{s}"] = solution(
                        p, f"{pid} rewrite {s}", rng, {"ok": "ok"}.get(o, o))
        elif final in ("incorrect", "unparseable"):
            ro = reflect_plan[reflect_i % len(reflect_plan)]
            reflect_i += 1
            entry["reflection"] = ro
            r[f"{pid}/s2-reflect/0"] = reflection(p, pid, rng, {"incorrect": "wrong"}.get(ro, ro))
            if ro == "correct":
                outs = rng.choices(["ok", "wrong", "nosplit", "empty"], weights=[5, 2, 1, 1], k=K2)
                entry["reflection_rewrites"] = outs
                for s, o in enumerate(outs):
                    rq = f"Persona retelling {s} of {pid}: {p['question']}"
                    r[f"{pid}/s2-rewrite/{s}"] = "" if o == "empty" else rq
                    if o != "empty":
                        r[f"{pid}/s2-rewrite-reflect/{s}"] = reflection(
                            p, f"{pid} retelling {s}", rng, {"ok": "correct"}.get(o, o))
        scenario["problems"].append(entry)
    # Transient failures that the gateway retries through (max_retries 3).
    for key in ["gsm8k-train-00000/s1-inference/0", "math-train-00002/s1-rewrite/1",
                "gsm8k-train-00002/s2-reflect/0"]:
        if key in r:
            script["transient_failures"][key] = 2
    out = ROOT / "e2e"
    write_jsonl(out / "gsm8k_raw.jsonl", gsm_raw)
    write_jsonl(out / "math_raw.jsonl", math_raw)
    (out / "personas.txt").write_text("\n".join(PERSONAS[:12]) + "\n", encoding="utf-8")
    write_json(out / "scenario.json", scenario)
    write_json(out / "mock_script.json", script)


PERSONA_VOICE = {
    "sea captain": ("aboard the schooner", "crates of salted cod", "before the tide turns"),
    "pastry chef": ("in a bustling Lyon patisserie", "trays of croissants", "before the morning rush"),
    "robotics coach": ("at the regional robotics tournament", "servo motors", "ahead of qualifiers"),
    "beekeeper": ("among the alpine hives", "jars of wildflower honey", "after the clover bloom"),
    "jazz drummer": ("between sets at a smoky club", "drumsticks", "before the encore"),
    "marathon runner": ("on the desert ultramarathon course", "electrolyte packets", "at dawn"),
    "history professor": ("in the castle archives", "illuminated ledgers", "for the seminar"),
    "nurse": ("during the hospital night shift", "saline bags", "before rounds"),
    "skateboarder": ("at the concrete skatepark", "grip tape sheets", "over summer vacation"),
    "astronomer": ("at the mountaintop observatory", "meteor sightings", "during the Perseids"),
}


def build_diversity():
    rng = random.Random(11)
    gsm_raw, _, problems = make_problems(rng, 12, 0)
    voices = list(PERSONA_VOICE.values())
    persona_script = {"responses": {}, "latency_ms": 0}
    template_script = {"responses": {}, "latency_ms": 0}
    for p in problems:
        pid = p["id"]
        ok = solution(p, pid, rng, "ok")
        for script in (persona_script, template_script):
            script["responses"][f"{pid}/s1-inference/0"] = ok
        for s in range(K1):
            where, item, when = voices[rng.randrange(len(voices))]
            persona_q = (f"Picture yourself {where}: {p['question'].rstrip('?')} "
                         f"while keeping track of {item} {when}?")
            template_q = f"Rewrite: {p['question']}"
            persona_script["responses"][f"{pid}/s1-rewrite/{s}"] = persona_q
            template_script["responses"][f"{pid}/s1-rewrite/{s}"] = template_q
            solve = solution(p, f"{pid} variant {s}", rng, "ok")
            persona_script["responses"][f"{pid}/s1-rewrite-solve/{s}"] = solve
            template_script["responses"][f"{pid}/s1-rewrite-solve/{s}"] = solve
    out = ROOT / "diversity"
    write_jsonl(out / "gsm8k_raw.jsonl", gsm_raw)
    (out / "personas.txt").write_text("\n".join(PERSONAS[:10]) + "\n", encoding="utf-8")
    write_json(out / "persona_script.json", persona_script)
    write_json(out / "template_script.json", template_script)


if __name__ == "__main__":
    build_e2e()
    build_diversity()
    print("fixtures written under", ROOT)
