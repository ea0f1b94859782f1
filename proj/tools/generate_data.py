#!/usr/bin/env python3
"""Generates data/bank.json and data/personas.json.

The bank covers 20 topics with three items each (Easy/Medium/Hard). Every
hint template is checked against the item's reference solution so no hint
shares a 12+ character substring with it.
"""

import json
import random
import sys
from pathlib import Path

TOPICS = [
    "arrays", "strings", "hash-maps", "two-pointers", "sliding-window",
    "stacks", "queues", "linked-lists", "binary-search", "sorting",
    "recursion", "dynamic-programming", "graphs-bfs", "graphs-dfs", "trees",
    "heaps", "greedy", "backtracking", "bit-manipulation", "intervals",
]

# Medium/Hard items get one prerequisite topic; Easy items have none so that
# every topic stays reachable for a cold-start learner.
PREREQ = {
    "two-pointers": "arrays", "sliding-window": "arrays",
    "hash-maps": "arrays", "stacks": "arrays", "queues": "arrays",
    "linked-lists": "arrays", "binary-search": "sorting",
    "sorting": "arrays", "recursion": "strings",
    "dynamic-programming": "recursion", "graphs-bfs": "queues",
    "graphs-dfs": "recursion", "trees": "recursion", "heaps": "arrays",
    "greedy": "sorting", "backtracking": "recursion",
    "bit-manipulation": "arrays", "intervals": "sorting",
    "strings": "arrays",
}

SECONDARY = {
    "sliding-window": "hash-maps", "binary-search": "arrays",
    "dynamic-programming": "arrays", "graphs-bfs": "graphs-dfs",
    "trees": "graphs-dfs", "greedy": "heaps", "intervals": "greedy",
}

PROBLEM_NAMES = {
    "Easy": "warmup", "Medium": "core", "Hard": "stretch",
}

TIER_STYLE = {
    "beginner": "Start simple: ",
    "intermediate": "Consider this: ",
    "advanced": "Key idea: ",
}

LEVEL_TEXT = [
    "re-read the problem statement and restate the goal for topic {t} in your own words.",
    "work one small example by hand and note what changes at each step.",
    "think about which {t} technique keeps the needed information available cheaply.",
    "the intended approach walks the input once while maintaining a running summary; decide what that summary must hold.",
    "maintain the running summary, update it per element, and emit the answer when the scan ends; check empty input first.",
]


def lcs_len(a, b):
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    best = 0
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
                best = max(best, cur[j])
        prev = cur
    return best


def make_solution(topic, diff, idx):
    # topic names stay out of the code so hints may mention the topic freely
    return (
        f"def answer_{idx}(xs):\n"
        f"    acc = init_state({idx})\n"
        f"    for x in xs:\n"
        f"        acc = step(acc, x)\n"
        f"    return finish(acc)\n"
    )


def make_hints(topic, solution):
    hints = {}
    for level in range(1, 6):
        for tier, prefix in TIER_STYLE.items():
            text = prefix + LEVEL_TEXT[level - 1].format(t=topic)
            assert lcs_len(text, solution) < 12, (topic, level, tier)
            hints[f"{level}/{tier}"] = text
    return hints


def make_tests(topic, idx, rng):
    tests = []
    for k in range(rng.randint(3, 5)):
        xs = [rng.randint(-9, 9) for _ in range(k + 2)]
        tests.append({
            "input": json.dumps(xs),
            "expected": str(sum(xs) + idx),
        })
    return tests


def make_suggestions(topic):
    return {
        "style": [
            f"name the accumulator after its meaning in the {topic} scan",
            "hoist the loop invariant out of the loop body",
            "drop the temporary list; a generator expression is enough",
        ],
        "efficiency": [
            "avoid rebuilding the summary from scratch each iteration",
            f"a single pass suffices for this {topic} problem",
            "reserve capacity up front when the output size is known",
        ],
        "robustness": [
            "handle the empty input before the main loop",
            "guard against duplicate elements changing the invariant",
            "add an assertion on the summary bounds while debugging",
        ],
    }


def build_bank(rng):
    items = []
    for topic in TOPICS:
        for d_idx, diff in enumerate(["Easy", "Medium", "Hard"]):
            idx = d_idx + 1
            item_id = f"{topic}-{PROBLEM_NAMES[diff]}"
            topics = [topic]
            if diff == "Hard" and topic in SECONDARY:
                topics.append(SECONDARY[topic])
            prereqs = []
            if diff != "Easy" and topic in PREREQ:
                prereqs = [PREREQ[topic]]
            solution = make_solution(topic, diff, idx)
            items.append({
                "id": item_id,
                "topics": topics,
                "difficulty": diff,
                "prerequisites": prereqs,
                "expected_solve_time": [240.0, 420.0, 720.0][d_idx],
                "reference_solution": solution,
                "hint_templates": make_hints(topic, solution),
                "tests": make_tests(topic, idx, rng),
                "suggestions": make_suggestions(topic),
            })
    return items


def build_personas(rng):
    profiles = [
        ("novice-nia", 0.14, 0.04, 0.04, 0.05, 6.0),
        ("novice-omar", 0.17, 0.05, 0.03, 0.05, 7.0),
        ("novice-kit", 0.21, 0.06, 0.04, 0.05, 8.0),
        ("mid-lena", 0.42, 0.10, 0.03, 1.00, 10.0),
        ("mid-pavel", 0.48, 0.12, 0.02, 1.00, 11.0),
        ("mid-june", 0.52, 0.10, 0.03, 1.00, 12.0),
        ("mid-arlo", 0.58, 0.12, 0.02, 1.00, 13.0),
        ("adept-sana", 0.68, 0.10, 0.02, 0.15, 16.0),
        ("adept-theo", 0.74, 0.09, 0.02, 0.15, 18.0),
        ("adept-mira", 0.80, 0.10, 0.02, 0.15, 20.0),
    ]
    personas = []
    for i, (pid, base, spread, lr, resp, tau) in enumerate(profiles):
        skill = {}
        for t in TOPICS:
            s = base + rng.uniform(-spread, spread)
            skill[t] = round(min(0.95, max(0.05, s)), 3)
        personas.append({
            "persona_id": pid,
            "skill": skill,
            "learning_rate": lr,
            "hint_responsiveness": resp,
            "forgetting_tau": tau,
            "seed": 1000 + i,
        })
    return personas


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20250101)
    bank = build_bank(rng)
    (out_dir / "bank.json").write_text(json.dumps(bank, indent=2) + "\n")
    personas = build_personas(rng)
    (out_dir / "personas.json").write_text(json.dumps(personas, indent=2) + "\n")
    print(f"wrote {len(bank)} items, {len(personas)} personas to {out_dir}")


if __name__ == "__main__":
    main()
